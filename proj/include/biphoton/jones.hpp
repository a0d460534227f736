#pragma once

#include <complex>

namespace biphoton {

using complex = std::complex<double>;

inline constexpr double kConstructionTolerance = 1e-12;
inline constexpr double kCompositionTolerance = 1e-10;

// Polarization amplitude over the (H, V) basis.
struct JonesVector {
  complex h{};
  complex v{};

  double norm2() const { return std::norm(h) + std::norm(v); }
  JonesVector normalized() const;

  static JonesVector horizontal() { return {1.0, 0.0}; }
  static JonesVector vertical() { return {0.0, 1.0}; }
  // Linear polarization at angle theta from H.
  static JonesVector linear(double theta);
};

// Complex 2x2 operator over the (H, V) basis, row-major.
struct JonesMatrix {
  complex hh{1.0};
  complex hv{};
  complex vh{};
  complex vv{1.0};

  static JonesMatrix identity() { return {}; }
  static JonesMatrix diagonal(complex h, complex v) { return {h, 0.0, 0.0, v}; }

  complex det() const { return hh * vv - hv * vh; }
  complex trace() const { return hh + vv; }
  JonesMatrix adjoint() const;
  JonesMatrix transpose() const { return {hh, vh, hv, vv}; }
  double frobenius_norm() const;
  bool is_finite() const;
  bool is_unitary(double tol = kConstructionTolerance) const;

  JonesMatrix operator*(const JonesMatrix& rhs) const;
  JonesVector operator*(const JonesVector& x) const;
  JonesMatrix operator*(complex s) const;
  JonesMatrix operator-(const JonesMatrix& rhs) const;
};

// Largest entrywise modulus of a - b.
double max_abs_diff(const JonesMatrix& a, const JonesMatrix& b);

// Unit-modulus s maximizing |tr(a^dagger s b)|, i.e. the global phase that best aligns b to a.
// Returns 1 when the overlap vanishes.
complex fit_global_phase(const JonesMatrix& a, const JonesMatrix& b);

// Frobenius distance between a and b after removing the best global phase of b.
double phase_fitted_distance(const JonesMatrix& a, const JonesMatrix& b);

// Half the trace norm of u - v; lies in [0, 2] for unitaries.
double trace_distance(const JonesMatrix& u, const JonesMatrix& v);

// Linear retarder with retardation parameter delta (phase e^{+-i delta} on the fast/slow
// axes, so delta = pi/2 is a half-wave plate) and optical axis at alpha from H.
class RetarderSpec {
 public:
  // Throws std::invalid_argument on non-finite input. Both angles are reduced to [0, pi);
  // the resulting operator differs from the unreduced one at most by a global sign.
  RetarderSpec(double delta, double alpha);

  double delta() const { return delta_; }
  double alpha() const { return alpha_; }

 private:
  double delta_;
  double alpha_;
};

// Basis rotation [[cos, -sin], [sin, cos]].
JonesMatrix rotator(double theta);

// rotator(alpha) * diag(e^{i delta}, e^{-i delta}) * rotator(-alpha).
JonesMatrix retarder(const RetarderSpec& spec);

// Faraday rotator followed by a mirror: exactly [[0, -1], [-1, 0]].
JonesMatrix faraday_mirror();

// Operator seen on the return pass through a reciprocal element, expressed in the
// mirror-flipped frame: sigma_z * u^T * sigma_z.
JonesMatrix backward(const JonesMatrix& u);

// Fiber, Faraday mirror, fiber again: backward(u) * faraday_mirror() * u.
// For any u this equals det(u) * faraday_mirror(), so polarization drift cancels.
// Throws PreconditionError if u is not unitary within kCompositionTolerance.
JonesMatrix round_trip(const JonesMatrix& u);

}  // namespace biphoton
