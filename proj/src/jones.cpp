#include "biphoton/jones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

double reduce_to_half_turn(double angle) {
  double r = std::fmod(angle, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

JonesVector JonesVector::normalized() const {
  const double n = std::sqrt(norm2());
  if (!(n > 0.0) || !std::isfinite(n))
    throw DegenerateInputError("cannot normalize a zero or non-finite Jones vector");
  return {h / n, v / n};
}

JonesVector JonesVector::linear(double theta) {
  require_finite(theta, "polarizer angle");
  return {std::cos(theta), std::sin(theta)};
}

JonesMatrix JonesMatrix::adjoint() const {
  return {std::conj(hh), std::conj(vh), std::conj(hv), std::conj(vv)};
}

double JonesMatrix::frobenius_norm() const {
  return std::sqrt(std::norm(hh) + std::norm(hv) + std::norm(vh) + std::norm(vv));
}

bool JonesMatrix::is_finite() const {
  for (const complex& z : {hh, hv, vh, vv})
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool JonesMatrix::is_unitary(double tol) const {
  return is_finite() && max_abs_diff(adjoint() * (*this), identity()) <= tol;
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& r) const {
  return {hh * r.hh + hv * r.vh, hh * r.hv + hv * r.vv,
          vh * r.hh + vv * r.vh, vh * r.hv + vv * r.vv};
}

JonesVector JonesMatrix::operator*(const JonesVector& x) const {
  return {hh * x.h + hv * x.v, vh * x.h + vv * x.v};
}

JonesMatrix JonesMatrix::operator*(complex s) const { return {hh * s, hv * s, vh * s, vv * s}; }

JonesMatrix JonesMatrix::operator-(const JonesMatrix& r) const {
  return {hh - r.hh, hv - r.hv, vh - r.vh, vv - r.vv};
}

double max_abs_diff(const JonesMatrix& a, const JonesMatrix& b) {
  const JonesMatrix d = a - b;
  return std::max({std::abs(d.hh), std::abs(d.hv), std::abs(d.vh), std::abs(d.vv)});
}

complex fit_global_phase(const JonesMatrix& a, const JonesMatrix& b) {
  const complex overlap = (b.adjoint() * a).trace();
  const double mag = std::abs(overlap);
  if (mag == 0.0) return 1.0;
  return overlap / mag;
}

double phase_fitted_distance(const JonesMatrix& a, const JonesMatrix& b) {
  return (a - b * fit_global_phase(a, b)).frobenius_norm();
}

double trace_distance(const JonesMatrix& u, const JonesMatrix& v) {
  // For a 2x2 matrix the singular values satisfy s1^2 + s2^2 = |M|_F^2 and s1 s2 = |det M|.
  const JonesMatrix d = u - v;
  const double f = d.frobenius_norm();
  return 0.5 * std::sqrt(f * f + 2.0 * std::abs(d.det()));
}

RetarderSpec::RetarderSpec(double delta, double alpha) {
  require_finite(delta, "retardation delta");
  require_finite(alpha, "retarder axis alpha");
  delta_ = reduce_to_half_turn(delta);
  alpha_ = reduce_to_half_turn(alpha);
}

JonesMatrix rotator(double theta) {
  require_finite(theta, "rotation angle");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, -s, s, c};
}

JonesMatrix retarder(const RetarderSpec& spec) {
  const complex phase = std::polar(1.0, spec.delta());
  return rotator(spec.alpha()) * JonesMatrix::diagonal(phase, std::conj(phase)) *
         rotator(-spec.alpha());
}

JonesMatrix faraday_mirror() { return {0.0, -1.0, -1.0, 0.0}; }

JonesMatrix backward(const JonesMatrix& u) { return {u.hh, -u.vh, -u.hv, u.vv}; }

JonesMatrix round_trip(const JonesMatrix& u) {
  if (!u.is_unitary(kCompositionTolerance))
    throw PreconditionError("round_trip requires a unitary fiber operator");
  return backward(u) * faraday_mirror() * u;
}

}  // namespace biphoton
