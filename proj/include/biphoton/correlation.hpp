#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "biphoton/biphoton_state.hpp"
#include "biphoton/fiber.hpp"
#include "biphoton/jones.hpp"

namespace biphoton {

// Linear polarizers behind the two beamsplitter outputs (radians from H).
struct AnalyzerConfig {
  double theta1 = 0.0;
  double theta2 = 0.0;

  static AnalyzerConfig plus45_plus45();
  static AnalyzerConfig plus45_minus45();
};

enum class Normalization { peak_unity, raw };
enum class G2Branch { plus, minus };
enum class FourierMode { far_field, exact_fourier };

// Sampled G2(tau) for one analyzer setting. tau is strictly increasing and symmetric about 0.
struct CorrelationResult {
  std::vector<double> tau;  // s
  std::vector<double> g2;
  AnalyzerConfig analyzer;
  Normalization normalization = Normalization::peak_unity;

  // Linear interpolation; throws std::out_of_range outside the grid.
  double value_at(double t) const;
};

struct PostSelectionWindow {
  double center = 0.0;      // s
  double half_width = 0.0;  // s
};

// Closed-form G+- for a retarder between source and analyzers at +-45 degrees, with
// t = tau / tau_f:
//   plus:  [cos^2 d (1 + sin^2 d) + sin^4 d cos^2 4a] sin^2 t cos^2 t / t^2
//   minus: [sin^2 4a sin^4 d cos^2 t + sin^2 t] sin^2 t / t^2
// Scaled so that the plate-free plus curve is 1 at tau = 0. Throws ConfigurationError
// if tau_f <= 0.
double g2_analytic(double tau, double tau_f, const RetarderSpec& plate, G2Branch which);

CorrelationResult g2_analytic_curve(const std::vector<double>& tau, double tau_f,
                                    const RetarderSpec& plate, G2Branch which);

// Coincidence amplitude A(Omega) = <e(theta1) e(theta2)| Psi(Omega)>, followed by dispersion
// of the fiber on top of whatever the state already carries (state.dispersion()).
//
// far_field: g2(tau) = |A(Omega)|^2 at tau = 2 D Omega, D the total k''z, one point per used
//   grid sample (n - 1 points, tau = 0 included). Requires D > 0.
// exact_fourier: A(tau) = (dOmega / sqrt(2 pi)) sum_k A(Omega_k) e^{i D Omega_k^2} e^{-i Omega_k tau}
//   on tau_j = (j - n/2 + 1/2) * 2 pi / (n dOmega), j = 0..n-1 (n points straddling 0), so
//   sum_j g2 dtau equals sum_k |A(Omega_k)|^2 dOmega. Subject to the apply_gvd aliasing bound.
//
// peak_unity divides by half the peak of the polarization-summed intensity, which does not
// depend on local unitaries; raw leaves the densities as above.
CorrelationResult g2_numeric(const BiphotonState& state, const FiberChannel& fiber,
                             const AnalyzerConfig& analyzer, FourierMode mode,
                             Normalization normalization = Normalization::peak_unity);

// (G+ - G-) / (G+ + G-) at tau; nullopt when the denominator is below 1e-15 of the larger
// peak. Throws std::invalid_argument on mismatched grids or normalizations.
std::optional<double> visibility(const CorrelationResult& plus, const CorrelationResult& minus,
                                 double tau);

// Visibility of a single pair amplitude between analyzers (theta, theta) and
// (theta, theta + pi/2).
std::optional<double> slice_visibility(const PairAmplitude& psi, double basis_angle);

// Probability that a pair of a normalized state passes both analyzers.
double analyzer_pass_probability(const BiphotonState& state, const AnalyzerConfig& analyzer);

struct PostSelection {
  PairAmplitude amplitude;  // normalized, H/V basis
  double fidelity_psi_plus = 0.0;
  double fidelity_psi_minus = 0.0;
  std::optional<double> visibility;  // in the requested analyzer basis
  double omega_low = 0.0;            // detuning band selected by the window, rad/s
  double omega_high = 0.0;
  std::size_t samples = 0;
};

// Narrow detection-time selection behind a dispersive fiber. With D the state's own k''z plus
// the fiber's, the window maps in the far field to the detuning band Omega = tau / (2 D); the
// band's amplitudes are averaged coherently after removing the dispersion phase the state
// already carries (any phase common to both polarizations leaves the selection unchanged).
// Throws PreconditionError if D = 0 or the window leaves the sampled delays,
// DegenerateInputError if the band holds less than 1e-12 of the state norm.
PostSelection postselect(const BiphotonState& state, const FiberChannel& fiber,
                         const PostSelectionWindow& window,
                         double basis_angle = std::numbers::pi / 4.0);

}  // namespace biphoton
