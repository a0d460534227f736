#include "biphoton/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "biphoton/errors.hpp"
#include "fourier.hpp"

namespace biphoton {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<double, 4> analyzer_weights(const AnalyzerConfig& a) {
  const double c1 = std::cos(a.theta1), s1 = std::sin(a.theta1);
  const double c2 = std::cos(a.theta2), s2 = std::sin(a.theta2);
  return {c1 * c2, c1 * s2, s1 * c2, s1 * s2};  // hh, hv, vh, vv
}

complex coincidence_amplitude(const PairAmplitude& psi, const std::array<double, 4>& w) {
  return w[0] * psi.hh + w[1] * psi.hv + w[2] * psi.vh + w[3] * psi.vv;
}

void require_same_grid(const CorrelationResult& a, const CorrelationResult& b) {
  if (a.tau.size() != b.tau.size() || a.normalization != b.normalization)
    throw std::invalid_argument("visibility: correlation results have different grids");
  for (std::size_t i = 0; i < a.tau.size(); ++i) {
    const double scale = std::max(std::abs(a.tau[i]), std::abs(b.tau[i]));
    if (std::abs(a.tau[i] - b.tau[i]) > 1e-12 * std::max(scale, 1e-300))
      throw std::invalid_argument("visibility: correlation results have different grids");
  }
}

}  // namespace

AnalyzerConfig AnalyzerConfig::plus45_plus45() { return {kPi / 4.0, kPi / 4.0}; }
AnalyzerConfig AnalyzerConfig::plus45_minus45() { return {kPi / 4.0, -kPi / 4.0}; }

double CorrelationResult::value_at(double t) const {
  if (tau.empty() || t < tau.front() || t > tau.back())
    throw std::out_of_range("correlation result: tau outside the sampled range");
  auto hi = std::lower_bound(tau.begin(), tau.end(), t);
  const auto j = static_cast<std::size_t>(hi - tau.begin());
  if (tau[j] == t) return g2[j];
  const std::size_t i = j - 1;
  const double f = (t - tau[i]) / (tau[j] - tau[i]);
  return g2[i] + f * (g2[j] - g2[i]);
}

double g2_analytic(double tau, double tau_f, const RetarderSpec& plate, G2Branch which) {
  if (!(tau_f > 0.0) || !std::isfinite(tau_f))
    throw ConfigurationError("g2_analytic: tau_f must be positive");
  const double t = tau / tau_f;
  const double sd = std::sin(plate.delta());
  const double cd = std::cos(plate.delta());
  const double sd4 = sd * sd * sd * sd;
  const double c4a = std::cos(4.0 * plate.alpha());
  const double s4a = std::sin(4.0 * plate.alpha());
  const double st = std::sin(t);
  const double ct = std::cos(t);
  // sin^2 t / t^2 through sinc, which carries the series at t -> 0.
  const double envelope = sinc(t) * sinc(t);
  if (which == G2Branch::plus) {
    const double bracket = cd * cd * (1.0 + sd * sd) + sd4 * c4a * c4a;
    return bracket * envelope * ct * ct;
  }
  return (s4a * s4a * sd4 * ct * ct + st * st) * envelope;
}

CorrelationResult g2_analytic_curve(const std::vector<double>& tau, double tau_f,
                                    const RetarderSpec& plate, G2Branch which) {
  CorrelationResult r;
  r.tau = tau;
  r.g2.reserve(tau.size());
  for (double t : tau) r.g2.push_back(g2_analytic(t, tau_f, plate, which));
  r.analyzer =
      which == G2Branch::plus ? AnalyzerConfig::plus45_plus45() : AnalyzerConfig::plus45_minus45();
  r.normalization = Normalization::peak_unity;
  return r;
}

CorrelationResult g2_numeric(const BiphotonState& state, const FiberChannel& fiber,
                             const AnalyzerConfig& analyzer, FourierMode mode,
                             Normalization normalization) {
  const FrequencyGrid& grid = state.grid();
  const std::size_t n = grid.size();
  const double fiber_k2z = fiber.k2() * fiber.dispersive_length();
  const double total_k2z = state.dispersion() + fiber_k2z;
  const auto w = analyzer_weights(analyzer);

  CorrelationResult r;
  r.analyzer = analyzer;
  r.normalization = normalization;
  double summed_peak = 0.0;

  if (mode == FourierMode::far_field) {
    if (!(total_k2z > 0.0))
      throw ConfigurationError("g2_numeric: far-field mapping needs nonzero dispersion");
    r.tau.reserve(n - 1);
    r.g2.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
      const PairAmplitude psi = state.slice(k);
      r.tau.push_back(2.0 * total_k2z * grid.omega(k));
      r.g2.push_back(std::norm(coincidence_amplitude(psi, w)));
      summed_peak = std::max(summed_peak, psi.norm2());
    }
  } else {
    if (fiber_k2z * grid.omega_max() * grid.spacing() >= kPi / 4.0)
      throw ConfigurationError("g2_numeric: grid of " + std::to_string(n) +
                               " samples aliases the dispersion chirp; need n >= " +
                               std::to_string(required_grid_size(fiber_k2z, grid.omega_max())));
    const double dtau = 2.0 * kPi / (static_cast<double>(n) * grid.spacing());
    const double tau_first = (0.5 - static_cast<double>(n / 2)) * dtau;

    // tau_j = tau_first + j dtau, and Omega_k j dtau = 2 pi (k - n/2) j / n, so
    // sum_k a_k e^{-i Omega_k tau_j} = (-1)^j DFT(a_k e^{-i Omega_k tau_first})_j.
    std::array<std::vector<complex>, 4> components;
    for (auto& c : components) c.assign(n, complex{});
    for (std::size_t k = 1; k < n; ++k) {
      const double om = grid.omega(k);
      const complex twiddle = std::polar(1.0, fiber_k2z * om * om - om * tau_first);
      const PairAmplitude psi = state.slice(k);
      components[0][k] = psi.hh * twiddle;
      components[1][k] = psi.hv * twiddle;
      components[2][k] = psi.vh * twiddle;
      components[3][k] = psi.vv * twiddle;
    }
    for (auto& c : components) c = detail::forward_dft(std::move(c));

    const double scale = grid.spacing() / std::sqrt(2.0 * kPi);
    r.tau.resize(n);
    r.g2.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = (j % 2 == 0) ? scale : -scale;
      const PairAmplitude psi{components[0][j] * sign, components[1][j] * sign,
                              components[2][j] * sign, components[3][j] * sign};
      r.tau[j] = tau_first + static_cast<double>(j) * dtau;
      r.g2[j] = std::norm(coincidence_amplitude(psi, w));
      summed_peak = std::max(summed_peak, psi.norm2());
    }
  }

  if (normalization == Normalization::peak_unity) {
    if (!(summed_peak > 0.0)) throw DegenerateInputError("g2_numeric: state has zero amplitude");
    const double inv = 2.0 / summed_peak;
    for (double& g : r.g2) g *= inv;
  }
  return r;
}

std::optional<double> visibility(const CorrelationResult& plus, const CorrelationResult& minus,
                                 double tau) {
  require_same_grid(plus, minus);
  const double gp = plus.value_at(tau);
  const double gm = minus.value_at(tau);
  double peak = 0.0;
  for (double g : plus.g2) peak = std::max(peak, g);
  for (double g : minus.g2) peak = std::max(peak, g);
  const double denom = gp + gm;
  if (!(denom >= 1e-15 * peak) || denom <= 0.0) return std::nullopt;
  return (gp - gm) / denom;
}

std::optional<double> slice_visibility(const PairAmplitude& psi, double basis_angle) {
  const double p = std::norm(project(psi, basis_angle, basis_angle));
  const double m = std::norm(project(psi, basis_angle, basis_angle + kPi / 2.0));
  const double denom = p + m;
  if (!(denom > 1e-15 * psi.norm2()) || denom <= 0.0) return std::nullopt;
  return (p - m) / denom;
}

double analyzer_pass_probability(const BiphotonState& state, const AnalyzerConfig& analyzer) {
  const auto w = analyzer_weights(analyzer);
  double sum = 0.0;
  for (std::size_t k = 1; k < state.grid().size(); ++k)
    sum += std::norm(coincidence_amplitude(state.slice(k), w));
  return sum * state.grid().spacing() / state.norm();
}

PostSelection postselect(const BiphotonState& state, const FiberChannel& fiber,
                         const PostSelectionWindow& window, double basis_angle) {
  const double carried = state.dispersion();
  const double k2z = carried + fiber.k2() * fiber.dispersive_length();
  if (!(k2z > 0.0))
    throw PreconditionError("postselect: no dispersion, so no far-field time mapping");
  if (!(window.half_width > 0.0)) throw PreconditionError("postselect: half_width must be > 0");
  const FrequencyGrid& grid = state.grid();
  const double lo = (window.center - window.half_width) / (2.0 * k2z);
  const double hi = (window.center + window.half_width) / (2.0 * k2z);
  if (lo < -grid.omega_max() || hi > grid.omega_max())
    throw PreconditionError("postselect: window extends beyond the sampled delays");

  PairAmplitude sum;
  double band_weight = 0.0;
  std::size_t samples = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double om = grid.omega(k);
    if (om < lo || om > hi) continue;
    const PairAmplitude psi = state.slice(k);
    band_weight += psi.norm2() * grid.spacing();
    sum = sum + psi * std::polar(1.0, -carried * om * om);
    ++samples;
  }
  if (samples == 0 || !(band_weight >= 1e-12 * state.norm()) || !(sum.norm2() > 0.0))
    throw DegenerateInputError("postselect: window selects no amplitude");

  PostSelection out;
  out.amplitude = sum * (1.0 / std::sqrt(sum.norm2()));
  auto fidelity = [&](Bell which) {
    return std::min(1.0, std::norm(polarization_overlap(out.amplitude, bell_target(which))));
  };
  out.fidelity_psi_plus = fidelity(Bell::psi_plus);
  out.fidelity_psi_minus = fidelity(Bell::psi_minus);
  out.visibility = slice_visibility(out.amplitude, basis_angle);
  out.omega_low = lo;
  out.omega_high = hi;
  out.samples = samples;
  return out;
}

}  // namespace biphoton
