#include "biphoton/biphoton_state.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

CrystalParams::CrystalParams(double pump_wavelength, double inverse_group_velocity_difference,
                             double length)
    : pump_wavelength_(pump_wavelength), D_(inverse_group_velocity_difference), length_(length) {
  if (!positive_finite(pump_wavelength_))
    throw ConfigurationError("crystal: pump wavelength must be positive");
  if (!positive_finite(D_))
    throw ConfigurationError("crystal: inverse group-velocity difference must be positive");
  if (!positive_finite(length_)) throw ConfigurationError("crystal: length must be positive");
  if (!positive_finite(tau0())) throw ConfigurationError("crystal: tau0 = D L / 2 must be positive");
}

double CrystalParams::degenerate_angular_frequency() const {
  return std::numbers::pi * kSpeedOfLight / pump_wavelength_;
}

FrequencyGrid::FrequencyGrid(std::size_t n, double omega_max) : n_(n), omega_max_(omega_max) {
  if (n < 256 || !std::has_single_bit(n))
    throw ConfigurationError("grid: size must be a power of two >= 256, got " + std::to_string(n));
  if (!positive_finite(omega_max)) throw ConfigurationError("grid: omega_max must be positive");
  spacing_ = omega_max / static_cast<double>(n / 2 - 1);
}

complex& PairAmplitude::at(Pol a, Pol b) {
  if (a == Pol::H) return b == Pol::H ? hh : hv;
  return b == Pol::H ? vh : vv;
}

complex PairAmplitude::at(Pol a, Pol b) const {
  if (a == Pol::H) return b == Pol::H ? hh : hv;
  return b == Pol::H ? vh : vv;
}

double PairAmplitude::norm2() const {
  return std::norm(hh) + std::norm(hv) + std::norm(vh) + std::norm(vv);
}

PairAmplitude PairAmplitude::operator+(const PairAmplitude& o) const {
  return {hh + o.hh, hv + o.hv, vh + o.vh, vv + o.vv};
}

PairAmplitude PairAmplitude::operator*(complex s) const { return {hh * s, hv * s, vh * s, vv * s}; }

PairAmplitude transform(const PairAmplitude& psi, const JonesMatrix& u) {
  // Psi as a matrix M[s1][s2]; both photons see u: M' = u M u^T.
  const JonesMatrix m{psi.hh, psi.hv, psi.vh, psi.vv};
  const JonesMatrix r = u * m * u.transpose();
  return {r.hh, r.hv, r.vh, r.vv};
}

complex project(const PairAmplitude& psi, double theta1, double theta2) {
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  return c1 * c2 * psi.hh + c1 * s2 * psi.hv + s1 * c2 * psi.vh + s1 * s2 * psi.vv;
}

BellTarget bell_target(Bell which) {
  const double r = std::numbers::sqrt2 / 2.0;
  const double sign = which == Bell::psi_plus ? 1.0 : -1.0;
  return {which, PairAmplitude{0.0, r, sign * r, 0.0}, std::nullopt};
}

BellTarget bell_target(Bell which, const CrystalParams& crystal) {
  BellTarget t = bell_target(which);
  if (which == Bell::psi_minus) {
    const double w0 = crystal.degenerate_angular_frequency();
    const double shift = std::numbers::pi / (2.0 * crystal.tau0());
    t.mode_frequencies = std::pair{w0 + shift, w0 - shift};
  }
  return t;
}

complex polarization_overlap(const PairAmplitude& slice, const BellTarget& target) {
  const double n2 = slice.norm2();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw DegenerateInputError("polarization_overlap: zero-norm amplitude");
  const PairAmplitude& t = target.amplitude;
  const complex ip = std::conj(t.hh) * slice.hh + std::conj(t.hv) * slice.hv +
                     std::conj(t.vh) * slice.vh + std::conj(t.vv) * slice.vv;
  return ip / std::sqrt(n2);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

BiphotonState::BiphotonState(FrequencyGrid grid, CrystalParams crystal)
    : grid_(grid), crystal_(crystal), amp_(4 * grid.size()) {}

void BiphotonState::set_amplitude(Pol a, Pol b, std::size_t k, complex value) {
  if (k == 0) return;  // padding slot
  amp_[index(a, b, k)] = value;
}

PairAmplitude BiphotonState::slice(std::size_t k) const {
  return {amplitude(Pol::H, Pol::H, k), amplitude(Pol::H, Pol::V, k),
          amplitude(Pol::V, Pol::H, k), amplitude(Pol::V, Pol::V, k)};
}

void BiphotonState::set_slice(std::size_t k, const PairAmplitude& psi) {
  set_amplitude(Pol::H, Pol::H, k, psi.hh);
  set_amplitude(Pol::H, Pol::V, k, psi.hv);
  set_amplitude(Pol::V, Pol::H, k, psi.vh);
  set_amplitude(Pol::V, Pol::V, k, psi.vv);
}

double BiphotonState::norm() const {
  double sum = 0.0;
  for (const complex& z : amp_) sum += std::norm(z);
  return sum * grid_.spacing();
}

BiphotonState BiphotonState::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateInputError("state has zero norm");
  BiphotonState out = *this;
  const double scale = 1.0 / std::sqrt(n);
  for (complex& z : out.amp_) z *= scale;
  return out;
}

BiphotonState pdc_state(const CrystalParams& crystal, const FrequencyGrid& grid,
                        const SpectralAmplitude& spectrum) {
  const double tau0 = crystal.tau0();
  if (grid.omega_max() * tau0 < std::numbers::pi)
    throw ConfigurationError(
        "grid: omega_max * tau0 must be >= pi to hold the main spectral lobe, got " +
        std::to_string(grid.omega_max() * tau0));
  BiphotonState state(grid, crystal);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    const complex f = spectrum ? spectrum(w) : complex(sinc(w * tau0));
    const complex phase = std::polar(1.0, w * tau0);
    state.set_amplitude(Pol::H, Pol::V, k, f * phase);
    state.set_amplitude(Pol::V, Pol::H, k, f * std::conj(phase));
  }
  return state.normalized();
}

BiphotonState apply_local(const BiphotonState& state, const JonesMatrix& u) {
  BiphotonState out = state;
  for (std::size_t k = 1; k < state.grid().size(); ++k)
    out.set_slice(k, transform(state.slice(k), u));
  return out;
}

}  // namespace biphoton
