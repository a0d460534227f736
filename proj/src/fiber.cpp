#include "biphoton/fiber.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

// exp(-i a n.sigma)
JonesMatrix su2_step(double nx, double ny, double nz, double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  const complex i(0.0, 1.0);
  return {c - i * s * nz, -i * s * complex(nx, -ny), -i * s * complex(nx, ny), c + i * s * nz};
}

// Projects a near-SU(2) matrix [[a, b], [-b*, a*]] back onto the group using its first row.
JonesMatrix reunitarize(const JonesMatrix& u) {
  const double n = std::sqrt(std::norm(u.hh) + std::norm(u.hv));
  const complex a = u.hh / n;
  const complex b = u.hv / n;
  return {a, b, -std::conj(b), std::conj(a)};
}

}  // namespace

void DriftProcess::validate() const {
  if (!(std::isfinite(correlation_time) && correlation_time > 0.0))
    throw ConfigurationError("drift: correlation_time must be positive");
  if (!(std::isfinite(time_step) && time_step > 0.0))
    throw ConfigurationError("drift: time_step must be positive");
  if (!finite_nonnegative(step_angle_scale))
    throw ConfigurationError("drift: step_angle_scale must be non-negative");
}

FiberChannel::FiberChannel(double k2, double geometric_length, Passes passes,
                           double loss_db_per_km, DriftProcess drift)
    : k2_(k2), length_(geometric_length), passes_(passes), loss_(loss_db_per_km), drift_(drift) {
  if (!finite_nonnegative(k2_)) throw ConfigurationError("fiber: k2 must be finite and >= 0");
  if (!(std::isfinite(length_) && length_ > 0.0))
    throw ConfigurationError("fiber: length must be positive");
  if (!finite_nonnegative(loss_)) throw ConfigurationError("fiber: loss must be >= 0");
  drift_.validate();
}

double tau_f(double k2, double z, double tau0) {
  if (!(tau0 > 0.0) || !std::isfinite(tau0))
    throw ConfigurationError("tau_f: tau0 must be positive");
  return 2.0 * k2 * z / tau0;
}

double tau_f(const FiberChannel& fiber, const CrystalParams& crystal) {
  return tau_f(fiber.k2(), fiber.dispersive_length(), crystal.tau0());
}

std::size_t required_grid_size(double k2z, double omega_max) {
  // k2z * omega_max * omega_max / (n/2 - 1) < pi/4
  const double min_half_span = 4.0 * k2z * omega_max * omega_max / std::numbers::pi;
  std::size_t n = 256;
  while (static_cast<double>(n / 2 - 1) <= min_half_span && n < (std::size_t{1} << 62)) n *= 2;
  return n;
}

BiphotonState apply_gvd(const BiphotonState& state, double k2z) {
  const FrequencyGrid& grid = state.grid();
  if (!finite_nonnegative(k2z)) throw ConfigurationError("gvd: k2 z must be finite and >= 0");
  if (k2z * grid.omega_max() * grid.spacing() >= std::numbers::pi / 4.0)
    throw ConfigurationError("gvd: grid of " + std::to_string(grid.size()) +
                             " samples aliases the dispersion chirp; need n >= " +
                             std::to_string(required_grid_size(k2z, grid.omega_max())));
  BiphotonState out = state;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    out.set_slice(k, state.slice(k) * std::polar(1.0, k2z * w * w));
  }
  out.add_dispersion(k2z);
  return out;
}

BiphotonState apply_gvd(const BiphotonState& state, const FiberChannel& fiber) {
  return apply_gvd(state, fiber.k2() * fiber.dispersive_length());
}

DriftTrajectory::DriftTrajectory(const DriftProcess& process, double horizon)
    : process_(process), horizon_(horizon) {
  process_.validate();
  if (!finite_nonnegative(horizon)) throw ConfigurationError("drift: horizon must be >= 0");

  const auto whole = static_cast<std::size_t>(std::floor(horizon / process_.time_step));
  const double angle_rms =
      process_.step_angle_scale * std::sqrt(process_.time_step / process_.correlation_time);

  std::mt19937_64 rng(process_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // One extra step so a trailing partial step has its draws.
  steps_.reserve(whole + 1);
  for (std::size_t k = 0; k <= whole; ++k) {
    double nx = 0.0, ny = 0.0, nz = 0.0, r2 = 0.0;
    while (r2 < 1e-24) {
      nx = normal(rng);
      ny = normal(rng);
      nz = normal(rng);
      r2 = nx * nx + ny * ny + nz * nz;
    }
    const double r = std::sqrt(r2);
    steps_.push_back({nx / r, ny / r, nz / r, angle_rms * normal(rng)});
  }

  knots_.reserve(whole + 1);
  knots_.push_back(JonesMatrix::identity());
  for (std::size_t k = 0; k < whole; ++k) {
    const Step& s = steps_[k];
    knots_.push_back(reunitarize(su2_step(s.nx, s.ny, s.nz, s.angle) * knots_.back()));
  }
}

JonesMatrix DriftTrajectory::at(double t) const {
  if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12))
    throw std::out_of_range("drift: time outside the precomputed trajectory");
  const double steps = t / process_.time_step;
  auto k = static_cast<std::size_t>(std::floor(steps));
  if (k >= knots_.size()) k = knots_.size() - 1;
  const double frac = steps - static_cast<double>(k);
  if (frac <= 0.0) return knots_[k];
  // Partial step: same axis, angle scaled for Brownian time.
  const Step& s = steps_[k];
  return reunitarize(su2_step(s.nx, s.ny, s.nz, s.angle * std::sqrt(frac)) * knots_[k]);
}

JonesMatrix drift_sample(const DriftProcess& process, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("drift_sample: t must be >= 0");
  return DriftTrajectory(process, t).at(t);
}

JonesMatrix channel_operator(const FiberChannel& fiber, const DriftTrajectory& drift, double t) {
  const JonesMatrix u = drift.at(t);
  return fiber.passes() == Passes::go_and_return ? round_trip(u) : u;
}

JonesMatrix channel_operator(const FiberChannel& fiber, double t) {
  return channel_operator(fiber, DriftTrajectory(fiber.drift(), t), t);
}

double transmittance(const FiberChannel& fiber) {
  return std::pow(10.0, -fiber.loss_db_per_km() * (fiber.dispersive_length() / 1000.0) / 10.0);
}

}  // namespace biphoton
