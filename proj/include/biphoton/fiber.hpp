#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "biphoton/biphoton_state.hpp"
#include "biphoton/jones.hpp"

namespace biphoton {

enum class Passes { single, go_and_return };

// Unitary random walk modelling slow birefringence drift of an unisolated fiber.
// Each step of length time_step left-multiplies exp(-i a n.sigma) with n a uniformly random
// axis and a ~ step_angle_scale * sqrt(time_step / correlation_time) * N(0, 1).
struct DriftProcess {
  double correlation_time = 360.0;  // s
  double step_angle_scale = 1.0;    // rad
  double time_step = 1.0;           // s
  std::uint64_t seed = 0;

  // Throws ConfigurationError on non-positive times or a negative/non-finite scale.
  void validate() const;
};

class FiberChannel {
 public:
  // k2 [s^2/m] >= 0, geometric_length [m] > 0, loss [dB/km] >= 0.
  FiberChannel(double k2, double geometric_length, Passes passes, double loss_db_per_km = 0.0,
               DriftProcess drift = {});

  double k2() const { return k2_; }
  double geometric_length() const { return length_; }
  Passes passes() const { return passes_; }
  // Length over which dispersion accumulates: twice the fiber for go-and-return.
  double dispersive_length() const { return passes_ == Passes::go_and_return ? 2.0 * length_ : length_; }
  double loss_db_per_km() const { return loss_; }
  const DriftProcess& drift() const { return drift_; }

 private:
  double k2_;
  double length_;
  Passes passes_;
  double loss_;
  DriftProcess drift_;
};

// Width of the dispersed correlation function, 2 k2 z / tau0.
double tau_f(double k2, double z, double tau0);
double tau_f(const FiberChannel& fiber, const CrystalParams& crystal);

// Smallest grid size (power of two >= 256) resolving the chirp k2z Omega^2 up to omega_max.
std::size_t required_grid_size(double k2z, double omega_max);

// Multiplies every component by e^{i k2z Omega^2}. Throws ConfigurationError when the
// grid under-samples the chirp (k2z * omega_max * spacing >= pi / 4).
BiphotonState apply_gvd(const BiphotonState& state, double k2z);
BiphotonState apply_gvd(const BiphotonState& state, const FiberChannel& fiber);

// Frozen drift trajectory on [0, horizon]. Immutable once built.
class DriftTrajectory {
 public:
  DriftTrajectory(const DriftProcess& process, double horizon);

  // Fiber operator at time t in [0, horizon]; t = 0 is the identity.
  JonesMatrix at(double t) const;
  double horizon() const { return horizon_; }

 private:
  struct Step {
    double nx, ny, nz, angle;
  };

  DriftProcess process_;
  double horizon_;
  std::vector<JonesMatrix> knots_;  // operator after each whole step
  std::vector<Step> steps_;         // random draws of each step
};

// Fiber operator at time t, walking the seeded trajectory from the identity.
JonesMatrix drift_sample(const DriftProcess& process, double t);

// Single pass: the drift operator. Go-and-return: round_trip of it, i.e. det * faraday_mirror.
JonesMatrix channel_operator(const FiberChannel& fiber, double t);
JonesMatrix channel_operator(const FiberChannel& fiber, const DriftTrajectory& drift, double t);

// Power transmission over the dispersive length.
double transmittance(const FiberChannel& fiber);

}  // namespace biphoton
