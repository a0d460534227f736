#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/fiber.hpp"

using namespace biphoton;
using std::numbers::pi;

namespace {

CrystalParams crystal() { return {351e-9, 2.0e-10, 0.5e-3}; }  // tau0 = 5e-14 s

BiphotonState small_state(std::size_t n = 1024) {
  return pdc_state(crystal(), FrequencyGrid(n, 4.0 * pi / crystal().tau0()));
}

double max_component_diff(const BiphotonState& a, const BiphotonState& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    const PairAmplitude x = a.slice(k), y = b.slice(k);
    d = std::max({d, std::abs(x.hh - y.hh), std::abs(x.hv - y.hv), std::abs(x.vh - y.vh),
                  std::abs(x.vv - y.vv)});
  }
  return d;
}

}  // namespace

TEST_CASE("tau_f") {
  const FiberChannel fiber(3.6e-26, 240.0, Passes::go_and_return);
  CHECK(fiber.dispersive_length() == 480.0);
  CHECK(tau_f(fiber, crystal()) == doctest::Approx(6.912e-10).epsilon(1e-12));
  CHECK(tau_f(3.6e-26, 480.0, 5e-14) == doctest::Approx(6.912e-10).epsilon(1e-12));
  CHECK(tau_f(7.2e-26, 480.0, 5e-14) == doctest::Approx(2.0 * 6.912e-10).epsilon(1e-12));
  for (double c : {0.1, 3.0, 17.0})
    CHECK(tau_f(c * 3.6e-26, 480.0 / c, 5e-14) == doctest::Approx(6.912e-10).epsilon(1e-12));
  CHECK_THROWS_AS(tau_f(3.6e-26, 480.0, 0.0), ConfigurationError);

  const FiberChannel single(3.6e-26, 240.0, Passes::single);
  CHECK(single.dispersive_length() == 240.0);
}

TEST_CASE("fiber channel validation") {
  CHECK_THROWS_AS(FiberChannel(-1e-26, 240.0, Passes::single), ConfigurationError);
  CHECK_THROWS_AS(FiberChannel(1e-26, 0.0, Passes::single), ConfigurationError);
  CHECK_THROWS_AS(FiberChannel(1e-26, 10.0, Passes::single, -1.0), ConfigurationError);
  DriftProcess bad;
  bad.correlation_time = 0.0;
  CHECK_THROWS_AS(FiberChannel(1e-26, 10.0, Passes::single, 0.0, bad), ConfigurationError);
}

TEST_CASE("transmittance") {
  CHECK(transmittance(FiberChannel(3.6e-26, 240.0, Passes::go_and_return, 0.0)) == 1.0);
  CHECK(transmittance(FiberChannel(3.6e-26, 240.0, Passes::go_and_return, 12.0)) ==
        doctest::Approx(0.265460556197554).epsilon(1e-12));
  CHECK(transmittance(FiberChannel(3.6e-26, 1000.0, Passes::single, 12.0)) ==
        doctest::Approx(0.06309573444801933).epsilon(1e-12));
}

TEST_CASE("apply_gvd") {
  const BiphotonState s = small_state(4096);
  const double tau0 = crystal().tau0();

  CHECK(max_component_diff(apply_gvd(s, 0.0), s) == 0.0);

  const double k2z = 2.0 * tau0 * tau0;
  const BiphotonState once = apply_gvd(s, k2z);
  CHECK(once.dispersion() == k2z);
  CHECK(std::abs(once.norm() - s.norm()) < 1e-10);
  for (std::size_t k = 0; k < s.grid().size(); ++k)
    CHECK(std::abs(std::abs(once.amplitude(Pol::H, Pol::V, k)) - std::abs(s.amplitude(Pol::H, Pol::V, k))) <
          1e-15);

  const BiphotonState twice = apply_gvd(apply_gvd(s, k2z), k2z);
  const BiphotonState doubled = apply_gvd(s, 2.0 * k2z);
  CHECK(max_component_diff(twice, doubled) < 1e-10);
  CHECK(twice.dispersion() == doctest::Approx(doubled.dispersion()));

  // Through a FiberChannel the dispersive length counts both passes.
  const FiberChannel fiber(k2z / 480.0, 240.0, Passes::go_and_return);
  CHECK(max_component_diff(apply_gvd(s, fiber), once) < 1e-12);
}

TEST_CASE("apply_gvd rejects an aliased chirp and names the size needed") {
  const BiphotonState s = small_state(256);
  const double tau0 = crystal().tau0();
  const double k2z = 50.0 * tau0 * tau0;
  const std::size_t need = required_grid_size(k2z, s.grid().omega_max());
  try {
    (void)apply_gvd(s, k2z);
    FAIL("expected ConfigurationError");
  } catch (const ConfigurationError& e) {
    CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
  }
  const FrequencyGrid ok(need, s.grid().omega_max());
  CHECK(k2z * ok.omega_max() * ok.spacing() < pi / 4);
  const FrequencyGrid too_small(need / 2, s.grid().omega_max());
  CHECK(k2z * too_small.omega_max() * too_small.spacing() >= pi / 4);
  CHECK_NOTHROW(apply_gvd(pdc_state(crystal(), ok), k2z));
}

TEST_CASE("drift process") {
  DriftProcess p;
  p.seed = 42;
  CHECK(max_abs_diff(drift_sample(p, 0.0), JonesMatrix::identity()) == 0.0);
  const JonesMatrix a = drift_sample(p, 1234.5);
  const JonesMatrix b = drift_sample(p, 1234.5);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(a.is_unitary(1e-12));
  CHECK(std::abs(a.det() - 1.0) < 1e-12);

  // A trajectory built for a longer horizon passes through the same points.
  const DriftTrajectory traj(p, 5000.0);
  for (double t : {0.0, 1.0, 17.25, 1234.5, 4999.9}) CHECK(max_abs_diff(traj.at(t), drift_sample(p, t)) < 1e-15);
  CHECK_THROWS_AS(traj.at(5001.0), std::out_of_range);

  // Continuous through a step boundary.
  CHECK(max_abs_diff(traj.at(100.0 - 1e-9), traj.at(100.0)) < 1e-6);

  DriftProcess other = p;
  other.seed = 43;
  CHECK(max_abs_diff(drift_sample(other, 1234.5), a) > 1e-3);
}

TEST_CASE("drift decorrelates over one correlation time") {
  // Calibration of step_angle_scale = 1: mean trace distance over 1000 seeds exceeds 0.5.
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    DriftProcess p;
    p.seed = seed;
    const DriftTrajectory traj(p, 600.0 + p.correlation_time);
    sum += trace_distance(traj.at(600.0), traj.at(600.0 + p.correlation_time));
  }
  const double mean = sum / 1000.0;
  MESSAGE("mean trace distance after one correlation time: " << mean);
  CHECK(mean > 0.5);
}

TEST_CASE("channel operator") {
  DriftProcess p;
  p.seed = 7;
  const FiberChannel round(3.6e-26, 240.0, Passes::go_and_return, 12.0, p);
  const FiberChannel single(3.6e-26, 240.0, Passes::single, 12.0, p);
  const DriftTrajectory traj(p, 7200.0);

  CHECK(max_abs_diff(channel_operator(single, 0.0), JonesMatrix::identity()) == 0.0);
  double worst = 0.0;
  for (double t = 0.0; t <= 7200.0; t += 60.0) {
    const JonesMatrix u = traj.at(t);
    const JonesMatrix r = channel_operator(round, traj, t);
    CHECK(max_abs_diff(r, faraday_mirror() * u.det()) < 1e-10);
    worst = std::max(worst, phase_fitted_distance(r, faraday_mirror()));
    CHECK(channel_operator(single, traj, t).is_unitary(1e-10));
  }
  CHECK(worst < 1e-9);
  CHECK(max_abs_diff(channel_operator(round, 300.0), channel_operator(round, traj, 300.0)) < 1e-15);
}

TEST_CASE("single pass drift is generically non-diagonal") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    DriftProcess p;
    p.seed = seed;
    const FiberChannel single(3.6e-26, 240.0, Passes::single, 0.0, p);
    const JonesMatrix u = channel_operator(single, 3600.0);
    if (std::max(std::abs(u.hv), std::abs(u.vh)) > 0.1) ++hits;
  }
  CHECK(hits > 180);
}
