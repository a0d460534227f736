#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "biphoton/correlation.hpp"
#include "biphoton/errors.hpp"
#include "oracles.hpp"

using namespace biphoton;
using std::numbers::pi;

namespace {

CrystalParams crystal() { return {351e-9, 2.0e-10, 0.5e-3}; }  // tau0 = 5e-14 s
double tau0() { return crystal().tau0(); }

BiphotonState state(std::size_t n = 4096, double span = 8.0 * pi) {
  return pdc_state(crystal(), FrequencyGrid(n, span / tau0()));
}

// Fiber giving tau_f = ratio * tau0.
FiberChannel fiber_for(double ratio, Passes passes = Passes::single) {
  const double k2z = 0.5 * ratio * tau0() * tau0();
  const double length = 100.0;
  return FiberChannel(k2z / (passes == Passes::go_and_return ? 2.0 * length : length), length, passes);
}

// Plate-free closed forms written out literally, t != 0.
double literal_plus(double t) { return std::pow(std::sin(t), 2) * std::pow(std::cos(t), 2) / (t * t); }
double literal_minus(double t) { return std::pow(std::sin(t), 4) / (t * t); }

const RetarderSpec kNoPlate(0.0, 0.0);

}  // namespace

TEST_CASE("closed form limits") {
  const double tf = 1e-9;
  CHECK(g2_analytic(0.0, tf, kNoPlate, G2Branch::plus) == 1.0);
  CHECK(g2_analytic(0.0, tf, kNoPlate, G2Branch::minus) == 0.0);
  CHECK(std::abs(g2_analytic(pi / 2 * tf, tf, kNoPlate, G2Branch::plus)) < 1e-12);
  CHECK(std::abs(g2_analytic(pi / 2 * tf, tf, kNoPlate, G2Branch::minus) - 4.0 / (pi * pi)) < 1e-12);

  const RetarderSpec hwp(pi / 2, pi / 16);
  CHECK(std::abs(g2_analytic(0.0, tf, hwp, G2Branch::plus) - g2_analytic(0.0, tf, hwp, G2Branch::minus)) <
        1e-15);
  CHECK_THROWS_AS(g2_analytic(0.0, 0.0, kNoPlate, G2Branch::plus), ConfigurationError);
  CHECK_THROWS_AS(g2_analytic(0.0, -1.0, kNoPlate, G2Branch::minus), ConfigurationError);
}

TEST_CASE("closed form reduces to the plate-free shapes and stays bounded") {
  for (int i = -2000; i <= 2000; ++i) {
    if (i == 0) continue;
    const double t = i * 0.005;
    CHECK(std::abs(g2_analytic(t, 1.0, kNoPlate, G2Branch::plus) - literal_plus(t)) < 1e-12);
    CHECK(std::abs(g2_analytic(t, 1.0, kNoPlate, G2Branch::minus) - literal_minus(t)) < 1e-12);
    CHECK(g2_analytic(t, 1.0, kNoPlate, G2Branch::plus) <= 1.0);
  }
  // Series limit is continuous with the direct formula.
  CHECK(g2_analytic(1e-6, 1.0, kNoPlate, G2Branch::plus) == doctest::Approx(literal_plus(1e-6)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, pi), delay(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const RetarderSpec plate(angle(rng), angle(rng));
    const double t = delay(rng);
    const double gp = g2_analytic(t, 1.0, plate, G2Branch::plus);
    const double gm = g2_analytic(t, 1.0, plate, G2Branch::minus);
    CHECK(gp >= 0.0);
    CHECK(gm >= 0.0);
    // Bracket values at t -> 0 are the two coefficients.
    const double bp = g2_analytic(0.0, 1.0, plate, G2Branch::plus);
    const double bm = g2_analytic(0.0, 1.0, plate, G2Branch::minus);
    CHECK(bp >= 0.0);
    CHECK(bp <= 2.0);
    CHECK(bm >= 0.0);
    CHECK(bm <= 2.0);
  }
}

TEST_CASE("far field numeric curve matches the closed form") {
  const BiphotonState s = state();
  const FiberChannel fiber = fiber_for(200.0);
  const double tf = tau_f(fiber, crystal());
  const auto plus = g2_numeric(s, fiber, AnalyzerConfig::plus45_plus45(), FourierMode::far_field);
  const auto minus = g2_numeric(s, fiber, AnalyzerConfig::plus45_minus45(), FourierMode::far_field);
  REQUIRE(plus.tau.size() == s.grid().size() - 1);
  CHECK(plus.tau[plus.tau.size() / 2] == 0.0);
  CHECK(plus.tau.front() == -plus.tau.back());
  double worst = 0.0;
  for (std::size_t i = 0; i < plus.tau.size(); ++i) {
    worst = std::max(worst, std::abs(plus.g2[i] - g2_analytic(plus.tau[i], tf, kNoPlate, G2Branch::plus)));
    worst = std::max(worst, std::abs(minus.g2[i] - g2_analytic(minus.tau[i], tf, kNoPlate, G2Branch::minus)));
    CHECK(plus.g2[i] >= 0.0);
  }
  CHECK(worst < 1e-9);
  CHECK(*visibility(plus, minus, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("far field numeric curve matches brute-force contraction with a plate") {
  const BiphotonState s = state(512, 4.0 * pi);
  const FiberChannel fiber = fiber_for(100.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.0, pi);
  for (int trial = 0; trial < 5; ++trial) {
    const RetarderSpec plate(angle(rng), angle(rng));
    const AnalyzerConfig an{angle(rng), angle(rng)};
    const auto curve = g2_numeric(apply_local(s, retarder(plate)), fiber, an, FourierMode::far_field,
                                  Normalization::raw);
    const auto u = oracle::to_mat(retarder(plate));
    for (std::size_t k = 1; k < s.grid().size(); k += 13) {
      const PairAmplitude p = s.slice(k);
      const auto rotated = oracle::contract_pair(u, {{{p.hh, p.hv}, {p.vh, p.vv}}});
      const double e1[2] = {std::cos(an.theta1), std::sin(an.theta1)};
      const double e2[2] = {std::cos(an.theta2), std::sin(an.theta2)};
      oracle::cd a{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a += e1[i] * e2[j] * rotated[i][j];
      CHECK(std::abs(curve.g2[k - 1] - std::norm(a)) < 1e-12 * std::max(1.0, std::norm(a)));
    }
  }
}

TEST_CASE("exact fourier agrees with a direct O(n^2) transform") {
  const BiphotonState s = state(256, 2.0 * pi);
  const FiberChannel fiber = fiber_for(2.0);
  const double k2z = fiber.k2() * fiber.dispersive_length();
  const AnalyzerConfig an = AnalyzerConfig::plus45_plus45();
  const auto curve = g2_numeric(s, fiber, an, FourierMode::exact_fourier, Normalization::raw);
  const FrequencyGrid& g = s.grid();
  REQUIRE(curve.tau.size() == g.size());
  CHECK(curve.tau.front() == doctest::Approx(-curve.tau.back()).epsilon(1e-14));
  const double peak = *std::max_element(curve.g2.begin(), curve.g2.end());
  for (std::size_t j = 0; j < g.size(); j += 5) {
    oracle::cd sum{};
    for (std::size_t k = 1; k < g.size(); ++k) {
      const double w = g.omega(k);
      sum += project(s.slice(k), an.theta1, an.theta2) * std::polar(1.0, k2z * w * w - w * curve.tau[j]);
    }
    const double expected = std::norm(sum * g.spacing() / std::sqrt(2.0 * pi));
    CHECK(std::abs(curve.g2[j] - expected) < 1e-10 * peak);
  }
}

TEST_CASE("exact fourier converges to the far field") {
  // tau_f = 60 tau0, several tens of source coherence times.
  const BiphotonState s = state(1 << 16, 8.0 * pi);
  const FiberChannel fiber = fiber_for(60.0);
  for (const AnalyzerConfig& an : {AnalyzerConfig::plus45_plus45(), AnalyzerConfig::plus45_minus45()}) {
    const auto far = g2_numeric(s, fiber, an, FourierMode::far_field);
    const auto exact = g2_numeric(s, fiber, an, FourierMode::exact_fourier);
    double worst = 0.0;
    for (std::size_t j = 0; j < exact.tau.size(); ++j) {
      if (exact.tau[j] < far.tau.front() || exact.tau[j] > far.tau.back()) continue;
      worst = std::max(worst, std::abs(exact.g2[j] - far.value_at(exact.tau[j])));
    }
    MESSAGE("L-inf exact vs far field: " << worst);
    CHECK(worst < 0.01);
  }
}

TEST_CASE("without fiber the H/V coincidences sit inside the crystal delay window") {
  const BiphotonState s = state(4096, 8.0 * pi);
  const FiberChannel no_fiber(0.0, 1.0, Passes::single);
  const AnalyzerConfig hv{0.0, pi / 2};
  const auto curve = g2_numeric(s, no_fiber, hv, FourierMode::exact_fourier, Normalization::raw);
  const double dt = curve.tau[1] - curve.tau[0];
  double inside = 0.0, total = 0.0;
  for (std::size_t j = 0; j < curve.tau.size(); ++j) {
    total += curve.g2[j];
    if (std::abs(curve.tau[j]) <= 2.0 * tau0() + dt) inside += curve.g2[j];
  }
  MESSAGE("fraction inside |tau| <= 2 tau0: " << inside / total);
  CHECK(inside / total > 0.98);

  // Quadrature oracle of the continuous transform of the sampled spectrum.
  const double norm = std::abs(s.amplitude(Pol::H, Pol::V, s.grid().center()));
  const double wmax = s.grid().omega_max();
  for (std::size_t j = curve.tau.size() / 2 - 40; j < curve.tau.size() / 2 + 40; j += 9) {
    const double t = curve.tau[j];
    const auto f = [&](double w) {
      return oracle::cd(norm * sinc(w * tau0())) * std::polar(1.0, w * tau0() - w * t);
    };
    const oracle::cd a = oracle::simpson(f, -wmax, wmax, 20000) / std::sqrt(2.0 * pi);
    CHECK(std::abs(curve.g2[j] - std::norm(a)) < 1e-3 * curve.g2[curve.tau.size() / 2] + 1e-6 * std::norm(a));
  }
}

TEST_CASE("exact fourier conserves probability over a complete analyzer basis") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(0.0, pi);
  const BiphotonState base = state(2048, 6.0 * pi);
  const FiberChannel fiber = fiber_for(4.0);
  for (int trial = 0; trial < 4; ++trial) {
    const BiphotonState s = apply_local(base, retarder({angle(rng), angle(rng)}));
    const double th = angle(rng);
    double total = 0.0;
    for (double a : {th, th + pi / 2})
      for (double b : {th, th + pi / 2}) {
        const auto c = g2_numeric(s, fiber, {a, b}, FourierMode::exact_fourier, Normalization::raw);
        const double dt = c.tau[1] - c.tau[0];
        for (double g : c.g2) total += g * dt;
      }
    CHECK(std::abs(total - s.norm()) < 1e-9);
  }
}

TEST_CASE("half-wave plate visibility law") {
  const BiphotonState s = state(512, 4.0 * pi);
  const FiberChannel fiber = fiber_for(100.0);
  for (int i = 0; i < 64; ++i) {
    const double alpha = i * (pi / 2) / 63.0;
    const RetarderSpec hwp(pi / 2, alpha);
    const auto prepared = apply_local(s, retarder(hwp));
    const auto plus = g2_numeric(prepared, fiber, AnalyzerConfig::plus45_plus45(), FourierMode::far_field);
    const auto minus = g2_numeric(prepared, fiber, AnalyzerConfig::plus45_minus45(), FourierMode::far_field);
    const auto v = visibility(plus, minus, 0.0);
    REQUIRE(v.has_value());
    CHECK(std::abs(*v - std::cos(8.0 * alpha)) < 1e-9);

    const double gp = g2_analytic(0.0, 1.0, hwp, G2Branch::plus);
    const double gm = g2_analytic(0.0, 1.0, hwp, G2Branch::minus);
    CHECK(std::abs((gp - gm) / (gp + gm) - std::cos(8.0 * alpha)) < 1e-9);
  }
  // 22.5 degrees: the parallel curve vanishes identically.
  const auto erased = apply_local(s, retarder({pi / 2, pi / 8}));
  const auto plus = g2_numeric(erased, fiber, AnalyzerConfig::plus45_plus45(), FourierMode::far_field);
  const auto minus = g2_numeric(erased, fiber, AnalyzerConfig::plus45_minus45(), FourierMode::far_field);
  for (double g : plus.g2) CHECK(g < 1e-28);
  CHECK(*visibility(plus, minus, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("visibility errors and undefined marker") {
  CorrelationResult a{{-1.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {}, Normalization::peak_unity};
  CorrelationResult b{{-1.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {}, Normalization::peak_unity};
  CHECK_FALSE(visibility(a, b, 0.0).has_value());
  CHECK(*visibility(a, b, 1.0) == 0.0);
  CHECK(*visibility(a, b, 0.5) == 0.0);
  CorrelationResult c{{-2.0, 0.0, 2.0}, {0.0, 0.0, 1.0}, {}, Normalization::peak_unity};
  CHECK_THROWS_AS(visibility(a, c, 0.0), std::invalid_argument);
  CorrelationResult d = b;
  d.normalization = Normalization::raw;
  CHECK_THROWS_AS(visibility(a, d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(a.value_at(3.0), std::out_of_range);
}

TEST_CASE("analyzer pass probabilities over a complete basis sum to one") {
  const BiphotonState s = apply_local(state(1024, 4.0 * pi), retarder({0.4, 1.1}));
  const double th = 0.3;
  double total = 0.0;
  for (double a : {th, th + pi / 2})
    for (double b : {th, th + pi / 2}) total += analyzer_pass_probability(s, {a, b});
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("temporal post-selection") {
  const BiphotonState s = state(4096, 8.0 * pi);
  const FiberChannel fiber = fiber_for(400.0);
  const double tf = tau_f(fiber, crystal());

  const PostSelection zero = postselect(s, fiber, {0.0, tf / 50});
  CHECK(zero.fidelity_psi_plus >= 0.999);
  CHECK(zero.samples >= 1);
  CHECK(*zero.visibility == doctest::Approx(1.0));

  const PostSelection singlet = postselect(s, fiber, {pi * tf / 2, tf / 50});
  CHECK(singlet.fidelity_psi_minus >= 0.999);
  CHECK(singlet.omega_low < pi / (2 * tau0()));
  CHECK(singlet.omega_high > pi / (2 * tau0()));

  // Dispersion already carried by the state is equivalent to the fiber's.
  const BiphotonState coarse = state(1024, 2.0 * pi);
  const double tf4 = tau_f(fiber_for(4.0), crystal());
  const PostSelection whole = postselect(coarse, fiber_for(4.0), {pi * tf4 / 2, tf4 / 20});
  const PostSelection split = postselect(apply_gvd(coarse, fiber_for(2.0)), fiber_for(2.0), {pi * tf4 / 2, tf4 / 20});
  CHECK(split.samples == whole.samples);
  CHECK(std::abs(split.fidelity_psi_minus - whole.fidelity_psi_minus) < 1e-9);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, pi);
  for (int i = 0; i < 100; ++i) {
    const auto rotated = apply_local(s, retarder({angle(rng), angle(rng)}));
    const PostSelection p = postselect(rotated, fiber, {pi * tf / 2, tf / 50});
    CHECK(std::abs(p.fidelity_psi_minus - singlet.fidelity_psi_minus) < 1e-9);
  }
}

TEST_CASE("post-selection error paths") {
  const BiphotonState s = state(1024, 4.0 * pi);
  const FiberChannel fiber = fiber_for(100.0);
  const double tf = tau_f(fiber, crystal());
  const FiberChannel flat(0.0, 1.0, Passes::single);
  CHECK_THROWS_AS(postselect(s, flat, {0.0, 1e-12}), PreconditionError);
  CHECK_THROWS_AS(postselect(s, fiber, {100.0 * tf, tf / 50}), PreconditionError);
  CHECK_THROWS_AS(postselect(s, fiber, {0.0, 0.0}), PreconditionError);
  // Narrower than one grid step and off-grid: nothing selected.
  const double step = 2.0 * fiber.k2() * fiber.dispersive_length() * s.grid().spacing();
  CHECK_THROWS_AS(postselect(s, fiber, {0.5 * step, 0.01 * step}), DegenerateInputError);
}
