#include "biphoton/coincidence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "biphoton/errors.hpp"
#include "biphoton/seeding.hpp"

namespace biphoton {

namespace {

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }
bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

// Piecewise-constant density over the cells of a CorrelationResult grid.
class CellSampler {
 public:
  explicit CellSampler(const CorrelationResult& g2) {
    const std::size_t n = g2.tau.size();
    if (n == 0 || g2.g2.size() != n) throw DegenerateInputError("histogram: empty g2 curve");
    edges_.resize(n + 1);
    for (std::size_t i = 1; i < n; ++i) edges_[i] = 0.5 * (g2.tau[i - 1] + g2.tau[i]);
    const double first = n > 1 ? g2.tau[1] - g2.tau[0] : 1.0;
    const double last = n > 1 ? g2.tau[n - 1] - g2.tau[n - 2] : 1.0;
    edges_[0] = g2.tau[0] - 0.5 * first;
    edges_[n] = g2.tau[n - 1] + 0.5 * last;
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = g2.g2[i];
      if (!finite_nonnegative(g)) throw DegenerateInputError("histogram: g2 must be >= 0");
      acc += g * (edges_[i + 1] - edges_[i]);
      cdf_[i] = acc;
    }
    if (!(acc > 0.0)) throw DegenerateInputError("histogram: g2 is not normalizable");
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  template <class Rng>
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    return edges_[i] + uniform(rng) * (edges_[i + 1] - edges_[i]);
  }

 private:
  std::vector<double> edges_;
  std::vector<double> cdf_;
};

struct Tally {
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
};

void bin(Tally& t, double tau, double width, std::size_t zero) {
  const double c = std::floor(tau / width + 0.5) + static_cast<double>(zero);
  if (c < 0.0) {
    ++t.underflow;
  } else if (c >= static_cast<double>(t.counts.size())) {
    ++t.overflow;
  } else {
    ++t.counts[static_cast<std::size_t>(c)];
  }
}

}  // namespace

void DetectorParams::validate() const {
  if (!finite_nonnegative(jitter_sigma)) throw ConfigurationError("detector: jitter must be >= 0");
  if (!in_unit_interval(efficiency_start) || !in_unit_interval(efficiency_stop))
    throw ConfigurationError("detector: efficiency must lie in [0, 1]");
  if (!finite_nonnegative(dark_background_rate))
    throw ConfigurationError("detector: background rate must be >= 0");
}

void AcquisitionParams::validate() const {
  if (!finite_nonnegative(pair_rate)) throw ConfigurationError("acquisition: pair_rate must be >= 0");
  if (!finite_nonnegative(acquisition_time))
    throw ConfigurationError("acquisition: acquisition_time must be >= 0");
  if (!(std::isfinite(channel_width) && channel_width > 0.0))
    throw ConfigurationError("acquisition: channel_width must be > 0");
  if (n_channels == 0) throw ConfigurationError("acquisition: n_channels must be > 0");
  if (zero_channel && *zero_channel >= n_channels)
    throw ConfigurationError("acquisition: zero channel outside the MCA");
  if (!in_unit_interval(transmittance) || !in_unit_interval(pass_probability))
    throw ConfigurationError("acquisition: transmittance and pass probability must lie in [0, 1]");
}

double Histogram::tau_center(std::size_t channel) const {
  return (static_cast<double>(channel) - static_cast<double>(zero_channel)) * channel_width;
}

std::uint64_t Histogram::total() const {
  std::uint64_t sum = underflow + overflow;
  for (std::uint64_t c : counts) sum += c;
  return sum;
}

Histogram simulate_histogram(const CorrelationResult& g2, const DetectorParams& detectors,
                             const AcquisitionParams& acq) {
  detectors.validate();
  acq.validate();
  const CellSampler sampler(g2);

  Histogram h;
  h.channel_width = acq.channel_width;
  h.zero_channel = acq.zero_channel.value_or(acq.n_channels / 2);
  h.counts.assign(acq.n_channels, 0);
  h.acquisition_time = acq.acquisition_time;
  h.seed = acq.seed;

  // Stream 0: pair total, then accidentals channel by channel.
  std::mt19937_64 master(derive_seed(acq.seed, 0, 0));
  const double mean_pairs = acq.pair_rate * acq.acquisition_time * acq.transmittance *
                            detectors.efficiency_start * detectors.efficiency_stop *
                            acq.pass_probability / 2.0;
  h.pairs = mean_pairs > 0.0 ? std::poisson_distribution<std::uint64_t>(mean_pairs)(master) : 0;

  const double mean_background = detectors.dark_background_rate * acq.acquisition_time;
  if (mean_background > 0.0) {
    std::poisson_distribution<std::uint64_t> accidental(mean_background);
    for (auto& c : h.counts) {
      const std::uint64_t b = accidental(master);
      c += b;
      h.background += b;
    }
  }

  // Stream 1: pair delays in fixed-size batches.
  const std::size_t batches = (h.pairs + kEventsPerBatch - 1) / kEventsPerBatch;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(batches, std::thread::hardware_concurrency()));
  std::vector<Tally> tallies(workers);
  std::atomic<std::size_t> next{0};
  auto work = [&](Tally& tally) {
    tally.counts.assign(acq.n_channels, 0);
    for (std::size_t b = next++; b < batches; b = next++) {
      std::mt19937_64 rng(derive_seed(acq.seed, 1, b));
      std::normal_distribution<double> jitter(0.0, detectors.jitter_sigma);
      const std::uint64_t begin = b * kEventsPerBatch;
      const std::uint64_t end = std::min<std::uint64_t>(h.pairs, begin + kEventsPerBatch);
      for (std::uint64_t e = begin; e < end; ++e) {
        double tau = sampler.sample(rng);
        if (detectors.jitter_sigma > 0.0) {
          const double start = jitter(rng);
          const double stop = jitter(rng);
          tau += stop - start;
        }
        bin(tally, tau, acq.channel_width, h.zero_channel);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, std::ref(tallies[w]));
    work(tallies[0]);
  }
  for (const Tally& t : tallies) {
    for (std::size_t i = 0; i < t.counts.size(); ++i) h.counts[i] += t.counts[i];
    h.underflow += t.underflow;
    h.overflow += t.overflow;
  }
  return h;
}

VisibilityEstimate estimate_visibility(const Histogram& plus, const Histogram& minus,
                                       const PostSelectionWindow& window, double signal_support) {
  if (plus.n_channels() != minus.n_channels() || plus.channel_width != minus.channel_width ||
      plus.zero_channel != minus.zero_channel || plus.acquisition_time != minus.acquisition_time)
    throw std::invalid_argument("estimate_visibility: histograms have different geometry");
  if (!(window.half_width > 0.0))
    throw std::invalid_argument("estimate_visibility: window half_width must be > 0");

  const double cut = 3.0 * signal_support;
  auto background = [&](const Histogram& h, double& mean, double& variance) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < h.n_channels(); ++i) {
      if (std::abs(h.tau_center(i)) > cut) {
        sum += static_cast<double>(h.counts[i]);
        ++n;
      }
    }
    mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    variance = n > 0 ? sum / (static_cast<double>(n) * static_cast<double>(n)) : 0.0;
  };

  VisibilityEstimate est;
  double var_bp = 0.0, var_bm = 0.0;
  background(plus, est.background_plus, var_bp);
  background(minus, est.background_minus, var_bm);

  double raw_plus = 0.0, raw_minus = 0.0;
  for (std::size_t i = 0; i < plus.n_channels(); ++i) {
    const double t = plus.tau_center(i);
    if (t < window.center - window.half_width || t > window.center + window.half_width) continue;
    raw_plus += static_cast<double>(plus.counts[i]);
    raw_minus += static_cast<double>(minus.counts[i]);
    ++est.window_channels;
  }
  if (est.window_channels == 0) return est;

  const double m = static_cast<double>(est.window_channels);
  const double sp = raw_plus - m * est.background_plus;
  const double sm = raw_minus - m * est.background_minus;
  if (!(sp + sm > 0.0)) return est;

  const double var_sp = raw_plus + m * m * var_bp;
  const double var_sm = raw_minus + m * m * var_bm;
  const double denom = sp + sm;
  est.value = (sp - sm) / denom;
  // dV/dS+ = 2 S- / (S+ + S-)^2, dV/dS- = -2 S+ / (S+ + S-)^2
  est.sigma = 2.0 / (denom * denom) * std::sqrt(sm * sm * var_sp + sp * sp * var_sm);
  return est;
}

std::vector<VisibilitySample> drift_timeseries(const BiphotonState& state,
                                               const FiberChannel& fiber, Passes scenario,
                                               const std::vector<double>& sample_times,
                                               double basis_angle) {
  const FiberChannel channel(fiber.k2(), fiber.geometric_length(), scenario,
                             fiber.loss_db_per_km(), fiber.drift());
  double horizon = 0.0;
  for (double t : sample_times) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("drift_timeseries: sample times must be finite and >= 0");
    horizon = std::max(horizon, t);
  }
  const DriftTrajectory trajectory(channel.drift(), horizon);
  const PairAmplitude zero_delay = state.slice(state.grid().center());

  std::vector<VisibilitySample> out;
  out.reserve(sample_times.size());
  for (double t : sample_times) {
    const JonesMatrix u = channel_operator(channel, trajectory, t);
    out.push_back({t, slice_visibility(transform(zero_delay, u), basis_angle)});
  }
  return out;
}

}  // namespace biphoton
