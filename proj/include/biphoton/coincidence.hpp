#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "biphoton/biphoton_state.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/fiber.hpp"

namespace biphoton {

struct DetectorParams {
  double jitter_sigma = 0.0;          // s, Gaussian timing response of each detector
  double efficiency_start = 1.0;      // detector on the TAC START input
  double efficiency_stop = 1.0;       // detector on the TAC STOP input
  double dark_background_rate = 0.0;  // accidental coincidences per channel per second

  void validate() const;  // throws ConfigurationError
};

struct AcquisitionParams {
  double pair_rate = 0.0;         // pairs/s produced at the crystal
  double acquisition_time = 0.0;  // s
  double channel_width = 0.0;     // s
  std::size_t n_channels = 0;
  // MCA channel holding zero delay; defaults to n_channels / 2.
  std::optional<std::size_t> zero_channel;
  double transmittance = 1.0;     // fiber power transmission
  double pass_probability = 1.0;  // fraction of pairs passing both analyzers
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigurationError
};

// Start-stop coincidence histogram. Channel i collects delays in
// [(i - zero - 1/2) w, (i - zero + 1/2) w).
struct Histogram {
  double channel_width = 0.0;
  std::size_t zero_channel = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  std::uint64_t pairs = 0;       // Poisson draw of detected pairs
  std::uint64_t background = 0;  // accidental counts added to channels
  double acquisition_time = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_channels() const { return counts.size(); }
  double tau_center(std::size_t channel) const;
  std::uint64_t total() const;  // channels + underflow + overflow
};

// Events per batch; batch b draws from derive_seed(seed, 1, b).
inline constexpr std::size_t kEventsPerBatch = 1 << 16;

// Monte Carlo TAC/MCA run. g2 is read as a piecewise-constant density over its grid (each
// sample owns the cell between the midpoints to its neighbours). The detected-pair count is
// Poisson with mean pair_rate * T * transmittance * eff_start * eff_stop * pass_probability / 2,
// the 1/2 being the beamsplitter sending the photons to different outputs. Each pair gets two
// independent detector jitters. Flat accidentals are Poisson per channel. Deterministic in seed
// regardless of thread count. Throws DegenerateInputError when g2 carries no weight.
Histogram simulate_histogram(const CorrelationResult& g2, const DetectorParams& detectors,
                             const AcquisitionParams& acquisition);

struct VisibilityEstimate {
  std::optional<double> value;
  double sigma = 0.0;  // Poisson-propagated standard error
  double background_plus = 0.0;   // per channel
  double background_minus = 0.0;
  std::size_t window_channels = 0;
};

// Background-subtracted visibility (S+ - S-) / (S+ + S-) over the window channels. The
// background per channel is the mean of channels with |tau| > 3 * signal_support (zero if
// there are none). Throws std::invalid_argument on mismatched histogram geometry.
VisibilityEstimate estimate_visibility(const Histogram& plus, const Histogram& minus,
                                       const PostSelectionWindow& window, double signal_support);

struct VisibilitySample {
  double t = 0.0;
  std::optional<double> visibility;
};

// Zero-delay visibility of the state seen through the drifting fiber at each sample time.
// The state is taken at Omega = 0, where tau = 0 maps in the far field.
std::vector<VisibilitySample> drift_timeseries(const BiphotonState& state,
                                               const FiberChannel& fiber, Passes scenario,
                                               const std::vector<double>& sample_times,
                                               double basis_angle = std::numbers::pi / 4.0);

}  // namespace biphoton
