#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/biphoton_state.hpp"
#include "biphoton/coincidence.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/fiber.hpp"
#include "biphoton/jones.hpp"

namespace biphoton {

// Config problem tied to a source location ("file:line: section.key: message").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "[section]" / "key = value" text with '#' comments.
class RawConfig {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "path:line", "command line" or "environment"
  };

  static RawConfig parse(const std::string& text, const std::string& source);
  static RawConfig load(const std::filesystem::path& path);

  // key is "section.key"; later sets override earlier ones.
  void set(const std::string& key, const std::string& value, const std::string& origin);
  const Entry* find(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

struct HistogramSettings {
  double pair_rate = 2.0e5;               // pairs/s at the crystal
  double acquisition_time = 600.0;        // s
  double channel_width_tau_f = 0.05;      // channel width in units of tau_f
  double range_tau_f = 40.0;              // MCA covers +- range
  double signal_support_tau_f = 9.0;      // background taken beyond 3x this
  double window_half_width_tau_f = 0.05;  // visibility window around tau = 0
};

struct SurfaceSettings {
  std::size_t n_delta = 20;
  std::size_t n_alpha = 20;
  std::size_t n_t = 129;
  double t_max = 6.0;  // in units of tau_f
};

struct DriftSeriesSettings {
  double duration = 7200.0;      // s
  double sample_interval = 30.0;  // s
};

// Fully resolved and validated scenario.
struct ScenarioConfig {
  CrystalParams crystal{351e-9, 2.0e-10, 0.5e-3};
  std::size_t grid_size = 4096;
  double omega_max_tau0 = 8.0 * std::numbers::pi;
  FiberChannel fiber{3.6e-26, 240.0, Passes::go_and_return, 12.0};
  std::optional<RetarderSpec> plate;
  double basis_angle = std::numbers::pi / 4.0;
  FourierMode mode = FourierMode::far_field;
  double postselect_half_width_tau_f = 0.02;
  SurfaceSettings surface;
  DriftSeriesSettings drift_series;
  DetectorParams detector{3.5e-10, 0.5, 0.5, 0.02};
  HistogramSettings histogram;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  FrequencyGrid grid() const { return {grid_size, omega_max_tau0 / crystal.tau0()}; }
  double tau_f() const { return biphoton::tau_f(fiber, crystal); }

  // Every resolved setting as "section.key = value", in a fixed order.
  std::vector<std::string> describe() const;
};

// Resolves raw entries over the built-in defaults. Unknown keys, malformed values and
// parameters violating a module precondition raise ConfigError naming the origin.
ScenarioConfig resolve(const RawConfig& raw);

}  // namespace biphoton
