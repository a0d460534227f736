#include "biphoton/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "biphoton/csv.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value))
    throw std::invalid_argument("expected a finite number, got '" + text + "'");
  return value;
}

// Radians, or degrees with a trailing "deg".
double parse_angle(const std::string& text) {
  constexpr std::string_view suffix = "deg";
  if (text.size() > suffix.size() && text.ends_with(suffix))
    return parse_double(trim(text.substr(0, text.size() - suffix.size()))) * std::numbers::pi /
           180.0;
  return parse_double(text);
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  return value;
}

}  // namespace

RawConfig RawConfig::parse(const std::string& text, const std::string& source) {
  RawConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string origin = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(origin + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(origin + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(origin + ": key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    if (cfg.find(full) != nullptr)
      throw ConfigError(origin + ": duplicate key " + full + " (first at " +
                        cfg.find(full)->origin + ")");
    cfg.set(full, value, origin);
  }
  return cfg;
}

RawConfig RawConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void RawConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  entries_[key] = Entry{value, origin};
}

const RawConfig::Entry* RawConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> ScenarioConfig::describe() const {
  auto d = [](double x) { return format_double(x); };
  const DriftProcess& drift = fiber.drift();
  std::vector<std::string> out = {
      "crystal.pump_wavelength = " + d(crystal.pump_wavelength()),
      "crystal.inverse_group_velocity_difference = " +
          d(crystal.inverse_group_velocity_difference()),
      "crystal.length = " + d(crystal.length()),
      "grid.size = " + std::to_string(grid_size),
      "grid.omega_max_tau0 = " + d(omega_max_tau0),
      "fiber.k2 = " + d(fiber.k2()),
      "fiber.length = " + d(fiber.geometric_length()),
      std::string("fiber.passes = ") +
          (fiber.passes() == Passes::go_and_return ? "go_and_return" : "single"),
      "fiber.loss_db_per_km = " + d(fiber.loss_db_per_km()),
      "drift.correlation_time = " + d(drift.correlation_time),
      "drift.step_angle_scale = " + d(drift.step_angle_scale),
      "drift.time_step = " + d(drift.time_step),
      "drift.duration = " + d(drift_series.duration),
      "drift.sample_interval = " + d(drift_series.sample_interval),
  };
  if (plate) {
    out.push_back("plate.delta = " + d(plate->delta()));
    out.push_back("plate.alpha = " + d(plate->alpha()));
  }
  const std::vector<std::string> rest = {
      "analyzer.basis_angle = " + d(basis_angle),
      std::string("correlation.mode = ") +
          (mode == FourierMode::far_field ? "far_field" : "exact_fourier"),
      "postselect.half_width_tau_f = " + d(postselect_half_width_tau_f),
      "surface.n_delta = " + std::to_string(surface.n_delta),
      "surface.n_alpha = " + std::to_string(surface.n_alpha),
      "surface.n_t = " + std::to_string(surface.n_t),
      "surface.t_max = " + d(surface.t_max),
      "detector.jitter_sigma = " + d(detector.jitter_sigma),
      "detector.efficiency_start = " + d(detector.efficiency_start),
      "detector.efficiency_stop = " + d(detector.efficiency_stop),
      "detector.dark_background_rate = " + d(detector.dark_background_rate),
      "histogram.pair_rate = " + d(histogram.pair_rate),
      "histogram.acquisition_time = " + d(histogram.acquisition_time),
      "histogram.channel_width_tau_f = " + d(histogram.channel_width_tau_f),
      "histogram.range_tau_f = " + d(histogram.range_tau_f),
      "histogram.signal_support_tau_f = " + d(histogram.signal_support_tau_f),
      "histogram.window_half_width_tau_f = " + d(histogram.window_half_width_tau_f),
      "run.seed = " + std::to_string(seed),
      "run.output_dir = " + output_dir.string(),
  };
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

ScenarioConfig resolve(const RawConfig& raw) {
  // Plain values first; the module objects are built and checked afterwards.
  double pump = 351e-9, igvd = 2.0e-10, crystal_length = 0.5e-3;
  double k2 = 3.6e-26, fiber_length = 240.0, loss = 12.0;
  Passes passes = Passes::go_and_return;
  DriftProcess drift;
  std::optional<double> plate_delta, plate_alpha;
  ScenarioConfig cfg;

  auto positive = [](double x) {
    if (!(x > 0.0)) throw std::invalid_argument("must be > 0");
    return x;
  };
  auto non_negative = [](double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("must be >= 0");
    return x;
  };
  auto count = [](const std::string& v, std::size_t min) {
    const auto n = parse_unsigned(v);
    if (n < min) throw std::invalid_argument("must be >= " + std::to_string(min));
    return static_cast<std::size_t>(n);
  };

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"crystal.pump_wavelength", [&](auto& v) { pump = positive(parse_double(v)); }},
      {"crystal.inverse_group_velocity_difference",
       [&](auto& v) { igvd = positive(parse_double(v)); }},
      {"crystal.length", [&](auto& v) { crystal_length = positive(parse_double(v)); }},
      {"grid.size", [&](auto& v) { cfg.grid_size = count(v, 256); }},
      {"grid.omega_max_tau0", [&](auto& v) { cfg.omega_max_tau0 = positive(parse_double(v)); }},
      {"fiber.k2", [&](auto& v) { k2 = non_negative(parse_double(v)); }},
      {"fiber.length", [&](auto& v) { fiber_length = positive(parse_double(v)); }},
      {"fiber.passes",
       [&](auto& v) {
         if (v == "single") passes = Passes::single;
         else if (v == "go_and_return") passes = Passes::go_and_return;
         else throw std::invalid_argument("expected 'single' or 'go_and_return'");
       }},
      {"fiber.loss_db_per_km", [&](auto& v) { loss = non_negative(parse_double(v)); }},
      {"drift.correlation_time", [&](auto& v) { drift.correlation_time = positive(parse_double(v)); }},
      {"drift.step_angle_scale",
       [&](auto& v) { drift.step_angle_scale = non_negative(parse_double(v)); }},
      {"drift.time_step", [&](auto& v) { drift.time_step = positive(parse_double(v)); }},
      {"drift.duration",
       [&](auto& v) { cfg.drift_series.duration = non_negative(parse_double(v)); }},
      {"drift.sample_interval",
       [&](auto& v) { cfg.drift_series.sample_interval = positive(parse_double(v)); }},
      {"plate.delta", [&](auto& v) { plate_delta = parse_angle(v); }},
      {"plate.alpha", [&](auto& v) { plate_alpha = parse_angle(v); }},
      {"analyzer.basis_angle", [&](auto& v) { cfg.basis_angle = parse_angle(v); }},
      {"correlation.mode",
       [&](auto& v) {
         if (v == "far_field") cfg.mode = FourierMode::far_field;
         else if (v == "exact_fourier") cfg.mode = FourierMode::exact_fourier;
         else throw std::invalid_argument("expected 'far_field' or 'exact_fourier'");
       }},
      {"postselect.half_width_tau_f",
       [&](auto& v) { cfg.postselect_half_width_tau_f = positive(parse_double(v)); }},
      {"surface.n_delta", [&](auto& v) { cfg.surface.n_delta = count(v, 2); }},
      {"surface.n_alpha", [&](auto& v) { cfg.surface.n_alpha = count(v, 2); }},
      {"surface.n_t", [&](auto& v) { cfg.surface.n_t = count(v, 2); }},
      {"surface.t_max", [&](auto& v) { cfg.surface.t_max = positive(parse_double(v)); }},
      {"detector.jitter_sigma",
       [&](auto& v) { cfg.detector.jitter_sigma = non_negative(parse_double(v)); }},
      {"detector.efficiency_start",
       [&](auto& v) { cfg.detector.efficiency_start = parse_double(v); }},
      {"detector.efficiency_stop", [&](auto& v) { cfg.detector.efficiency_stop = parse_double(v); }},
      {"detector.dark_background_rate",
       [&](auto& v) { cfg.detector.dark_background_rate = non_negative(parse_double(v)); }},
      {"histogram.pair_rate",
       [&](auto& v) { cfg.histogram.pair_rate = non_negative(parse_double(v)); }},
      {"histogram.acquisition_time",
       [&](auto& v) { cfg.histogram.acquisition_time = positive(parse_double(v)); }},
      {"histogram.channel_width_tau_f",
       [&](auto& v) { cfg.histogram.channel_width_tau_f = positive(parse_double(v)); }},
      {"histogram.range_tau_f",
       [&](auto& v) { cfg.histogram.range_tau_f = positive(parse_double(v)); }},
      {"histogram.signal_support_tau_f",
       [&](auto& v) { cfg.histogram.signal_support_tau_f = positive(parse_double(v)); }},
      {"histogram.window_half_width_tau_f",
       [&](auto& v) { cfg.histogram.window_half_width_tau_f = positive(parse_double(v)); }},
      {"run.seed", [&](auto& v) { cfg.seed = parse_unsigned(v); }},
      {"run.output_dir",
       [&](auto& v) { cfg.output_dir = std::filesystem::path(v); }},
  };

  for (const auto& [key, entry] : raw.entries()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(entry.origin + ": unknown key " + key);
    try {
      it->second(entry.value);
    } catch (const std::exception& e) {
      throw ConfigError(entry.origin + ": " + key + ": " + e.what());
    }
  }

  auto origin_of = [&](const std::string& key) {
    const auto* e = raw.find(key);
    return (e ? e->origin : std::string("default")) + ": " + key + ": ";
  };
  auto checked = [&](const std::string& key, auto&& build) {
    try {
      build();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(origin_of(key) + e.what());
    }
  };

  checked("crystal.length", [&] { cfg.crystal = CrystalParams(pump, igvd, crystal_length); });
  checked("detector.efficiency_start", [&] { cfg.detector.validate(); });
  drift.seed = cfg.seed;
  checked("fiber.length", [&] { cfg.fiber = FiberChannel(k2, fiber_length, passes, loss, drift); });

  if (plate_delta.has_value() != plate_alpha.has_value())
    throw ConfigError(origin_of(plate_delta ? "plate.delta" : "plate.alpha") +
                      "plate needs both delta and alpha");
  if (plate_delta) checked("plate.delta", [&] { cfg.plate = RetarderSpec(*plate_delta, *plate_alpha); });

  checked("grid.size", [&] { (void)cfg.grid(); });
  if (cfg.omega_max_tau0 < std::numbers::pi)
    throw ConfigError(origin_of("grid.omega_max_tau0") +
                      "must be >= pi to hold the main spectral lobe");
  if (!(cfg.fiber.k2() > 0.0))
    throw ConfigError(origin_of("fiber.k2") + "must be > 0: correlation shapes need dispersion");
  if (cfg.mode == FourierMode::exact_fourier) {
    const FrequencyGrid grid = cfg.grid();
    const double k2z = cfg.fiber.k2() * cfg.fiber.dispersive_length();
    const std::size_t need = required_grid_size(k2z, grid.omega_max());
    if (cfg.grid_size < need)
      throw ConfigError(origin_of("grid.size") + "exact_fourier mode aliases the dispersion chirp; need size >= " +
                        std::to_string(need));
  }
  if (cfg.histogram.range_tau_f <= cfg.histogram.channel_width_tau_f)
    throw ConfigError(origin_of("histogram.range_tau_f") + "must exceed one channel width");
  return cfg;
}

}  // namespace biphoton
