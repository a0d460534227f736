#include "biphoton/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <system_error>

#include "biphoton/coincidence.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/csv.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/seeding.hpp"

namespace biphoton::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> header(const std::string& subcommand, const ScenarioConfig& cfg) {
  std::vector<std::string> lines{"biphoton " + subcommand};
  for (const std::string& line : cfg.describe()) lines.push_back(line);
  lines.push_back("derived.tau0_s = " + format_double(cfg.crystal.tau0()));
  lines.push_back("derived.tau_f_s = " + format_double(cfg.tau_f()));
  return lines;
}

void write_header(std::ostream& os, const std::vector<std::string>& lines) {
  for (const std::string& line : lines) os << "# " << line << '\n';
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("nan");
}

// Polarization operator seen by both photons before the beamsplitter: the configured plate
// (identity without one) for a single pass, its Faraday round trip otherwise.
JonesMatrix polarization_channel(const ScenarioConfig& cfg) {
  const JonesMatrix u = cfg.plate ? retarder(*cfg.plate) : JonesMatrix::identity();
  return cfg.fiber.passes() == Passes::go_and_return ? round_trip(u) : u;
}

// Plate the closed-form curves should reproduce: the Faraday round trip undoes any plate.
RetarderSpec effective_plate(const ScenarioConfig& cfg) {
  if (cfg.plate && cfg.fiber.passes() == Passes::single) return *cfg.plate;
  return RetarderSpec(0.0, 0.0);
}

BiphotonState prepared_state(const ScenarioConfig& cfg) {
  return apply_local(pdc_state(cfg.crystal, cfg.grid()), polarization_channel(cfg));
}

std::string correlation_file(const std::string& subcommand, const ScenarioConfig& cfg,
                             const CorrelationResult& r, const std::string& what) {
  std::ostringstream os;
  auto lines = header(subcommand, cfg);
  lines.push_back("curve = " + what);
  write_correlation_csv(os, r, lines);
  return os.str();
}

}  // namespace

ScenarioOutput g2_curves(const ScenarioConfig& cfg) {
  const BiphotonState state = prepared_state(cfg);
  const double tf = cfg.tau_f();
  const RetarderSpec plate = effective_plate(cfg);
  const double b = cfg.basis_angle;
  const AnalyzerConfig parallel{b, b}, crossed{b, b + kPi / 2.0};

  const auto plus = g2_numeric(state, cfg.fiber, parallel, cfg.mode);
  const auto minus = g2_numeric(state, cfg.fiber, crossed, cfg.mode);
  const auto plus_a = g2_analytic_curve(plus.tau, tf, plate, G2Branch::plus);
  const auto minus_a = g2_analytic_curve(minus.tau, tf, plate, G2Branch::minus);

  double deviation = 0.0;
  for (std::size_t i = 0; i < plus.tau.size(); ++i)
    deviation = std::max({deviation, std::abs(plus.g2[i] - plus_a.g2[i]),
                          std::abs(minus.g2[i] - minus_a.g2[i])});

  ScenarioOutput out;
  out.files = {
      {"g2_plus.csv", correlation_file("g2-curves", cfg, plus, "numeric parallel analyzers")},
      {"g2_minus.csv", correlation_file("g2-curves", cfg, minus, "numeric crossed analyzers")},
      {"g2_plus_analytic.csv", correlation_file("g2-curves", cfg, plus_a, "closed form plus")},
      {"g2_minus_analytic.csv", correlation_file("g2-curves", cfg, minus_a, "closed form minus")},
  };
  std::ostringstream s;
  s << "tau_f = " << format_double(tf) << " s\n"
    << "visibility(tau=0) numeric = " << optional_text(visibility(plus, minus, 0.0)) << '\n'
    << "visibility(tau=0) closed form = " << optional_text(visibility(plus_a, minus_a, 0.0))
    << '\n'
    << "max |numeric - closed form| = " << format_double(deviation) << '\n';
  out.summary = s.str();
  return out;
}

ScenarioOutput plate_surface(const ScenarioConfig& cfg) {
  const SurfaceSettings& sf = cfg.surface;
  std::ostringstream os;
  write_header(os, header("plate-surface", cfg));
  os << "delta,alpha,t,g2_plus,g2_minus\n";
  auto lattice = [](std::size_t i, std::size_t n, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t i = 0; i < sf.n_delta; ++i) {
    const double delta = lattice(i, sf.n_delta, 0.0, kPi / 2.0);
    for (std::size_t j = 0; j < sf.n_alpha; ++j) {
      const double alpha = lattice(j, sf.n_alpha, 0.0, kPi / 2.0);
      const RetarderSpec plate(delta, alpha);
      for (std::size_t k = 0; k < sf.n_t; ++k) {
        const double t = lattice(k, sf.n_t, -sf.t_max, sf.t_max);
        os << format_double(delta) << ',' << format_double(alpha) << ',' << format_double(t)
           << ',' << format_double(g2_analytic(t, 1.0, plate, G2Branch::plus)) << ','
           << format_double(g2_analytic(t, 1.0, plate, G2Branch::minus)) << '\n';
      }
    }
  }
  ScenarioOutput out;
  out.files = {{"plate_surface.csv", os.str()}};
  out.summary = "plate surface: " + std::to_string(sf.n_delta) + " x " +
                std::to_string(sf.n_alpha) + " plates, " + std::to_string(sf.n_t) +
                " delays in units of tau_f\n";
  return out;
}

ScenarioOutput bell_postselect(const ScenarioConfig& cfg) {
  const BiphotonState state = prepared_state(cfg);
  const double tf = cfg.tau_f();
  const double hw = cfg.postselect_half_width_tau_f * tf;
  const std::vector<std::pair<std::string, double>> windows = {
      {"zero delay", 0.0}, {"+pi tau_f / 2", kPi * tf / 2.0}, {"-pi tau_f / 2", -kPi * tf / 2.0}};

  std::ostringstream os, s;
  write_header(os, header("bell-postselect", cfg));
  os << "window_center_s,half_width_s,omega_low,omega_high,samples,fidelity_psi_plus,"
        "fidelity_psi_minus,visibility\n";
  for (const auto& [name, center] : windows) {
    const PostSelection p = postselect(state, cfg.fiber, {center, hw}, cfg.basis_angle);
    os << format_double(center) << ',' << format_double(hw) << ',' << format_double(p.omega_low)
       << ',' << format_double(p.omega_high) << ',' << p.samples << ','
       << format_double(p.fidelity_psi_plus) << ',' << format_double(p.fidelity_psi_minus) << ','
       << optional_text(p.visibility) << '\n';
    s << name << ": F(psi+) = " << format_double(p.fidelity_psi_plus)
      << ", F(psi-) = " << format_double(p.fidelity_psi_minus)
      << ", visibility = " << optional_text(p.visibility) << '\n';
  }
  ScenarioOutput out;
  out.files = {{"bell_postselect.csv", os.str()}};
  out.summary = s.str();
  return out;
}

ScenarioOutput drift_series(const ScenarioConfig& cfg) {
  const BiphotonState state = pdc_state(cfg.crystal, cfg.grid());
  const auto& ds = cfg.drift_series;
  std::vector<double> times;
  const auto n = static_cast<std::size_t>(std::floor(ds.duration / ds.sample_interval + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) times.push_back(static_cast<double>(i) * ds.sample_interval);

  const auto single = drift_timeseries(state, cfg.fiber, Passes::single, times, cfg.basis_angle);
  const auto round = drift_timeseries(state, cfg.fiber, Passes::go_and_return, times, cfg.basis_angle);

  std::ostringstream os;
  write_header(os, header("drift-series", cfg));
  os << "t_s,visibility_single_pass,visibility_go_and_return\n";
  double lo = 1.0, hi = -1.0, mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]) << ',' << optional_text(single[i].visibility) << ','
       << optional_text(round[i].visibility) << '\n';
    if (single[i].visibility) {
      lo = std::min(lo, *single[i].visibility);
      hi = std::max(hi, *single[i].visibility);
    }
    if (round[i].visibility) {
      ++count;
      const double d = *round[i].visibility - mean;
      mean += d / static_cast<double>(count);
      m2 += d * (*round[i].visibility - mean);
    }
  }
  std::ostringstream s;
  s << "single pass visibility range = [" << format_double(lo) << ", " << format_double(hi)
    << "]\n"
    << "go-and-return visibility mean = " << format_double(mean) << ", std = "
    << format_double(count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0) << '\n';
  ScenarioOutput out;
  out.files = {{"drift_series.csv", os.str()}};
  out.summary = s.str();
  return out;
}

ScenarioOutput histogram(const ScenarioConfig& cfg) {
  const BiphotonState state = prepared_state(cfg);
  const double tf = cfg.tau_f();
  const HistogramSettings& hs = cfg.histogram;
  const double b = cfg.basis_angle;
  const AnalyzerConfig parallel{b, b}, crossed{b, b + kPi / 2.0};

  AcquisitionParams acq;
  acq.pair_rate = hs.pair_rate;
  acq.acquisition_time = hs.acquisition_time;
  acq.channel_width = hs.channel_width_tau_f * tf;
  const auto half = static_cast<std::size_t>(
      std::ceil(hs.range_tau_f / hs.channel_width_tau_f - 1e-9));
  acq.n_channels = 2 * half + 1;
  acq.transmittance = transmittance(cfg.fiber);

  acq.pass_probability = analyzer_pass_probability(state, parallel);
  acq.seed = derive_seed(cfg.seed, 2, 0);
  const Histogram h_plus =
      simulate_histogram(g2_numeric(state, cfg.fiber, parallel, cfg.mode), cfg.detector, acq);
  acq.pass_probability = analyzer_pass_probability(state, crossed);
  acq.seed = derive_seed(cfg.seed, 2, 1);
  const Histogram h_minus =
      simulate_histogram(g2_numeric(state, cfg.fiber, crossed, cfg.mode), cfg.detector, acq);

  const VisibilityEstimate v = estimate_visibility(
      h_plus, h_minus, {0.0, hs.window_half_width_tau_f * tf}, hs.signal_support_tau_f * tf);

  auto file = [&](const Histogram& h, const std::string& what) {
    std::ostringstream os;
    auto lines = header("histogram", cfg);
    lines.push_back("histogram.analyzers = " + what);
    write_histogram_csv(os, h, lines);
    return os.str();
  };
  ScenarioOutput out;
  out.files = {{"histogram_plus.csv", file(h_plus, "parallel")},
               {"histogram_minus.csv", file(h_minus, "crossed")}};
  std::ostringstream s;
  s << "pairs: parallel = " << h_plus.pairs << ", crossed = " << h_minus.pairs << '\n'
    << "visibility(tau=0) = " << optional_text(v.value) << " +- " << format_double(v.sigma)
    << " (" << v.window_channels << " channels, background/channel "
    << format_double(v.background_plus) << " / " << format_double(v.background_minus) << ")\n";
  out.summary = s.str();
  return out;
}

ScenarioConfig load_scenario(const std::optional<std::string>& config_path,
                             const std::vector<std::string>& overrides,
                             const std::optional<std::string>& env_seed) {
  RawConfig raw = config_path ? RawConfig::load(*config_path) : RawConfig{};
  if (env_seed) raw.set("run.seed", *env_seed, "environment BIPHOTON_SEED");
  for (const std::string& arg : overrides) {
    const auto eq = arg.find('=');
    if (!arg.starts_with("--") || eq == std::string::npos || arg.find('.') > eq)
      throw ConfigError("command line: expected --section.key=value, got '" + arg + "'");
    raw.set(arg.substr(2, eq - 2), arg.substr(eq + 1), "command line " + arg);
  }
  return resolve(raw);
}

namespace {

void write_outputs(const std::filesystem::path& dir, const ScenarioOutput& output) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create output directory: " + ec.message());

  // Stage everything first so a failure leaves no partial results behind.
  std::vector<fs::path> staged;
  auto discard = [&] {
    for (const fs::path& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, content] : output.files) {
    const fs::path tmp = dir / (name + ".tmp");
    std::ofstream f(tmp, std::ios::binary);
    f << content;
    f.close();
    if (!f) {
      discard();
      fs::remove(tmp, ec);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
    staged.push_back(tmp);
  }
  for (std::size_t i = 0; i < staged.size(); ++i) {
    fs::rename(staged[i], dir / output.files[i].first, ec);
    if (ec) {
      discard();
      throw std::runtime_error((dir / output.files[i].first).string() + ": " + ec.message());
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::optional<std::string>& env_seed) {
  CLI::App app{"Polarization-entangled biphotons through dispersive fiber"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;

  using Runner = ScenarioOutput (*)(const ScenarioConfig&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
      {"g2-curves", "numeric and closed-form G2 for parallel and crossed analyzers", g2_curves},
      {"plate-surface", "closed-form G2 over a lattice of retarders", plate_surface},
      {"bell-postselect", "Bell-state fidelities of narrow delay windows", bell_postselect},
      {"drift-series", "zero-delay visibility under fiber drift, both configurations",
       drift_series},
      {"histogram", "Monte Carlo start-stop coincidence histograms", histogram},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, runner] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "scenario config file");
    sub->allow_extras();
    sub->footer("Any setting can be overridden with --section.key=value.");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    ScenarioConfig cfg;
    try {
      cfg = load_scenario(config_path, subs[i]->remaining(), env_seed);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
    try {
      const ScenarioOutput output = std::get<2>(commands[i])(cfg);
      write_outputs(cfg.output_dir, output);
      out << output.summary;
      for (const auto& [name, content] : output.files)
        out << "wrote " << (cfg.output_dir / name).string() << '\n';
    } catch (const ConfigurationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
    return kExitOk;
  }
  return kExitConfig;
}

}  // namespace biphoton::cli
