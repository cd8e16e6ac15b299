#pragma once

// Command-line front end.  run_cli() takes the argument vector and the output
// streams so the test suite can drive it in-process; tools/deltaion.cpp is a
// thin main() around it.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "deltaion/adiabatic.hpp"
#include "deltaion/analysis.hpp"
#include "deltaion/checkpoint.hpp"
#include "deltaion/errors.hpp"
#include "deltaion/io.hpp"
#include "deltaion/model.hpp"
#include "deltaion/oracle.hpp"
#include "deltaion/semiclassical.hpp"

namespace deltaion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

inline constexpr const char* kOutputDirEnv = "DELTAION_OUTPUT_DIR";
inline constexpr double kValidatedGammaMax = 2.5;

/// Everything that determines a run.  Defaults are listed in README.md.
struct RunConfig {
  std::string command;
  std::string engine = "semiclassical";
  std::optional<double> gamma;  ///< fixed-gamma mode (0.7 when neither gamma nor n_io is given)
  std::optional<double> n_io;   ///< fixed-n_io mode
  std::string z_range = "6:20:0.01";
  int cycles = 1;
  bool include_odd = false;
  bool field_off = false;
  double dt = 0.0;
  double dt_divisor = 40.0;
  double tolerance = 1e-6;
  int settle_cycles = 1;
  bool self_check = false;
  int sg_window = 31;
  int sg_order = 3;
  double prominence = 0.05;
  int range_half_width = 50;
  std::string output_dir;  ///< empty: $DELTAION_OUTPUT_DIR, else "."
  std::string output;      ///< file stem; empty: the command name
  std::string format = "csv";
  unsigned threads = 1;
  unsigned seed = 12345;
  std::string checkpoint_dir;
  std::vector<double> centers;
  bool perturb_branch = false;
};

/// "start:stop:step" (stop included up to a half-step rounding guard) or a
/// single number.
inline std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw domain_error("malformed range '" + text + "'");
    }
    if (used != s.size()) throw domain_error("malformed range '" + text + "'");
    return v;
  };
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) throw domain_error("range must read start:stop:step, got '" + text + "'");
  return linear_range(number(parts[0]), number(parts[1]), number(parts[2]));
}

/// Config files may be INI-style key=value (handled by CLI11) or a JSON object
/// whose keys are the long option names.
class ConfigReader : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream again(text);
      return CLI::ConfigBase::from_config(again);
    }
    const auto doc = nlohmann::json::parse(text);
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      const auto scalar = [](const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        return v.dump();
      };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else if (value.is_object()) {
        throw CLI::ConversionError("nested objects are not supported in JSON config (key '" + key + "')");
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

namespace detail {

inline std::string resolve_output_dir(const RunConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& extension) {
  const std::filesystem::path dir = resolve_output_dir(cfg);
  std::filesystem::create_directories(dir);
  return dir / ((cfg.output.empty() ? cfg.command : cfg.output) + extension);
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("cannot open output file " + path.string());
  out << content;
}

inline EngineConfig engine_config(const RunConfig& cfg, Engine engine) {
  EngineConfig e;
  e.engine = engine;
  e.n_cycles = cfg.cycles;
  e.semiclassical.include_odd = cfg.include_odd;
  e.semiclassical.field_off = cfg.field_off;
  e.oracle.dt = cfg.dt;
  e.oracle.dt_divisor = cfg.dt_divisor;
  e.oracle.drive = cfg.field_off ? 0.0 : 1.0;
  e.oracle.self_check = cfg.self_check;
  e.oracle.tolerance = cfg.tolerance;
  e.oracle.settle_cycles = cfg.settle_cycles;
  return e;
}

inline FilterSettings filter_settings(const RunConfig& cfg) {
  return {cfg.sg_window, cfg.sg_order, cfg.prominence, cfg.range_half_width};
}

inline ScanMode scan_mode(const RunConfig& cfg) { return cfg.n_io ? ScanMode::fixed_n_io : ScanMode::fixed_gamma; }
inline double fixed_value(const RunConfig& cfg) { return cfg.n_io ? *cfg.n_io : cfg.gamma.value_or(0.7); }

inline void validate(const RunConfig& cfg, std::ostream& err) {
  if (cfg.gamma && cfg.n_io) throw domain_error("--gamma and --n-io are mutually exclusive");
  if (!(fixed_value(cfg) > 0.0)) throw domain_error(cfg.n_io ? "n_io must be positive" : "gamma must be positive");
  if (cfg.cycles < 1) throw domain_error("--cycles must be >= 1");
  if (cfg.settle_cycles < 0) throw domain_error("--settle-cycles must be >= 0");
  if (cfg.dt < 0.0) throw domain_error("--dt must be non-negative");
  if (!(cfg.dt_divisor > 0.0)) throw domain_error("--dt-divisor must be positive");
  if (!(cfg.tolerance > 0.0)) throw domain_error("--tolerance must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw domain_error("--format must be csv or json");
  if (cfg.sg_window < 1 || cfg.sg_window % 2 == 0) throw domain_error("--sg-window must be a positive odd count");
  if (cfg.sg_order < 0 || cfg.sg_order >= cfg.sg_window) throw domain_error("--sg-order must lie in [0, window)");
  if (cfg.gamma && *cfg.gamma > kValidatedGammaMax) {
    err << "warning: gamma = " << *cfg.gamma << " exceeds the validated range (gamma <= " << kValidatedGammaMax
        << ")\n";
  }
}

/// Oracle engine with optional per-point checkpoints: a finished point is read
/// back instead of solved again when its parameters and step match.
inline RateEvaluator oracle_evaluator(const RunConfig& cfg, const EngineConfig& engine) {
  if (cfg.checkpoint_dir.empty()) return [engine](const ModelParams& p) { return evaluate_rate(p, engine); };
  std::filesystem::create_directories(cfg.checkpoint_dir);
  return [engine, dir = cfg.checkpoint_dir](const ModelParams& p) {
    const int total = engine.oracle.settle_cycles + engine.n_cycles;
    const double tf = 2.0 * std::numbers::pi * total;
    char name[128];
    std::snprintf(name, sizeof name, "oracle_g%.17g_z%.17g_c%d_d%.17g.ckpt", p.gamma, p.z, total, engine.oracle.drive);
    const std::string path = (std::filesystem::path(dir) / name).string();
    VolterraGrid grid;
    std::optional<Checkpoint> cached;
    try {
      cached = load_checkpoint(path);
    } catch (const domain_error&) {
      cached.reset();
    }
    const double dt_expected = engine.oracle.dt > 0.0 ? engine.oracle.dt : default_time_step(p, engine.oracle.dt_divisor);
    if (cached && std::abs(cached->grid.t_final - tf) < 1e-12 && cached->grid.dt <= dt_expected * (1.0 + 1e-12)) {
      grid = cached->grid;
    } else {
      grid = solve_boundary_function(p, tf, engine.oracle);
      save_checkpoint(path, {grid, survival_probability(grid).p});
    }
    const auto settled = engine.oracle.settle_cycles > 0 ? survival_probability(grid, engine.oracle.settle_cycles)
                                                         : SurvivalResult{1.0, 1.0};
    return rate_between(settled, survival_probability(grid), engine.n_cycles);
  };
}

inline RateScan run_scan(const RunConfig& cfg, Engine engine, const std::vector<double>& z) {
  const auto e = engine_config(cfg, engine);
  if (engine == Engine::oracle && !cfg.checkpoint_dir.empty()) {
    return scan_rate(oracle_evaluator(cfg, e), engine, e.n_cycles, scan_mode(cfg), fixed_value(cfg), z, cfg.threads);
  }
  return scan_rate(e, scan_mode(cfg), fixed_value(cfg), z, cfg.threads);
}

inline std::optional<PeriodEstimate> try_period(const RateScan& scan, std::string& error) {
  try {
    return modulation_period(scan);
  } catch (const insufficient_data_error& e) {
    error = e.what();
    return std::nullopt;
  }
}

inline double background_at_midpoint(const RunConfig& cfg, const std::vector<double>& z) {
  const double mid = 0.5 * (z.front() + z.back());
  if (cfg.field_off) return 0.0;
  return 2.0 * std::numbers::pi * rate_cycle_averaged(from_dimensionless(scan_gamma(scan_mode(cfg), fixed_value(cfg), mid), mid));
}

inline void report_failures(const RateScan& scan, std::ostream& err) {
  for (std::size_t i = 0; i < scan.z_values.size(); ++i) {
    if (scan.missing[i]) err << "error: z = " << scan.z_values[i] << ": " << scan.failures[i] << '\n';
  }
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto z = parse_range(cfg.z_range);
  const Engine engine = cfg.engine == "oracle" ? Engine::oracle : Engine::semiclassical;
  RateScan scan = run_scan(cfg, engine, z);
  analyze(scan, filter_settings(cfg));
  std::string period_error;
  const auto period = try_period(scan, period_error);
  const json meta = scan_metadata(scan, engine_config(cfg, engine), period, period_error);

  if (cfg.format == "csv") {
    std::ostringstream csv;
    write_scan_csv(csv, scan);
    write_text(output_path(cfg, ".csv"), csv.str());
    write_text(output_path(cfg, ".json"), meta.dump(2) + "\n");
  } else {
    write_text(output_path(cfg, ".json"), scan_document(scan, meta).dump(2) + "\n");
  }

  out << "samples: " << scan.z_values.size() << " (" << scan.missing_count() << " failed)\n";
  if (period) {
    out << "modulation period: " << format_number(period->mean) << " +- " << format_number(period->stddev) << " ("
        << period->peaks << " peaks)\n";
  } else {
    out << "modulation period: n/a (" << period_error << ")\n";
  }
  out << "threshold spacing: " << format_number(mode_threshold_spacing(scan.mode, scan.fixed_value)) << '\n';
  out << "background 2 pi Dbar at midpoint: " << format_number(background_at_midpoint(cfg, z)) << '\n';
  report_failures(scan, err);
  return scan.missing_count() > 0 ? kExitNumeric : kExitOk;
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto z = parse_range(cfg.z_range);
  RateScan semi = run_scan(cfg, Engine::semiclassical, z);
  RateScan oracle = run_scan(cfg, Engine::oracle, z);
  const double period = mode_threshold_spacing(scan_mode(cfg), fixed_value(cfg));
  std::vector<double> centers = cfg.centers;
  if (centers.empty()) centers.push_back(0.5 * (z.front() + z.back()));

  // Smooth over about one modulation period; fine structure is not compared.
  const double step = z.size() > 1 ? (z.back() - z.front()) / static_cast<double>(z.size() - 1) : 1.0;
  int window = static_cast<int>(std::lround(period / step)) | 1;
  window = std::max(1, std::min<int>(window, static_cast<int>(z.size()) | 1));
  const int order = std::min(3, window - 1);
  const auto semi_smooth = savitzky_golay(semi.gamma_raw, window, order);
  const auto oracle_smooth = savitzky_golay(oracle.gamma_raw, window, order);

  json windows = json::array();
  bool all_fit = true;
  for (double c : centers) {
    if (c - 0.5 * period < z.front() - 1e-12 || c + 0.5 * period > z.back() + 1e-12) {
      windows.push_back({{"center", c}, {"error", "window of one modulation period does not fit in the z range"}});
      all_fit = false;
      continue;
    }
    const auto means = compare_window(z, semi.gamma_raw, oracle.gamma_raw, c, period);
    const auto peaks = compare_window(z, semi_smooth, oracle_smooth, c, period);
    auto w = window_json(means);
    w["semiclassical_peak"] = peaks.reference_peak ? json(*peaks.reference_peak) : json(nullptr);
    w["oracle_peak"] = peaks.candidate_peak ? json(*peaks.candidate_peak) : json(nullptr);
    w["peak_offset"] = peaks.peak_offset ? json(*peaks.peak_offset) : json(nullptr);
    windows.push_back(w);
    out << "center " << format_number(c) << ": mean ratio oracle/semiclassical = " << format_number(means.ratio);
    if (peaks.peak_offset) out << ", peak offset = " << format_number(*peaks.peak_offset);
    out << '\n';
  }

  json meta;
  meta["schema_version"] = kOutputSchemaVersion;
  meta["kind"] = "method_comparison";
  meta["config"] = engine_json(engine_config(cfg, Engine::oracle));
  meta["mode"] = to_string(scan_mode(cfg));
  meta[cfg.n_io ? "n_io" : "gamma"] = fixed_value(cfg);
  meta["period"] = period;
  meta["smoothing"] = {{"window", window}, {"order", order}};
  meta["windows"] = windows;
  meta["missing"] = missing_json(oracle);

  if (cfg.format == "csv") {
    std::ostringstream csv;
    write_compare_csv(csv, semi, oracle);
    write_text(output_path(cfg, ".csv"), csv.str());
    write_text(output_path(cfg, ".json"), meta.dump(2) + "\n");
  } else {
    meta["z"] = z;
    meta["Gamma_semiclassical"] = semi.gamma_raw;
    meta["Gamma_oracle"] = oracle.gamma_raw;
    write_text(output_path(cfg, ".json"), meta.dump(2) + "\n");
  }
  report_failures(oracle, err);
  if (!all_fit) err << "warning: some comparison windows did not fit in the z range\n";
  return oracle.missing_count() > 0 ? kExitNumeric : kExitOk;
}

inline int cmd_thresholds(const RunConfig& cfg, std::ostream& out) {
  const auto z = parse_range(cfg.z_range);
  const auto list = thresholds_in_range(scan_mode(cfg), fixed_value(cfg), z.front(), z.back());
  out << "k,z_k\n";
  for (const auto& t : list) out << t.k << ',' << format_number(t.z) << '\n';
  return kExitOk;
}

inline int cmd_demo(std::ostream& out) {
  const auto demo = appendix_c_demo();
  out << "barrier time: " << format_number(demo.barrier_time.real()) << " + " << format_number(demo.barrier_time.imag())
      << " i  (i pi = " << format_number(std::numbers::pi) << " i)\n";
  out << "allowed-region time over [-cosh 2, -1]: " << format_number(demo.allowed_time) << '\n';
  out << "max |x(t + i pi) - cosh t|: " << format_number(demo.continuation_error) << '\n';
  return kExitOk;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Branch used for the free prefactor at complex start times; the debug hook
/// swaps in the principal root.
inline CheckResult check_branch(const std::function<cplx(cplx)>& sqrt_fn) {
  const auto p = from_dimensionless(0.7, 10.0);
  const double tf = 2.0 * std::numbers::pi;
  const auto amp = survival_amplitude(p, 1);
  const auto q = quasi_energy_averaged(p);
  const cplx t0 = tunnel_start_time(p.gamma);
  const cplx composed = bound_propagator_factor(q, t0, p.h) * (4.0 * p.h / p.gamma) /
                        sqrt_fn(cplx(0.0, 2.0 * std::numbers::pi * p.h) * (tf - t0)) *
                        std::exp(cplx(0.0, 1.0 / p.h) * volkov_action(0.0, tf, 0.0, t0));
  const double dev = std::abs(composed - amp.packet_terms.front().value) / std::abs(amp.packet_terms.front().value);
  return {"branch convention", dev < 1e-10, "relative deviation " + format_number(dev)};
}

inline std::vector<CheckResult> run_selfcheck(const RunConfig& cfg) {
  std::vector<CheckResult> results;
  const auto record = [&](const std::string& name, const std::function<CheckResult()>& fn) {
    try {
      auto r = fn();
      r.name = name;
      results.push_back(r);
    } catch (const std::exception& e) {
      results.push_back({name, false, e.what()});
    }
  };

  record("parameter round trip", [] {
    double worst = 0.0;
    for (double g : {0.3, 0.7, 1.1, 2.0}) {
      for (double z : {1.0, 10.0, 30.0}) {
        const auto a = from_dimensionless(g, z);
        const auto b = from_physical(a.alpha, a.mu, a.omega);
        worst = std::max({worst, std::abs(b.gamma / g - 1), std::abs(b.z / z - 1), std::abs(b.h / a.h - 1),
                          std::abs(b.n_io / a.n_io - 1)});
      }
    }
    return CheckResult{"", worst < 1e-12, "max relative error " + format_number(worst)};
  });
  record("complex tunneling time", [] {
    double worst = 0.0;
    for (double g = 0.05; g <= 5.0 + 1e-12; g += 0.05) {
      const cplx t0 = tunnel_start_time(g);
      worst = std::max({worst, std::abs(std::cos(t0) - std::sqrt(1.0 + g * g)), std::abs(std::sin(t0) - cplx(0.0, g))});
    }
    return CheckResult{"", worst < 1e-14, "max error " + format_number(worst)};
  });
  record("branch convention", [&] {
    return check_branch(cfg.perturb_branch ? std::function<cplx(cplx)>([](cplx w) { return std::sqrt(w); })
                                           : std::function<cplx(cplx)>(branched_sqrt));
  });
  record("barrier time i pi", [] {
    const auto demo = appendix_c_demo();
    const double dev = std::abs(demo.barrier_time - cplx(0.0, std::numbers::pi));
    return CheckResult{"", dev < 1e-10, "deviation " + format_number(dev)};
  });
  record("saddle point vs quadrature", [] {
    const auto p = from_dimensionless(0.7, 1.0 / (4.0 * 0.0125));
    const double ratio = rate_cycle_averaged(p) / cycle_average_quadrature(p);
    return CheckResult{"", ratio >= 0.9 && ratio <= 1.1, "ratio " + format_number(ratio)};
  });
  record("bound-term rate", [] {
    const auto p = from_dimensionless(0.7, 10.0);
    SemiclassicalOptions opt;
    opt.packets = false;
    const double rel = std::abs(ionization_rate(p, 1, opt) / (2.0 * std::numbers::pi * rate_cycle_averaged(p)) - 1.0);
    return CheckResult{"", rel < 1e-12, "relative deviation " + format_number(rel)};
  });
  record("closed-form action", [] {
    const auto p = from_dimensionless(0.7, 10.0);
    const auto q = quasi_energy_averaged(p);
    const double tf = 2.0 * std::numbers::pi;
    const cplx t0 = tunnel_start_time(p.gamma);
    const auto path = make_path(t0, tf, 0.0, 0.0);
    const cplx zeta = cplx(0.0, 1.0 / p.h) * action_contour(path) - cplx(0.0, 1.0 / p.h) * q.e_m * t0;
    const cplx closed = packet_exponent(p, q, 0, tf);
    const double rel = std::abs(zeta - closed) / std::abs(closed);
    return CheckResult{"", rel < 1e-8, "relative deviation " + format_number(rel)};
  });
  record("oracle field-off unitarity", [] {
    OracleOptions opt;
    opt.drive = 0.0;
    const auto p = from_dimensionless(0.7, 2.0);
    const auto grid = solve_boundary_function(p, 4.0 * std::numbers::pi, opt);
    const double dev = std::abs(std::abs(survival_probability(grid).p) - 1.0);
    return CheckResult{"", dev < 1e-6, "| |p| - 1 | = " + format_number(dev)};
  });
  record("oracle convergence probe", [&] {
    OracleOptions opt;
    opt.dt = cfg.dt;
    opt.dt_divisor = cfg.dt_divisor;
    opt.tolerance = cfg.tolerance;
    opt.self_check = true;
    opt.settle_cycles = 0;
    const auto r = run_oracle(from_dimensionless(0.7, 3.0), 1, opt);
    return CheckResult{"", true,
                       "|p(dt) - p(2dt)| = " + format_number(r.self_check_deviation) + " at dt = " + format_number(r.grid.dt)};
  });
  record("Savitzky-Golay", [&] {
    std::vector<double> cubic;
    std::vector<double> noisy;
    std::mt19937 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int i = 0; i < 200; ++i) {
      const double x = 0.05 * i;
      cubic.push_back(1.0 - 2.0 * x + 0.5 * x * x - 0.1 * x * x * x);
      noisy.push_back(std::sin(x) + noise(rng));
    }
    const auto s = savitzky_golay(cubic, 31, 3);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s[i] - cubic[i]));
    const auto var = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double acc = 0.0;
      for (double x : v) acc += (x - m) * (x - m);
      return acc / static_cast<double>(v.size());
    };
    const bool reduces = var(savitzky_golay(noisy, 31, 3)) < var(noisy);
    return CheckResult{"", worst < 1e-10 && reduces, "cubic error " + format_number(worst)};
  });
  return results;
}

inline int cmd_selfcheck(const RunConfig& cfg, std::ostream& out) {
  const auto results = run_selfcheck(cfg);
  bool all = true;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.pass;
  }
  out << (all ? "all checks passed\n" : "some checks failed\n");
  return all ? kExitOk : kExitNumeric;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Ionization rates of the driven one-dimensional delta atom", "deltaion"};
  app.config_formatter(std::make_shared<ConfigReader>());
  app.set_config("--config", "", "Read options from a key=value or JSON file; command-line flags win");
  app.require_subcommand(1, 1);
  app.fallthrough();

  auto* scan = app.add_subcommand("scan", "Rate scan over z with one engine");
  auto* compare = app.add_subcommand("compare", "Semiclassical and oracle rates on the same grid");
  auto* thresholds = app.add_subcommand("thresholds", "Channel-closing thresholds in a z range");
  auto* demo = app.add_subcommand("demo-appendix-c", "Complex-time barrier traversal demo");
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suite");
  (void)scan;
  (void)compare;
  (void)thresholds;
  (void)demo;
  (void)selfcheck;

  app.add_option("--engine", cfg.engine, "semiclassical or oracle")
      ->check(CLI::IsMember({"semiclassical", "oracle"}))
      ->capture_default_str();
  auto* gamma_opt = app.add_option("--gamma", cfg.gamma, "Fixed Keldysh factor (default 0.7)");
  auto* nio_opt = app.add_option("--n-io", cfg.n_io, "Fixed ionization photon number; gamma follows from z");
  gamma_opt->excludes(nio_opt);
  app.add_option("--z", cfg.z_range, "z range start:stop:step, or a single value")->capture_default_str();
  app.add_option("--cycles", cfg.cycles, "Field cycles n (t_f = 2 pi n)")->capture_default_str();
  app.add_flag("--include-odd", cfg.include_odd, "Include bursts at odd multiples of pi");
  app.add_flag("--field-off", cfg.field_off, "Switch the field off (degenerate check)");
  app.add_option("--dt", cfg.dt, "Oracle time step; 0 uses min(2 pi, h/gamma^2)/divisor")->capture_default_str();
  app.add_option("--dt-divisor", cfg.dt_divisor, "Divisor of the default oracle step")->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "Oracle self-check tolerance on |p|")->capture_default_str();
  app.add_option("--settle-cycles", cfg.settle_cycles, "Oracle cycles discarded before measuring decay")
      ->capture_default_str();
  app.add_flag("--self-check", cfg.self_check, "Re-solve every oracle point at 2 dt and compare");
  app.add_option("--sg-window", cfg.sg_window, "Savitzky-Golay window (odd sample count)")->capture_default_str();
  app.add_option("--sg-order", cfg.sg_order, "Savitzky-Golay polynomial order")->capture_default_str();
  app.add_option("--prominence", cfg.prominence, "Peak prominence as a fraction of the local range")
      ->capture_default_str();
  app.add_option("--range-half-width", cfg.range_half_width, "Samples on each side defining the local range")
      ->capture_default_str();
  app.add_option("--output-dir", cfg.output_dir, std::string("Output directory (default $") + kOutputDirEnv + " or .)");
  app.add_option("--output", cfg.output, "Output file stem (default: the command name)");
  app.add_option("--format", cfg.format, "csv (data + JSON metadata) or json (one document)")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "Concurrent sample evaluations")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for randomized self-checks")->capture_default_str();
  app.add_option("--checkpoint-dir", cfg.checkpoint_dir, "Keep oracle grids here and reuse them on rerun");
  app.add_option("--centers", cfg.centers, "compare: window centres (default: range midpoint)")->delimiter(',');
  app.add_flag("--debug-perturb-branch", cfg.perturb_branch, "selfcheck: use the principal root (negative control)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    detail::validate(cfg, err);
    if (cfg.command == "scan") return detail::cmd_scan(cfg, out, err);
    if (cfg.command == "compare") return detail::cmd_compare(cfg, out, err);
    if (cfg.command == "thresholds") return detail::cmd_thresholds(cfg, out);
    if (cfg.command == "demo-appendix-c") return detail::cmd_demo(out);
    return detail::cmd_selfcheck(cfg, out);
  } catch (const domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace deltaion::cli
