#pragma once

// CSV and JSON writers for rate scans and method comparisons.  Output depends
// only on the data: numbers use fixed printf formats, JSON objects are
// key-sorted, and nothing time- or host-dependent is recorded.  Column and key
// layouts are documented in docs/formats.md.

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "deltaion/analysis.hpp"
#include "deltaion/errors.hpp"

namespace deltaion {

inline constexpr int kOutputSchemaVersion = 1;

using json = nlohmann::json;

/// %.17g, which round-trips every double.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_scan_csv(std::ostream& out, const RateScan& scan) {
  out << "z,gamma_param,Gamma_raw,Gamma_smooth,is_peak,nearest_threshold_k\n";
  std::vector<bool> is_peak(scan.z_values.size(), false);
  for (auto i : scan.peak_indices) is_peak[i] = true;
  for (std::size_t i = 0; i < scan.z_values.size(); ++i) {
    out << format_number(scan.z_values[i]) << ',' << format_number(scan.gamma_param[i]) << ','
        << format_number(scan.gamma_raw[i]) << ',';
    if (scan.gamma_smooth) out << format_number((*scan.gamma_smooth)[i]);
    out << ',' << (is_peak[i] ? 1 : 0) << ',' << nearest_threshold_k(scan.mode, scan.fixed_value, scan.z_values[i])
        << '\n';
  }
}

inline json filter_json(const FilterSettings& f) {
  return {{"window", f.window}, {"order", f.order}, {"prominence", f.prominence},
          {"range_half_width", f.range_half_width}};
}

inline json engine_json(const EngineConfig& cfg) {
  json j;
  j["engine"] = to_string(cfg.engine);
  j["n_cycles"] = cfg.n_cycles;
  j["include_odd"] = cfg.semiclassical.include_odd;
  j["field_off"] = cfg.semiclassical.field_off;
  if (cfg.engine == Engine::oracle) {
    j["oracle"] = {{"dt", cfg.oracle.dt},
                   {"dt_divisor", cfg.oracle.dt_divisor},
                   {"drive", cfg.oracle.drive},
                   {"self_check", cfg.oracle.self_check},
                   {"tolerance", cfg.oracle.tolerance},
                   {"settle_cycles", cfg.oracle.settle_cycles}};
  }
  return j;
}

inline json thresholds_json(const std::vector<Threshold>& thresholds) {
  json arr = json::array();
  for (const auto& t : thresholds) arr.push_back({{"k", t.k}, {"z", t.z}});
  return arr;
}

inline json missing_json(const RateScan& scan) {
  json arr = json::array();
  for (std::size_t i = 0; i < scan.z_values.size(); ++i) {
    if (scan.missing[i]) arr.push_back({{"index", i}, {"z", scan.z_values[i]}, {"error", scan.failures[i]}});
  }
  return arr;
}

/// Threshold spacing of the scan mode: 1/(1 + 2 gamma^2) at fixed gamma, 1 at fixed n_io.
inline double mode_threshold_spacing(ScanMode mode, double fixed_value) {
  return mode == ScanMode::fixed_gamma ? threshold_spacing(fixed_value) : 1.0;
}

/// Full metadata of an analyzed scan.  `period` is the detected modulation
/// period, or empty with `period_error` saying why.
inline json scan_metadata(const RateScan& scan, const EngineConfig& cfg, const std::optional<PeriodEstimate>& period,
                          const std::string& period_error) {
  json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["kind"] = "rate_scan";
  j["config"] = engine_json(cfg);
  j["mode"] = to_string(scan.mode);
  j[scan.mode == ScanMode::fixed_gamma ? "gamma" : "n_io"] = scan.fixed_value;
  j["samples"] = scan.z_values.size();
  j["z_first"] = scan.z_values.front();
  j["z_last"] = scan.z_values.back();
  j["filter"] = scan.filter ? filter_json(*scan.filter) : json(nullptr);
  j["peaks"] = scan.peaks;
  j["thresholds"] = thresholds_json(scan.thresholds);
  j["threshold_spacing"] = mode_threshold_spacing(scan.mode, scan.fixed_value);
  if (period) {
    j["period"] = {{"mean", period->mean}, {"stddev", period->stddev}, {"peaks", period->peaks}};
  } else {
    j["period"] = nullptr;
    j["period_error"] = period_error;
  }
  j["missing"] = missing_json(scan);
  return j;
}

/// Scan as one JSON document: the metadata plus the sample columns.
inline json scan_document(const RateScan& scan, const json& metadata) {
  json j = metadata;
  j["z"] = scan.z_values;
  j["gamma_param"] = scan.gamma_param;
  j["Gamma_raw"] = scan.gamma_raw;
  j["Gamma_smooth"] = scan.gamma_smooth ? json(*scan.gamma_smooth) : json(nullptr);
  std::vector<int> flags(scan.z_values.size(), 0);
  for (auto i : scan.peak_indices) flags[i] = 1;
  j["is_peak"] = flags;
  std::vector<int> nearest;
  for (double z : scan.z_values) nearest.push_back(nearest_threshold_k(scan.mode, scan.fixed_value, z));
  j["nearest_threshold_k"] = nearest;
  return j;
}

inline void write_compare_csv(std::ostream& out, const RateScan& semiclassical, const RateScan& oracle) {
  if (semiclassical.z_values != oracle.z_values) throw domain_error("compared scans must share the z grid");
  out << "z,gamma_param,Gamma_semiclassical,Gamma_oracle,oracle_missing\n";
  for (std::size_t i = 0; i < oracle.z_values.size(); ++i) {
    out << format_number(oracle.z_values[i]) << ',' << format_number(oracle.gamma_param[i]) << ','
        << format_number(semiclassical.gamma_raw[i]) << ',' << format_number(oracle.gamma_raw[i]) << ','
        << (oracle.missing[i] ? 1 : 0) << '\n';
  }
}

inline json window_json(const WindowComparison& w) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"center", w.center},
          {"lo", w.lo},
          {"hi", w.hi},
          {"semiclassical_mean", w.reference_mean},
          {"oracle_mean", w.candidate_mean},
          {"ratio", w.ratio},
          {"semiclassical_peak", opt(w.reference_peak)},
          {"oracle_peak", opt(w.candidate_peak)},
          {"peak_offset", opt(w.peak_offset)}};
}

}  // namespace deltaion
