// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-fail N]...
//
// The exit status is non-zero when a criterion's outcome differs from the
// expectation: an unexpected failure, or a criterion listed with --expect-fail
// that passes.  Every line is printed either way.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deltaion/adiabatic.hpp"
#include "deltaion/analysis.hpp"
#include "deltaion/oracle.hpp"
#include "deltaion/semiclassical.hpp"

namespace {

using namespace deltaion;

constexpr double kPi = std::numbers::pi;
constexpr double kGamma = 0.7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

RateScan semiclassical_scan(int n_cycles, double z_lo = 6.0, double z_hi = 20.0, double step = 0.01) {
  EngineConfig cfg;
  cfg.n_cycles = n_cycles;
  return scan_rate(cfg, ScanMode::fixed_gamma, kGamma, linear_range(z_lo, z_hi, step));
}

double background(double z) { return 2.0 * kPi * rate_cycle_averaged(from_dimensionless(kGamma, z)); }

// 1. Modulation period of the n = 1 scan.
Outcome modulation_period_criterion() {
  auto scan = semiclassical_scan(1);
  analyze(scan);
  const auto period = modulation_period(scan);
  const double expected = threshold_spacing(kGamma);
  const double rel = std::abs(period.mean / expected - 1.0);
  return {rel <= 0.02, fmt("mean spacing %.6f from %.0f peaks, expected %.6f, relative deviation %.2e", period.mean,
                           static_cast<double>(period.peaks), expected, rel)};
}

// 2. Bound term reproduces 2 pi Dbar; full curve averaged over one period stays
// within 30 % of it for z >= 8.
Outcome background_criterion() {
  SemiclassicalOptions bound_only;
  bound_only.packets = false;
  double identity_error = 0.0;
  for (double z : linear_range(6.0, 20.0, 0.01)) {
    const auto p = from_dimensionless(kGamma, z);
    identity_error = std::max(identity_error, std::abs(ionization_rate(p, 1, bound_only) / background(z) - 1.0));
  }

  auto scan = semiclassical_scan(1);
  analyze(scan);
  const auto& z = scan.z_values;
  const auto& smooth = *scan.gamma_smooth;
  const double period = threshold_spacing(kGamma);
  std::vector<double> reference;
  for (double v : z) reference.push_back(background(v));
  double worst = 0.0;
  double worst_center = 0.0;
  double last_good_center = 0.0;
  bool still_good = true;
  for (double c = 8.0 + 0.5 * period; c <= 20.0 - 0.5 * period + 1e-9; c += 0.01) {
    const double mean = window_average(z, smooth, c - 0.5 * period, c + 0.5 * period);
    const double ref = window_average(z, reference, c - 0.5 * period, c + 0.5 * period);
    const double dev = std::abs(mean / ref - 1.0);
    if (dev > worst) {
      worst = dev;
      worst_center = c;
    }
    if (still_good && dev <= 0.3) last_good_center = c;
    if (dev > 0.3) still_good = false;
  }
  const bool pass = identity_error <= 1e-12 && worst <= 0.3;
  return {pass, fmt("bound-term identity error %.1e; window means within 30%% up to centre z = %.2f, "
                    "worst deviation %.0f%% at z = %.2f",
                    identity_error, last_good_center, 100.0 * worst, worst_center)};
}

// 3. Closed-form packet exponent against contour-integrated action.
Outcome closed_form_action_criterion() {
  double worst = 0.0;
  for (double gamma : {0.7, 1.1}) {
    for (double z : {5.0, 10.0}) {
      const auto p = from_dimensionless(gamma, z);
      const auto q = quasi_energy_averaged(p);
      const cplx t0 = tunnel_start_time(gamma);
      const double tf = 4.0 * kPi;
      for (int k = 0; k <= 3; ++k) {
        const cplx start = t0 + static_cast<double>(k) * kPi;
        const cplx contour = cplx(0.0, 1.0 / p.h) * (action_contour(make_path(start, tf, 0.0, 0.0)) - q.e_m * start);
        const cplx closed = packet_exponent(p, q, k, tf);
        worst = std::max(worst, std::abs(closed - contour) / std::abs(contour));
      }
    }
  }
  return {worst <= 1e-8, fmt("max relative error %.2e over 16 cases (t_f = 4 pi)", worst)};
}

// 4. Complex-time identities and the Appendix C barrier time.
Outcome complex_time_criterion() {
  double worst = 0.0;
  for (int i = 1; i <= 5000; ++i) {
    const double g = 5.0 * i / 5000.0;
    const cplx t0 = tunnel_start_time(g);
    const double c = std::sqrt(1.0 + g * g);
    worst = std::max({worst, std::abs(std::cos(t0) - c) / c, std::abs(std::sin(t0) - cplx(0.0, g)) / std::max(1.0, g)});
  }
  const auto demo = appendix_c_demo();
  const double barrier = std::abs(demo.barrier_time - cplx(0.0, kPi));
  return {worst <= 1e-14 && barrier <= 1e-10,
          fmt("max identity error %.1e over gamma in (0, 5]; |T_barrier - i pi| = %.1e", worst, barrier)};
}

// 5. Saddle-point average against adaptive quadrature.
Outcome saddle_point_criterion() {
  std::vector<double> ratios;
  for (double h : {0.05, 0.025, 0.0125}) {
    const auto p = from_dimensionless(kGamma, 1.0 / (4.0 * h));
    ratios.push_back(rate_cycle_averaged(p) / cycle_average_quadrature(p));
  }
  const bool monotone =
      std::abs(ratios[2] - 1.0) < std::abs(ratios[1] - 1.0) && std::abs(ratios[1] - 1.0) < std::abs(ratios[0] - 1.0);
  const bool pass = ratios[2] >= 0.9 && ratios[2] <= 1.1 && monotone;
  return {pass, fmt("ratio %.6f, %.6f, %.6f at h = 0.05, 0.025, 0.0125", ratios[0], ratios[1], ratios[2])};
}

// 6. Oracle sanity: unitarity without field, stable convergence order, w <= 1 + 10 tol.
Outcome oracle_sanity_criterion() {
  const OracleOptions defaults;
  double w_max = 0.0;

  OracleOptions off;
  off.drive = 0.0;
  const auto off_grid = solve_boundary_function(from_dimensionless(kGamma, 2.0), 20.0 * kPi, off);
  double unitarity = 0.0;
  for (const auto& s : cycle_survivals(off_grid)) {
    unitarity = std::max(unitarity, std::abs(std::abs(s.p) - 1.0));
    w_max = std::max(w_max, s.w);
  }

  std::vector<double> orders;
  for (const auto& [gamma, z] : std::vector<std::pair<double, double>>{{0.7, 3.0}, {1.1, 2.0}, {0.5, 5.0}, {0.7, 6.0}}) {
    std::vector<cplx> values;
    for (double divisor : {5.0, 10.0, 20.0}) {
      OracleOptions opt;
      opt.dt_divisor = divisor;
      const auto grid = solve_boundary_function(from_dimensionless(gamma, z), 2.0 * kPi, opt);
      for (const auto& s : cycle_survivals(grid)) w_max = std::max(w_max, s.w);
      values.push_back(survival_probability(grid).p);
    }
    orders.push_back(std::log2(std::abs(values[0] - values[1]) / std::abs(values[1] - values[2])));
  }
  const auto [lo, hi] = std::minmax_element(orders.begin(), orders.end());
  const bool stable = *hi - *lo < 0.4 && *lo > 1.0;
  const double bound = 1.0 + 10.0 * defaults.tolerance;
  const bool pass = unitarity <= 1e-6 && stable && w_max <= bound;
  return {pass, fmt("field-off max ||p| - 1| = %.1e over 10 cycles; empirical order %.2f to %.2f; max w = %.9f",
                    unitarity, *lo, *hi, w_max)};
}

// 7. Oracle and semiclassical rates over one modulation window around z_c.
Outcome cross_method_criterion() {
  const double period = threshold_spacing(kGamma);
  const double step = 0.05;
  const int window = static_cast<int>(std::lround(period / step)) | 1;
  bool pass = true;
  std::ostringstream detail;
  OracleOptions opt;  // one settle cycle, default step
  for (double zc : {8.0, 10.0, 12.0, 14.0}) {
    const auto z = linear_range(zc - 0.6, zc + 0.6, step);
    std::vector<double> semi1, semi2, oracle1, oracle2;
    for (double v : z) {
      const auto p = from_dimensionless(kGamma, v);
      semi1.push_back(ionization_rate(p, 1));
      semi2.push_back(ionization_rate(p, 2));
      const auto grid = solve_boundary_function(p, 2.0 * kPi * (opt.settle_cycles + 2), opt);
      const auto w = cycle_survivals(grid);
      oracle1.push_back(rate_between(w[1], w[2], 1));
      oracle2.push_back(rate_between(w[1], w[3], 2));
    }
    for (int n : {1, 2}) {
      const auto& s = n == 1 ? semi1 : semi2;
      const auto& o = n == 1 ? oracle1 : oracle2;
      const auto means = compare_window(z, s, o, zc, period);
      const auto peaks =
          compare_window(z, savitzky_golay(s, window, 3), savitzky_golay(o, window, 3), zc, period);
      const bool ratio_ok = means.ratio >= 0.5 && means.ratio <= 2.0;
      const bool peak_ok = peaks.peak_offset && std::abs(*peaks.peak_offset) <= 0.1;
      pass = pass && ratio_ok && peak_ok;
      detail << " z=" << zc << ",n=" << n << ": ratio " << fmt("%.3f", means.ratio) << " offset "
             << (peaks.peak_offset ? fmt("%+.3f", *peaks.peak_offset) : std::string("none")) << ";";
    }
  }
  std::string text = detail.str();
  if (!text.empty()) text.pop_back();
  return {pass, text.substr(1)};
}

// 8. The semiclassical rate stays finite and continuous through every threshold.
Outcome threshold_regularity_criterion() {
  const auto scan = semiclassical_scan(1);
  const double grid_max = *std::max_element(scan.gamma_raw.begin(), scan.gamma_raw.end(),
                                            [](double a, double b) { return std::abs(a) < std::abs(b); });
  double max_abs = 0.0;
  double max_jump = 0.0;
  bool finite = true;
  for (const auto& t : scan.thresholds) {
    for (double eps : {0.0, 1e-12, 1e-9, 1e-6}) {
      for (double sign : {-1.0, 1.0}) {
        const double r = ionization_rate(from_dimensionless(kGamma, t.z + sign * eps), 1);
        finite = finite && std::isfinite(r);
        max_abs = std::max(max_abs, std::abs(r));
      }
    }
    const double below = ionization_rate(from_dimensionless(kGamma, t.z - 1e-9), 1);
    const double above = ionization_rate(from_dimensionless(kGamma, t.z + 1e-9), 1);
    const double scale = std::abs(ionization_rate(from_dimensionless(kGamma, t.z), 1)) + background(t.z);
    max_jump = std::max(max_jump, std::abs(above - below) / scale);
  }
  const bool pass = finite && max_abs <= 2.0 * std::abs(grid_max) && max_jump < 1e-6;
  return {pass, fmt("%.0f thresholds; max |Gamma| near thresholds %.3e (scan max %.3e); max relative jump across "
                    "z_k +- 1e-9: %.1e",
                    static_cast<double>(scan.thresholds.size()), max_abs, std::abs(grid_max), max_jump)};
}

// 9. Two cycles show more fine structure than one.
Outcome fine_structure_criterion() {
  const auto one = semiclassical_scan(1);
  const auto two = semiclassical_scan(2);
  const double span = one.z_values.back() - one.z_values.front();
  const double density1 = static_cast<double>(count_local_extrema(one.gamma_raw)) / span;
  const double density2 = static_cast<double>(count_local_extrema(two.gamma_raw)) / span;
  return {density2 > density1, fmt("local extrema per unit z: n=1 %.3f, n=2 %.3f", density1, density2)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected_failures;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      expected_failures.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"modulation period", modulation_period_criterion},
      {"background identity", background_criterion},
      {"closed-form action", closed_form_action_criterion},
      {"complex-time identities", complex_time_criterion},
      {"saddle-point consistency", saddle_point_criterion},
      {"oracle sanity", oracle_sanity_criterion},
      {"cross-method agreement", cross_method_criterion},
      {"threshold regularity", threshold_regularity_criterion},
      {"fine structure", fine_structure_criterion},
  };

  int surprises = 0;
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expect_fail = expected_failures.count(number) > 0;
    if (outcome.pass) ++passed;
    if (outcome.pass == expect_fail) ++surprises;
    std::printf("%s criterion %d (%s): %s [%.1f s]%s\n", outcome.pass ? "PASS" : "FAIL", number,
                criteria[i].first.c_str(), outcome.detail.c_str(), seconds,
                expect_fail ? (outcome.pass ? " (listed as expected failure)" : " (expected failure)") : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", passed, criteria.size());
  return surprises == 0 ? 0 : 1;
}
