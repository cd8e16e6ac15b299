#pragma once

// Rate curves over z: sampling with either engine, Savitzky-Golay smoothing,
// peak detection, the modulation period, channel thresholds in the scanned
// range, and the complex-time barrier demonstration.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "deltaion/errors.hpp"
#include "deltaion/model.hpp"
#include "deltaion/oracle.hpp"
#include "deltaion/quadrature.hpp"
#include "deltaion/semiclassical.hpp"

namespace deltaion {

enum class Engine { semiclassical, oracle };
enum class ScanMode { fixed_gamma, fixed_n_io };

inline const char* to_string(Engine e) { return e == Engine::semiclassical ? "semiclassical" : "oracle"; }
inline const char* to_string(ScanMode m) { return m == ScanMode::fixed_gamma ? "fixed-gamma" : "fixed-n_io"; }

/// Values start, start + step, ... up to stop; a point is kept while it lies below
/// stop + step/2, so a stop that is a whole number of steps away is included
/// despite rounding.
inline std::vector<double> linear_range(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw domain_error("range step must be positive");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw domain_error("range bounds must be finite");
  if (stop < start) throw domain_error("empty range: stop lies below start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

struct EngineConfig {
  Engine engine = Engine::semiclassical;
  int n_cycles = 1;
  SemiclassicalOptions semiclassical{};
  OracleOptions oracle{};
};

inline double evaluate_rate(const ModelParams& p, const EngineConfig& cfg) {
  if (cfg.engine == Engine::semiclassical) return ionization_rate(p, cfg.n_cycles, cfg.semiclassical);
  return rate_from_oracle(p, cfg.n_cycles, cfg.oracle);
}

/// Keldysh factor at z for the given scan mode; fixed n_io means gamma = sqrt(n_io / (2z)).
inline double scan_gamma(ScanMode mode, double fixed_value, double z) {
  if (mode == ScanMode::fixed_gamma) return fixed_value;
  if (!(z > 0.0)) throw domain_error("z must be positive");
  return std::sqrt(fixed_value / (2.0 * z));
}

struct Threshold {
  int k = 0;
  double z = 0.0;
};

/// Channel closings z_k inside [z_lo, z_hi].  At fixed gamma they sit at
/// k/(1 + 2 gamma^2); at fixed n_io the balance k - n_io - z = 0 puts them at
/// k - n_io, one unit apart.
inline std::vector<Threshold> thresholds_in_range(ScanMode mode, double fixed_value, double z_lo, double z_hi) {
  std::vector<Threshold> out;
  if (mode == ScanMode::fixed_gamma) {
    const double spacing = threshold_spacing(fixed_value);
    for (int k = std::max(1, static_cast<int>(std::ceil(z_lo / spacing - 1e-9))); k * spacing <= z_hi + 1e-12; ++k) {
      out.push_back({k, channel_threshold(k, fixed_value)});
    }
  } else {
    for (int k = std::max(1, static_cast<int>(std::ceil(z_lo + fixed_value - 1e-9)));
         k - fixed_value <= z_hi + 1e-12; ++k) {
      if (k - fixed_value > 0.0) out.push_back({k, k - fixed_value});
    }
  }
  return out;
}

/// Photon number k of the threshold closest to z.
inline int nearest_threshold_k(ScanMode mode, double fixed_value, double z) {
  const double scaled = mode == ScanMode::fixed_gamma ? z / threshold_spacing(fixed_value) : z + fixed_value;
  return std::max(1, static_cast<int>(std::lround(scaled)));
}

struct FilterSettings {
  int window = 31;
  int order = 3;
  double prominence = 0.05;  ///< fraction of the local dynamic range
  int range_half_width = 50;  ///< samples on each side defining "local"
};

struct RateScan {
  Engine engine = Engine::semiclassical;
  ScanMode mode = ScanMode::fixed_gamma;
  double fixed_value = 0.0;  ///< gamma or n_io, depending on mode
  int n_cycles = 1;
  std::vector<double> z_values;
  std::vector<double> gamma_param;  ///< Keldysh factor at each z
  std::vector<double> gamma_raw;
  std::vector<bool> missing;        ///< sample failed and was interpolated
  std::vector<std::string> failures;
  std::optional<std::vector<double>> gamma_smooth;
  std::optional<FilterSettings> filter;
  std::vector<std::size_t> peak_indices;
  std::vector<double> peaks;  ///< refined z positions of the maxima
  std::vector<Threshold> thresholds;

  std::size_t missing_count() const { return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true)); }
};

namespace detail {

/// Fills failed samples by linear interpolation between the nearest good ones
/// (constant continuation at the ends).
inline void fill_missing(std::vector<double>& x, const std::vector<double>& grid, const std::vector<bool>& missing) {
  const std::size_t n = x.size();
  if (std::all_of(missing.begin(), missing.end(), [](bool m) { return m; })) {
    throw numeric_error("every sample of the scan failed");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!missing[i]) continue;
    std::optional<std::size_t> left;
    std::optional<std::size_t> right;
    for (std::size_t j = i; j-- > 0;) {
      if (!missing[j]) {
        left = j;
        break;
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!missing[j]) {
        right = j;
        break;
      }
    }
    if (left && right) {
      const double s = (grid[i] - grid[*left]) / (grid[*right] - grid[*left]);
      x[i] = (1.0 - s) * x[*left] + s * x[*right];
    } else {
      x[i] = x[left ? *left : *right];
    }
  }
}

}  // namespace detail

/// Evaluates the rate at every z.  Failures do not stop the scan: the sample is
/// flagged, its message kept, and the value interpolated from its neighbours.
/// `threads` > 1 evaluates samples concurrently; results do not depend on it.
using RateEvaluator = std::function<double(const ModelParams&)>;

inline RateScan scan_rate(const RateEvaluator& evaluate, Engine engine, int n_cycles, ScanMode mode,
                          double fixed_value, std::vector<double> z_values, unsigned threads = 1) {
  if (z_values.empty()) throw domain_error("scan needs at least one z value");
  for (std::size_t i = 0; i < z_values.size(); ++i) {
    if (!(z_values[i] > 0.0)) throw domain_error("z values must be positive");
    if (i > 0 && !(z_values[i] > z_values[i - 1])) throw domain_error("z values must be strictly increasing");
  }
  if (!(fixed_value > 0.0)) throw domain_error(mode == ScanMode::fixed_gamma ? "gamma must be positive" : "n_io must be positive");
  if (n_cycles < 1) throw domain_error("number of cycles must be >= 1");

  RateScan scan;
  scan.engine = engine;
  scan.mode = mode;
  scan.fixed_value = fixed_value;
  scan.n_cycles = n_cycles;
  scan.z_values = std::move(z_values);
  const std::size_t n = scan.z_values.size();
  scan.gamma_param.resize(n);
  scan.gamma_raw.assign(n, 0.0);
  scan.missing.assign(n, false);
  scan.failures.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) scan.gamma_param[i] = scan_gamma(mode, fixed_value, scan.z_values[i]);

  std::vector<char> failed(n, 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const double rate = evaluate(from_dimensionless(scan.gamma_param[i], scan.z_values[i]));
        if (!std::isfinite(rate)) throw numeric_error("non-finite rate");
        scan.gamma_raw[i] = rate;
      } catch (const std::exception& e) {
        failed[i] = 1;
        scan.failures[i] = e.what();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) scan.missing[i] = failed[i] != 0;
  if (scan.missing_count() == n) throw numeric_error("every sample of the scan failed; first error: " + scan.failures[0]);
  if (scan.missing_count() > 0) detail::fill_missing(scan.gamma_raw, scan.z_values, scan.missing);
  scan.thresholds = thresholds_in_range(mode, fixed_value, scan.z_values.front(), scan.z_values.back());
  return scan;
}

inline RateScan scan_rate(const EngineConfig& cfg, ScanMode mode, double fixed_value, std::vector<double> z_values,
                          unsigned threads = 1) {
  const RateEvaluator evaluate = [&cfg](const ModelParams& p) { return evaluate_rate(p, cfg); };
  return scan_rate(evaluate, cfg.engine, cfg.n_cycles, mode, fixed_value, std::move(z_values), threads);
}

/// Least-squares polynomial smoothing over a sliding window.  Near the ends the
/// window is shifted inward (kept at full length when the series allows) and the
/// polynomial refit there is evaluated at the off-centre point.
inline std::vector<double> savitzky_golay(const std::vector<double>& series, int window, int order) {
  if (window < 1 || window % 2 == 0) throw domain_error("Savitzky-Golay window must be a positive odd count");
  if (order < 0 || order >= window) throw domain_error("Savitzky-Golay order must lie in [0, window)");
  const int n = static_cast<int>(series.size());
  if (n == 0) return {};
  const int width = std::min(window, n);
  const int degree = std::min(order, width - 1);
  const int half = window / 2;

  // Row of (V^T V)^-1 V^T giving the fitted value at local position `at`.
  const auto coefficients = [degree, width](int at) {
    Eigen::MatrixXd v(width, degree + 1);
    const double scale = std::max(1.0, 0.5 * (width - 1));
    for (int r = 0; r < width; ++r) {
      double power = 1.0;
      for (int c = 0; c <= degree; ++c) {
        v(r, c) = power;
        power *= (r - at) / scale;
      }
    }
    // Evaluating the fit at local position `at` picks the constant coefficient.
    const Eigen::MatrixXd pinv = v.completeOrthogonalDecomposition().pseudoInverse();
    return Eigen::VectorXd(pinv.row(0).transpose());
  };

  std::vector<double> out(series.size());
  std::optional<Eigen::VectorXd> centred;
  for (int i = 0; i < n; ++i) {
    int start = i - half;
    start = std::clamp(start, 0, n - width);
    const int at = i - start;
    Eigen::VectorXd c;
    if (width == window && at == half) {
      if (!centred) centred = coefficients(half);
      c = *centred;
    } else {
      c = coefficients(at);
    }
    double value = 0.0;
    for (int r = 0; r < width; ++r) value += c[r] * series[start + r];
    out[i] = value;
  }
  return out;
}

/// Prominence of the maximum at index i: height above the higher of the two
/// lowest points reached before climbing to a higher sample (or the edge).
inline double peak_prominence(const std::vector<double>& y, std::size_t i) {
  double left_min = y[i];
  for (std::size_t j = i; j-- > 0;) {
    if (y[j] > y[i]) break;
    left_min = std::min(left_min, y[j]);
  }
  double right_min = y[i];
  for (std::size_t j = i + 1; j < y.size(); ++j) {
    if (y[j] > y[i]) break;
    right_min = std::min(right_min, y[j]);
  }
  return y[i] - std::max(left_min, right_min);
}

/// Interior local maxima whose prominence reaches `fraction` of the dynamic range
/// (max - min) within +-half_width samples.  Flat tops count once, at their
/// middle.
inline std::vector<std::size_t> find_peaks(const std::vector<double>& y, double fraction = 0.05, int half_width = 50) {
  if (fraction < 0.0) throw domain_error("prominence fraction must be non-negative");
  if (half_width < 1) throw domain_error("local range half width must be >= 1");
  std::vector<std::size_t> out;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end + 1 < n && y[end + 1] == y[i]) ++end;
    if (end + 1 < n && y[end + 1] < y[i]) {
      const std::size_t mid = (i + end) / 2;
      const std::size_t lo = mid > static_cast<std::size_t>(half_width) ? mid - half_width : 0;
      const std::size_t hi = std::min(n - 1, mid + static_cast<std::size_t>(half_width));
      const auto [mn, mx] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(lo),
                                                y.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
      const double range = *mx - *mn;
      if (range > 0.0 && peak_prominence(y, mid) >= fraction * range) out.push_back(mid);
    }
    i = end + 1;
  }
  return out;
}

/// Vertex of the parabola through the three samples around index i.
inline double refine_peak(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return x[i];
  const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
  if (!(curvature < 0.0)) return x[i];
  const double shift = 0.5 * (y[i - 1] - y[i + 1]) / curvature;
  const double step = 0.5 * (x[i + 1] - x[i - 1]);
  return x[i] + std::clamp(shift, -0.5, 0.5) * step;
}

/// Smooths the raw curve and detects its peaks on the smoothed series.
inline void analyze(RateScan& scan, const FilterSettings& settings = {}) {
  scan.gamma_smooth = savitzky_golay(scan.gamma_raw, settings.window, settings.order);
  scan.filter = settings;
  scan.peak_indices = find_peaks(*scan.gamma_smooth, settings.prominence, settings.range_half_width);
  scan.peaks.clear();
  for (auto i : scan.peak_indices) scan.peaks.push_back(refine_peak(scan.z_values, *scan.gamma_smooth, i));
}

struct PeriodEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t peaks = 0;
};

/// Mean and standard deviation of the spacing between detected peaks.
inline PeriodEstimate modulation_period(const std::vector<double>& peaks) {
  if (peaks.size() < 4) {
    throw insufficient_data_error("modulation period needs at least 4 peaks, found " + std::to_string(peaks.size()));
  }
  PeriodEstimate out;
  out.peaks = peaks.size();
  const std::size_t m = peaks.size() - 1;
  for (std::size_t i = 0; i < m; ++i) out.mean += peaks[i + 1] - peaks[i];
  out.mean /= static_cast<double>(m);
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) var += std::pow(peaks[i + 1] - peaks[i] - out.mean, 2);
  out.stddev = m > 1 ? std::sqrt(var / static_cast<double>(m - 1)) : 0.0;
  return out;
}

inline PeriodEstimate modulation_period(const RateScan& scan) {
  if (!scan.gamma_smooth) throw domain_error("scan has not been analyzed; call analyze() first");
  return modulation_period(scan.peaks);
}

/// Number of sign changes of consecutive differences (flat steps skipped).
inline std::size_t count_local_extrema(const std::vector<double>& y) {
  std::size_t count = 0;
  int last = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double d = y[i] - y[i - 1];
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++count;
    last = sign;
  }
  return count;
}

/// Trapezoidal mean of y over [lo, hi] with linear interpolation between samples.
inline double window_average(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  if (x.size() != y.size() || x.size() < 2) throw domain_error("window average needs matching samples");
  if (!(hi > lo) || lo < x.front() - 1e-12 || hi > x.back() + 1e-12) {
    throw domain_error("averaging window must lie inside the sampled range");
  }
  const auto value_at = [&](double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, x.size() - 1);
    const double s = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - s) * y[j - 1] + s * y[j];
  };
  double area = 0.0;
  double a = lo;
  double fa = value_at(lo);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] <= lo) continue;
    const double b = std::min(x[j], hi);
    const double fb = value_at(b);
    area += 0.5 * (fa + fb) * (b - a);
    a = b;
    fa = fb;
    if (x[j] >= hi) break;
  }
  if (a < hi) area += 0.5 * (fa + value_at(hi)) * (hi - a);
  return area / (hi - lo);
}

/// Two rate curves on a shared z grid compared over one modulation window.
struct WindowComparison {
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double reference_mean = 0.0;  ///< boxcar mean of the reference curve over [lo, hi]
  double candidate_mean = 0.0;
  double ratio = 0.0;           ///< candidate_mean / reference_mean
  std::optional<double> reference_peak;
  std::optional<double> candidate_peak;
  std::optional<double> peak_offset;  ///< candidate_peak - reference_peak
};

namespace detail {

/// Refined position of the largest interior local maximum with x in [lo, hi].
inline std::optional<double> dominant_peak(const std::vector<double>& x, const std::vector<double>& y, double lo,
                                           double hi) {
  std::optional<std::size_t> best;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    if (!(y[i] >= y[i - 1] && y[i] >= y[i + 1])) continue;
    if (!best || y[i] > y[*best]) best = i;
  }
  if (!best) return std::nullopt;
  return refine_peak(x, y, *best);
}

}  // namespace detail

/// Means over [center - period/2, center + period/2] and the offset between the
/// reference's dominant maximum in that window and the candidate's dominant
/// maximum within half a period of it.
inline WindowComparison compare_window(const std::vector<double>& z, const std::vector<double>& reference,
                                       const std::vector<double>& candidate, double center, double period) {
  if (z.size() != reference.size() || z.size() != candidate.size()) {
    throw domain_error("compared curves must share the z grid");
  }
  if (!(period > 0.0)) throw domain_error("modulation period must be positive");
  WindowComparison out;
  out.center = center;
  out.lo = center - 0.5 * period;
  out.hi = center + 0.5 * period;
  out.reference_mean = window_average(z, reference, out.lo, out.hi);
  out.candidate_mean = window_average(z, candidate, out.lo, out.hi);
  out.ratio = out.candidate_mean / out.reference_mean;
  out.reference_peak = detail::dominant_peak(z, reference, out.lo, out.hi);
  if (out.reference_peak) {
    out.candidate_peak =
        detail::dominant_peak(z, candidate, *out.reference_peak - 0.5 * period, *out.reference_peak + 0.5 * period);
    if (out.candidate_peak) out.peak_offset = *out.candidate_peak - *out.reference_peak;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tunneling through the inverted oscillator V = -x^2/2 at energy E = -1/2.

struct BarrierDemo {
  cplx barrier_time;         ///< int_{-1}^{1} dx / sqrt(2E + x^2); i pi on the decaying branch
  double allowed_time = 0.0;  ///< same integral over [-cosh 2, -1]: real, equal to 2
  double continuation_error = 0.0;  ///< max |x(t + i pi) - cosh t| with x(t) = -cosh t, over t in [0, 3]
};

/// The barrier integral is taken in x = -cos(theta), which removes the
/// square-root end singularities.  Inside the barrier 2E + x^2 is negative and
/// the root is taken just below the cut, -i sqrt(1 - x^2), which is the branch
/// of exponentially decaying solutions.
inline BarrierDemo appendix_c_demo() {
  constexpr double energy = -0.5;
  const auto& gl = GaussLegendre<20>::instance();
  BarrierDemo out;
  const double pi = std::numbers::pi;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double theta = 0.5 * pi * (1.0 + gl.nodes[q]);
    const double x = -std::cos(theta);
    const cplx root = std::sqrt(cplx(2.0 * energy + x * x, -0.0));
    out.barrier_time += 0.5 * pi * gl.weights[q] * std::sin(theta) / root;
  }
  // Allowed side: x = -cosh(s), s in [0, 2], so dx / sqrt(x^2 - 1) = -ds in the
  // direction of increasing x; the elapsed time runs from -cosh 2 up to -1.
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double s = 1.0 + gl.nodes[q];
    const double x = -std::cosh(s);
    const double root = std::sqrt(2.0 * energy + x * x);
    out.allowed_time += gl.weights[q] * std::sinh(s) / root;
  }
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.01 * i;
    const cplx x = -std::cosh(cplx(t, pi));
    out.continuation_error = std::max(out.continuation_error, std::abs(x - std::cosh(t)));
  }
  return out;
}

}  // namespace deltaion
