#pragma once

// Semiclassical survival amplitude built from complex-time tunneling paths.
//
// An electron leaves the bound state at each field maximum t = k pi through the
// complex start time k pi + t0, t0 = i asinh(gamma), and then moves on the
// classical path of the field-only Lagrangian L0 = xdot^2/2 + x cos t.  The
// survival amplitude after n full cycles is the bound-state phase plus one
// interfering wave-packet term per burst:
//
//   p = exp(-(i/h) E t_f) + sum_k  A_k exp(zeta_k),      t_f = 2 n pi.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "deltaion/adiabatic.hpp"
#include "deltaion/errors.hpp"
#include "deltaion/model.hpp"
#include "deltaion/volkov.hpp"

namespace deltaion {

// ---------------------------------------------------------------------------
// Square-root sheet for complex durations:
//   sqrt(r e^{i phi}) = -sqrt(r) e^{i phi/2},  phi in [0, 2 pi).

inline cplx branched_sqrt(cplx w) {
  double phi = std::arg(w);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return -std::sqrt(std::abs(w)) * std::exp(cplx(0.0, 0.5 * phi));
}

/// Start of the tunneling segment, i asinh(gamma).
inline cplx tunnel_start_time(double gamma) {
  if (gamma < 0.0) throw domain_error("gamma must be non-negative");
  return {0.0, std::asinh(gamma)};
}

// ---------------------------------------------------------------------------
// Paths.

enum class PathKind { classical, tunneling };

/// Solution of xddot = cos t: x(t) = -cos t + cos(t_start) + y + v0 (t - t_start).
struct ComplexPath {
  cplx t_start{};
  cplx t_end{};
  cplx y{};
  cplx x{};
  cplx v0{};
  PathKind kind = PathKind::classical;

  cplx position(cplx t) const { return -std::cos(t) + std::cos(t_start) + y + v0 * (t - t_start); }
  cplx velocity(cplx t) const { return std::sin(t) + v0; }
};

inline ComplexPath make_path(cplx t_start, cplx t_end, cplx y, cplx x) {
  if (t_start == t_end) throw domain_error("degenerate path: start and end times coincide");
  ComplexPath path;
  path.t_start = t_start;
  path.t_end = t_end;
  path.y = y;
  path.x = x;
  path.v0 = (x - y + std::cos(t_end) - std::cos(t_start)) / (t_end - t_start);
  const bool real_times = t_start.imag() == 0.0 && t_end.imag() == 0.0;
  const bool real_ends = y.imag() == 0.0 && x.imag() == 0.0;
  path.kind = real_times && real_ends ? PathKind::classical : PathKind::tunneling;
  return path;
}

/// Field-only Lagrangian xdot^2/2 + x cos t along the path.
inline cplx lagrangian(const ComplexPath& path, cplx t) {
  const cplx v = path.velocity(t);
  return 0.5 * v * v + path.position(t) * std::cos(t);
}

/// Closed-form action of the path.
inline cplx action(const ComplexPath& path) { return volkov_action(path.x, path.t_end, path.y, path.t_start); }

/// Action by Gauss-Legendre quadrature of L0 along a polyline in complex time.
/// The polyline runs t_start -> waypoints... -> t_end; every leg is split into
/// `panels` panels.
inline cplx action_contour(const ComplexPath& path, std::span<const cplx> waypoints = {}, int panels = 64) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  std::vector<cplx> corners;
  corners.push_back(path.t_start);
  corners.insert(corners.end(), waypoints.begin(), waypoints.end());
  corners.push_back(path.t_end);
  cplx total = 0.0;
  for (std::size_t leg = 0; leg + 1 < corners.size(); ++leg) {
    const cplx a = corners[leg];
    const cplx b = corners[leg + 1];
    for (int j = 0; j < panels; ++j) {
      const cplx pa = a + (b - a) * (static_cast<double>(j) / panels);
      const cplx pb = a + (b - a) * (static_cast<double>(j + 1) / panels);
      const cplx half = 0.5 * (pb - pa);
      const cplx mid = 0.5 * (pa + pb);
      const auto on_leg = [&](double s) { return lagrangian(path, mid + half * s); };
      // Boost's rule takes a real integrand; integrate real and imaginary parts.
      const double re = rule::integrate([&](double s) { return on_leg(s).real(); }, -1.0, 1.0);
      const double im = rule::integrate([&](double s) { return on_leg(s).imag(); }, -1.0, 1.0);
      total += half * cplx(re, im);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Phase picked up at crossings of the delta potential:
//   phi = int delta(x(t)) dt = sum over crossings 1/|xdot|.

namespace detail {

inline constexpr double kBracketStep = 2.0 * std::numbers::pi * 1e-3;
inline constexpr double kRootTolerance = 1e-12;
inline constexpr double kTangentialSlope = 1e-9;

}  // namespace detail

inline double delta_phase(const std::function<double(double)>& position,
                          const std::function<double(double)>& velocity, double t_start, double t_end) {
  if (!(t_end > t_start)) throw domain_error("delta_phase needs t_end > t_start");
  const int samples = std::max(2, static_cast<int>(std::ceil((t_end - t_start) / detail::kBracketStep)));
  const double step = (t_end - t_start) / samples;
  double phase = 0.0;
  // Last sample with a definite sign.  Zeros without a sign change (touch
  // points, zeros at the ends) never open a bracket.
  double t_signed = t_start;
  double x_signed = position(t_start);
  for (int i = 1; i <= samples; ++i) {
    const double t = i == samples ? t_end : t_start + i * step;
    const double x = position(t);
    if (x == 0.0) continue;
    if (x_signed != 0.0 && (x < 0.0) != (x_signed < 0.0)) {
      double a = t_signed;
      double b = t;
      while (b - a > detail::kRootTolerance) {
        const double m = 0.5 * (a + b);
        const double xm = position(m);
        if (xm != 0.0 && (xm < 0.0) == (x_signed < 0.0)) {
          a = m;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      const double slope = std::abs(velocity(root));
      if (slope < detail::kTangentialSlope) {
        throw numeric_error("non-transversal crossing of the origin at t = " + std::to_string(root));
      }
      phase += 1.0 / slope;
    }
    t_signed = t;
    x_signed = x;
  }
  return phase;
}

inline double delta_phase(const ComplexPath& path) {
  if (path.kind != PathKind::classical) throw domain_error("delta_phase needs a real classical path");
  return delta_phase([&](double t) { return path.position(t).real(); },
                     [&](double t) { return path.velocity(t).real(); }, path.t_start.real(), path.t_end.real());
}

// ---------------------------------------------------------------------------
// Propagator.

/// Semiclassical propagator U^V exp(i gamma phi).
///
/// Real start time: principal 1/sqrt(2 pi i h T) and the crossing phase of the
/// real classical path.  Complex start time: the branched square root above and
/// a caller-supplied crossing phase (zero for the survival paths, which never
/// cross the origin).
inline cplx volkov_propagator(double x, double t_f, double y, cplx t_i, const ModelParams& p,
                              double crossing_phase = 0.0) {
  const cplx duration = cplx(t_f) - t_i;
  if (std::abs(duration) == 0.0) throw domain_error("volkov_propagator needs t_f != t_i");
  const cplx exponent = cplx(0.0, 1.0 / p.h) * volkov_action(x, t_f, y, t_i);
  if (t_i.imag() == 0.0) {
    const auto path = make_path(t_i, t_f, y, x);
    const double phi = delta_phase(path);
    return free_prefactor(duration, p.h) * std::exp(exponent + cplx(0.0, p.gamma * phi));
  }
  const cplx radicand = cplx(0.0, 2.0 * std::numbers::pi * p.h) * duration;
  return std::exp(exponent + cplx(0.0, p.gamma * crossing_phase)) / branched_sqrt(radicand);
}

// ---------------------------------------------------------------------------
// Survival amplitude.

struct PacketTerm {
  int k = 0;
  cplx zeta{};
  cplx prefactor{};
  cplx value{};
};

struct SurvivalAmplitude {
  cplx bound_exponent{};  ///< bound_term = exp(bound_exponent)
  cplx bound_term{};
  std::vector<PacketTerm> packet_terms;
  cplx p{};
  double t_final = 0.0;
};

struct SemiclassicalOptions {
  bool include_odd = false;  ///< bursts at odd multiples of pi
  bool packets = true;       ///< false keeps only the bound term
  bool field_off = false;    ///< zero rate and Stark shift, no packets
};

/// zeta_k exactly as the closed form reads, with c = cos t0 = sqrt(1 + gamma^2),
/// s = sin t0 = i gamma and D = t_f - t0 - k pi:
///   zeta_k = -i/(4hD) [ (t0 + k pi)^2 + D c s - 2 (t0 + k pi) t_f + 4 c (-1)^k - 2 + t_f^2 - 2 c^2 ]
///            - (i/h) E (t0 + k pi)
inline cplx packet_exponent(const ModelParams& p, const QuasiEnergy& q, int k, double t_final) {
  const cplx t0 = tunnel_start_time(p.gamma);
  const cplx c = std::cos(t0);
  const cplx s = std::sin(t0);
  const cplx start = t0 + static_cast<double>(k) * std::numbers::pi;
  const cplx span = t_final - start;
  const double sign = k % 2 == 0 ? 1.0 : -1.0;
  const cplx bracket = start * start + span * c * s - 2.0 * start * t_final + 4.0 * c * sign - 2.0 +
                       t_final * t_final - 2.0 * c * c;
  const cplx i(0.0, 1.0);
  return -i / (4.0 * p.h * span) * bracket - i / p.h * q.e_m * start;
}

/// -4h / (gamma sqrt(2 i pi h D)) on the principal branch, which equals
/// 4h / (gamma branched_sqrt(2 i pi h D)): the overlap factor 4h/gamma times the
/// branched Volkov prefactor.
inline cplx packet_prefactor(const ModelParams& p, int k, double t_final) {
  const cplx span = t_final - tunnel_start_time(p.gamma) - static_cast<double>(k) * std::numbers::pi;
  const cplx radicand = cplx(0.0, 2.0 * std::numbers::pi * p.h) * span;
  return 4.0 * p.h / (p.gamma * branched_sqrt(radicand));
}

inline SurvivalAmplitude survival_amplitude(const ModelParams& p, int n_cycles, const SemiclassicalOptions& opt = {}) {
  if (n_cycles < 1) throw domain_error("number of cycles must be >= 1");
  const QuasiEnergy q = opt.field_off ? quasi_energy_field_free(p) : quasi_energy_averaged(p);
  SurvivalAmplitude out;
  out.t_final = 2.0 * std::numbers::pi * n_cycles;
  out.bound_exponent = cplx(0.0, -1.0 / p.h) * q.e_m * out.t_final;
  out.bound_term = std::exp(out.bound_exponent);
  out.p = out.bound_term;
  if (opt.field_off || !opt.packets) return out;
  for (int k = 0; k < 2 * n_cycles; ++k) {
    if (k % 2 == 1 && !opt.include_odd) continue;
    PacketTerm term;
    term.k = k;
    term.zeta = packet_exponent(p, q, k, out.t_final);
    term.prefactor = packet_prefactor(p, k, out.t_final);
    term.value = term.prefactor * std::exp(term.zeta);
    out.packet_terms.push_back(term);
    out.p += term.value;
  }
  return out;
}

/// Survival amplitude composed from propagators instead of the closed form:
/// bound phase up to k pi + t0, overlap factor 4h/gamma, branched propagator
/// U(0, t_f; 0, k pi + t0).  Term for term equal to survival_amplitude.
inline SurvivalAmplitude survival_amplitude_composed(const ModelParams& p, int n_cycles,
                                                     const SemiclassicalOptions& opt = {}) {
  if (n_cycles < 1) throw domain_error("number of cycles must be >= 1");
  const QuasiEnergy q = opt.field_off ? quasi_energy_field_free(p) : quasi_energy_averaged(p);
  SurvivalAmplitude out;
  out.t_final = 2.0 * std::numbers::pi * n_cycles;
  out.bound_exponent = cplx(0.0, -1.0 / p.h) * q.e_m * out.t_final;
  out.bound_term = std::exp(out.bound_exponent);
  out.p = out.bound_term;
  if (opt.field_off || !opt.packets) return out;
  const cplx t0 = tunnel_start_time(p.gamma);
  for (int k = 0; k < 2 * n_cycles; ++k) {
    if (k % 2 == 1 && !opt.include_odd) continue;
    const cplx start = t0 + static_cast<double>(k) * std::numbers::pi;
    PacketTerm term;
    term.k = k;
    term.value = bound_propagator_factor(q, start, p.h) * (4.0 * p.h / p.gamma) *
                 volkov_propagator(0.0, out.t_final, 0.0, start, p);
    out.packet_terms.push_back(term);
    out.p += term.value;
  }
  return out;
}

/// Gamma = -(2 pi / t_f) ln |p|^2.
inline double rate_from_amplitude(cplx amplitude, double t_final) {
  const double w = std::norm(amplitude);
  if (!(w > 0.0)) throw numeric_error("survival amplitude vanished: infinite rate");
  return -2.0 * std::numbers::pi / t_final * std::log(w);
}

/// ln |p|^2 without forming |p|^2: with the packets measured relative to the
/// bound term, ln |p|^2 = 2 Re(bound exponent) + log1p(2 Re r + |r|^2).  This keeps
/// full relative precision when the decay per cycle is far below rounding of 1.
inline double log_survival_probability(const SurvivalAmplitude& amp) {
  cplx r = 0.0;
  for (const auto& term : amp.packet_terms) r += term.value / amp.bound_term;
  const double relative = 2.0 * r.real() + std::norm(r);
  if (!(relative > -1.0)) throw numeric_error("survival amplitude vanished: infinite rate");
  return 2.0 * amp.bound_exponent.real() + std::log1p(relative);
}

inline double ionization_rate(const ModelParams& p, int n_cycles, const SemiclassicalOptions& opt = {}) {
  const auto amp = survival_amplitude(p, n_cycles, opt);
  return -2.0 * std::numbers::pi / amp.t_final * log_survival_probability(amp);
}

}  // namespace deltaion
