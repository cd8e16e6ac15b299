#pragma once

// Exact reference solution of the driven delta atom.
//
// Treating the delta potential as a perturbation of the field-only motion gives
//
//   psi(x,t) = int U(x,t; y,0) psi0(y) dy + i gamma int_0^t U(x,t; 0,t') f(t') dt',
//
// with U the Volkov kernel and f(t) = psi(0,t).  At x = 0 this is a Volterra
// equation of the second kind for f whose kernel carries a (t - t')^(-1/2)
// singularity.  Writing
//
//   f(t) = exp(i sigma(t) + i Omega t) g(t),   sigma = sin 2t / (8h),  Omega = gamma^2 / (2h),
//
// moves the fast phases into known factors:
//
//   g(t) = G0(t) + c int_0^t T^(-1/2) exp(-i lambda T) exp(i Q(t,t')) g(t') dt',
//   c = i gamma / sqrt(2 pi i h),  lambda = Omega + 1/(4h),
//   Q(t,t') = (cos t - cos t')^2 / (2 h T).
//
// The weights of the product-integration rule contain T^(-1/2) exp(-i lambda T)
// exactly; exp(iQ) g is interpolated by piecewise cubics.  Without the field
// (drive = 0) g is constant and the scheme reproduces it up to rounding.
//
// All drive-dependent terms scale with `drive`, the field amplitude relative to
// the one that defines h; drive = 0 is the field-free atom.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "deltaion/errors.hpp"
#include "deltaion/model.hpp"
#include "deltaion/quadrature.hpp"
#include "deltaion/volkov.hpp"

namespace deltaion {

struct OracleOptions {
  double dt = 0.0;             ///< time step; 0 selects the default rule
  double dt_divisor = 40.0;    ///< default dt = min(2 pi, h/gamma^2) / dt_divisor
  double drive = 1.0;          ///< field amplitude multiplier; 0 switches the field off
  bool self_check = false;     ///< also solve at 2 dt and compare survival amplitudes
  double tolerance = 1e-6;     ///< allowed |p(dt) - p(2 dt)| when self_check is on
  int settle_cycles = 1;       ///< cycles discarded before the decay is measured
};

/// Default step: resolve both the field period and the bound-state phase.
inline double default_time_step(const ModelParams& p, double divisor = 40.0) {
  return std::min(2.0 * std::numbers::pi, p.h / (p.gamma * p.gamma)) / divisor;
}

struct VolterraGrid {
  ModelParams params;
  double drive = 1.0;
  double dt = 0.0;
  int n_steps = 0;
  double t_final = 0.0;
  std::vector<cplx> f;  ///< psi(0, t_j), j = 0..n_steps

  double time(int j) const { return j * dt; }
};

namespace detail {

struct OracleRates {
  double kappa;   // gamma / h
  double omega;   // gamma^2 / (2h)
  double lambda;  // omega + drive^2 / (4h)
  double drive;
  double h;
};

inline OracleRates oracle_rates(const ModelParams& p, double drive) {
  const double omega = p.gamma * p.gamma / (2.0 * p.h);
  return {p.gamma / p.h, omega, omega + drive * drive / (4.0 * p.h), drive, p.h};
}

/// Value at tau of the Lagrange basis polynomial i on nodes 0..degree.
inline double lagrange_basis(int degree, int i, double tau) {
  double value = 1.0;
  for (int m = 0; m <= degree; ++m) {
    if (m != i) value *= (tau - m) / static_cast<double>(i - m);
  }
  return value;
}

/// Product-integration weights for one panel.
///
/// The window has nodes at local positions 0..degree, the panel is
/// [offset, offset + 1] and the target sits at local position `target`.  Returns
/// int_panel s^(-1/2) exp(-i lambda s) L_i(tau) ds with s = (target - tau) dt,
/// computed in u = sqrt(s), where the integrand is smooth.
inline std::array<cplx, 4> panel_weights(int degree, int offset, double target, double dt, double lambda) {
  const auto& gl = GaussLegendre<12>::instance();
  const double u_lo = std::sqrt(std::max(0.0, (target - offset - 1) * dt));
  const double u_hi = std::sqrt((target - offset) * dt);
  const double half = 0.5 * (u_hi - u_lo);
  const double mid = 0.5 * (u_hi + u_lo);
  std::array<cplx, 4> w{};
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double u = mid + half * gl.nodes[q];
    const double tau = target - u * u / dt;
    const cplx common = 2.0 * half * gl.weights[q] * std::polar(1.0, -lambda * u * u);
    for (int i = 0; i <= degree; ++i) w[i] += common * lagrange_basis(degree, i, tau);
  }
  return w;
}

/// Interpolation window used for panel j when nodes 0..last are available.
struct Window {
  int start;
  int degree;
};

inline Window window_for_panel(int j, int last) {
  if (last < 3) return {0, last};
  return {std::clamp(j - 1, 0, last - 3), 3};
}

/// Toeplitz weight tables for windows of degree 3: indexed by the panel's
/// offset inside its window (0, 1, 2) and its lag l = n - j.
///
/// Away from both ends every panel j uses the window starting at j - 1, so the
/// weight a node collects from its four panels depends on its lag alone; that
/// sum is `combined(lag)`.
class WeightTable {
 public:
  WeightTable(int n_steps, double dt, double lambda) {
    for (int o = 0; o < 3; ++o) {
      table_[o].resize(static_cast<std::size_t>(n_steps) + 2);
      for (int l = 1; l <= n_steps + 1; ++l) table_[o][l] = panel_weights(3, o, l + o, dt, lambda);
    }
    combined_.assign(static_cast<std::size_t>(n_steps) + 1, cplx(0.0));
    for (int lag = 2; lag <= n_steps; ++lag) {
      for (int i = 0; i <= 3; ++i) {
        const int panel_lag = lag + i - 1;
        if (panel_lag >= 1 && panel_lag <= n_steps + 1) combined_[lag] += table_[1][panel_lag][i];
      }
    }
  }

  const std::array<cplx, 4>& at(int offset, int lag) const { return table_[offset][lag]; }
  cplx combined(int lag) const { return combined_[lag]; }

 private:
  std::array<std::vector<std::array<cplx, 4>>, 3> table_;
  std::vector<cplx> combined_;
};

}  // namespace detail

inline VolterraGrid solve_boundary_function(const ModelParams& p, double t_final, const OracleOptions& opt = {}) {
  if (!(t_final > 0.0)) throw domain_error("t_final must be positive");
  const double dt_request = opt.dt > 0.0 ? opt.dt : default_time_step(p, opt.dt_divisor);
  if (!(dt_request > 0.0)) throw domain_error("time step must be positive");
  // Whole periods get an integer number of steps each, so the projection can be
  // taken at every cycle end of the same grid.
  const double cycles = t_final / (2.0 * std::numbers::pi);
  const bool whole_cycles = std::abs(cycles - std::round(cycles)) < 1e-9 && std::round(cycles) >= 1.0;
  const int n = whole_cycles ? static_cast<int>(std::round(cycles)) *
                                   std::max(4, static_cast<int>(std::ceil(2.0 * std::numbers::pi / dt_request - 1e-9)))
                             : std::max(4, static_cast<int>(std::ceil(t_final / dt_request - 1e-9)));
  const double dt = t_final / n;
  const auto r = detail::oracle_rates(p, opt.drive);

  VolterraGrid grid;
  grid.params = p;
  grid.drive = opt.drive;
  grid.dt = dt;
  grid.n_steps = n;
  grid.t_final = t_final;

  std::vector<cplx> g(static_cast<std::size_t>(n) + 1);
  std::vector<double> cos_t(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) cos_t[j] = std::cos(j * dt);

  const cplx coupling = cplx(0.0, p.gamma) / std::sqrt(cplx(0.0, 2.0 * std::numbers::pi * p.h));
  const detail::WeightTable table(n, dt, r.lambda);
  const double q_scale = r.drive * r.drive / (2.0 * r.h);

  // Inhomogeneous term: free evolution of psi0 sampled at the origin.
  const auto source = [&](int j) {
    const double t = j * dt;
    return std::polar(1.0, -r.lambda * t) * evolved_ground_state(r.drive * (cos_t[j] - 1.0), t, r.kappa, r.h);
  };

  std::vector<double> q_over_lag(static_cast<std::size_t>(n) + 1, 0.0);
  for (int l = 1; l <= n; ++l) q_over_lag[l] = q_scale / (l * dt);

  g[0] = std::sqrt(r.kappa);
  const auto theta = [&](int step, int m) {
    const double diff = cos_t[step] - cos_t[m];
    const double phase = q_over_lag[step - m] * diff * diff;
    return cplx(std::cos(phase), std::sin(phase)) * g[m];
  };
  // Adds the contributions of panel j to the history sum, skipping nodes in
  // [skip_lo, skip_hi] that the combined Toeplitz weights already cover.
  const auto add_panel = [&](int step, int j, int skip_lo, int skip_hi, cplx& history, cplx& diagonal) {
    const auto win = detail::window_for_panel(j, step);
    const int offset = j - win.start;
    const std::array<cplx, 4> w = win.degree == 3
                                      ? table.at(offset, step - j)
                                      : detail::panel_weights(win.degree, offset, step - win.start, dt, r.lambda);
    for (int i = 0; i <= win.degree; ++i) {
      const int node = win.start + i;
      if (node >= skip_lo && node <= skip_hi) continue;
      if (node == step) {
        diagonal += w[i];
      } else {
        history += w[i] * theta(step, node);
      }
    }
  };

  for (int step = 1; step <= n; ++step) {
    cplx history = 0.0;
    cplx diagonal = 0.0;
    if (step < 10) {
      for (int j = 0; j < step; ++j) add_panel(step, j, 1, 0, history, diagonal);
    } else {
      // The first and last panels use shifted windows, which reach nodes 0..3
      // and step-3..step; everything in between sees the generic pattern.
      const int lo = 4;
      const int hi = step - 4;
      // Hot loop, spelled out in real arithmetic: std::complex products go
      // through the NaN-aware library multiply unless -ffast-math is on.
      double acc_re = 0.0;
      double acc_im = 0.0;
      const double c_step = cos_t[step];
      for (int m = lo; m <= hi; ++m) {
        const double diff = c_step - cos_t[m];
        const double phase = q_over_lag[step - m] * diff * diff;
        const double cp = std::cos(phase);
        const double sp = std::sin(phase);
        const cplx w = table.combined(step - m);
        const double wr = w.real() * cp - w.imag() * sp;
        const double wi = w.real() * sp + w.imag() * cp;
        acc_re += wr * g[m].real() - wi * g[m].imag();
        acc_im += wr * g[m].imag() + wi * g[m].real();
      }
      history += cplx(acc_re, acc_im);
      for (int j = 0; j <= 4; ++j) add_panel(step, j, lo, hi, history, diagonal);
      for (int j = step - 5; j < step; ++j) add_panel(step, j, lo, hi, history, diagonal);
    }
    g[step] = (source(step) + coupling * history) / (1.0 - coupling * diagonal);
  }

  grid.f.resize(g.size());
  for (int j = 0; j <= n; ++j) {
    const double t = j * dt;
    const double sigma = r.drive * r.drive * std::sin(2.0 * t) / (8.0 * r.h);
    grid.f[j] = std::polar(1.0, sigma + r.omega * t) * g[j];
  }
  return grid;
}

struct SurvivalResult {
  cplx p{};
  double w = 0.0;
};

/// Projection of psi(2 pi cycles) onto the initial ground state, using the part
/// of the grid up to that time.
inline SurvivalResult survival_probability(const VolterraGrid& grid, int cycles) {
  const auto& p = grid.params;
  if (cycles < 1) throw domain_error("survival projection needs at least one cycle");
  const double tf = 2.0 * std::numbers::pi * cycles;
  const double steps = tf / grid.dt;
  if (tf > grid.t_final * (1.0 + 1e-12) || std::abs(steps - std::round(steps)) > 1e-6) {
    throw domain_error("survival projection needs a grid node at t = 2 pi n");
  }
  const auto r = detail::oracle_rates(p, grid.drive);
  const int n = static_cast<int>(std::round(steps));
  const double dt = grid.dt;

  // Slowly varying part of f, the quantity the solver interpolated.
  std::vector<cplx> g(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double t = j * dt;
    const double sigma = r.drive * r.drive * std::sin(2.0 * t) / (8.0 * r.h);
    g[j] = std::polar(1.0, -(sigma + r.omega * t)) * grid.f[j];
  }

  // G(t') f(t') = exp(-i T/(4h) + i Omega t') Psi(cos t' - 1, T) g(t'),  T = t_f - t'.
  const auto integrand = [&](double t_prime, cplx g_value) {
    const double remaining = std::max(0.0, tf - t_prime);
    const double phase = -r.drive * r.drive * remaining / (4.0 * r.h) + r.omega * t_prime;
    return std::polar(1.0, phase) *
           evolved_ground_state(r.drive * (std::cos(t_prime) - 1.0), remaining, r.kappa, r.h) * g_value;
  };

  const auto& gl = GaussLegendre<10>::instance();
  cplx integral = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto win = detail::window_for_panel(j, n);
    const auto interpolate = [&](double tau_global) {
      const double tau = tau_global - win.start;
      cplx value = 0.0;
      for (int i = 0; i <= win.degree; ++i) value += detail::lagrange_basis(win.degree, i, tau) * g[win.start + i];
      return value;
    };
    if (j == n - 1) {
      // sqrt(t_f - t') behaviour at the end point: integrate in u = sqrt(T).
      const double u_hi = std::sqrt(dt);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double u = 0.5 * u_hi * (1.0 + gl.nodes[q]);
        const double t_prime = tf - u * u;
        const double weight = 0.5 * u_hi * gl.weights[q] * 2.0 * u;
        integral += weight * integrand(t_prime, interpolate(t_prime / dt));
      }
    } else {
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double tau = j + 0.5 * (1.0 + gl.nodes[q]);
        const double t_prime = tau * dt;
        integral += 0.5 * dt * gl.weights[q] * integrand(t_prime, interpolate(tau));
      }
    }
  }

  const cplx free_part =
      std::polar(1.0, -r.drive * r.drive * tf / (4.0 * r.h)) * free_return_amplitude(tf, r.kappa, r.h);
  SurvivalResult out;
  out.p = free_part + cplx(0.0, p.gamma) * integral;
  out.w = std::norm(out.p);
  return out;
}

/// Projection at t_final, which must be a whole number of field periods.
inline SurvivalResult survival_probability(const VolterraGrid& grid) {
  const double cycles = grid.t_final / (2.0 * std::numbers::pi);
  if (std::abs(cycles - std::round(cycles)) > 1e-9) {
    throw domain_error("survival projection needs t_final = 2 pi n");
  }
  return survival_probability(grid, static_cast<int>(std::round(cycles)));
}

inline double rate_from_survival(const SurvivalResult& s, double t_final) {
  if (!(s.w > 0.0)) throw numeric_error("survival probability vanished: infinite rate");
  return -2.0 * std::numbers::pi / t_final * std::log(s.w);
}

/// Rate from the decay between two cycle ends: -(1/n) ln(w_later / w_earlier).
inline double rate_between(const SurvivalResult& earlier, const SurvivalResult& later, int n_cycles) {
  if (n_cycles < 1) throw domain_error("number of cycles must be >= 1");
  if (!(earlier.w > 0.0) || !(later.w > 0.0)) throw numeric_error("survival probability vanished: infinite rate");
  return -std::log(later.w / earlier.w) / n_cycles;
}

struct OracleResult {
  VolterraGrid grid;
  SurvivalResult settled;              ///< projection after the settle cycles (p = 1 when there are none)
  SurvivalResult survival;             ///< projection at the end of the run
  int n_cycles = 0;                    ///< measured cycles after settling
  double rate = 0.0;
  double self_check_deviation = -1.0;  ///< |p(dt) - p(2 dt)| when self_check ran
};

/// Solves for settle_cycles + n_cycles periods and measures the decay over the
/// last n_cycles.  Switching the field on at its maximum leaves a polarization
/// transient of order h^2 in the first cycle, far larger than the tunneling loss
/// at small h; the settle cycles keep it out of the rate.  With settle_cycles = 0
/// this is -(2 pi / t_f) ln w evaluated from t = 0.
inline OracleResult run_oracle(const ModelParams& p, int n_cycles, const OracleOptions& opt = {}) {
  if (n_cycles < 1) throw domain_error("number of cycles must be >= 1");
  if (opt.settle_cycles < 0) throw domain_error("settle cycles must be >= 0");
  const int total = opt.settle_cycles + n_cycles;
  const double tf = 2.0 * std::numbers::pi * total;
  OracleResult out;
  out.n_cycles = n_cycles;
  out.grid = solve_boundary_function(p, tf, opt);
  out.survival = survival_probability(out.grid);
  out.settled = opt.settle_cycles > 0 ? survival_probability(out.grid, opt.settle_cycles) : SurvivalResult{1.0, 1.0};
  if (opt.self_check) {
    OracleOptions coarse = opt;
    coarse.dt = 2.0 * out.grid.dt;
    coarse.self_check = false;
    const auto coarse_survival = survival_probability(solve_boundary_function(p, tf, coarse));
    out.self_check_deviation = std::abs(coarse_survival.p - out.survival.p);
    if (out.self_check_deviation > opt.tolerance) {
      throw convergence_error("oracle step dt = " + std::to_string(out.grid.dt) +
                                  " not converged: |p(dt) - p(2dt)| = " + std::to_string(out.self_check_deviation) +
                                  " exceeds tolerance " + std::to_string(opt.tolerance),
                              out.self_check_deviation);
    }
  }
  out.rate = rate_between(out.settled, out.survival, n_cycles);
  return out;
}

inline double rate_from_oracle(const ModelParams& p, int n_cycles, const OracleOptions& opt = {}) {
  return run_oracle(p, n_cycles, opt).rate;
}

/// Survival after each whole cycle of a solved grid, index k = 0..cycles (k = 0 is p = 1).
inline std::vector<SurvivalResult> cycle_survivals(const VolterraGrid& grid) {
  const int cycles = static_cast<int>(std::floor(grid.t_final / (2.0 * std::numbers::pi) + 1e-9));
  std::vector<SurvivalResult> out;
  out.push_back({1.0, 1.0});
  for (int k = 1; k <= cycles; ++k) out.push_back(survival_probability(grid, k));
  return out;
}

}  // namespace deltaion
