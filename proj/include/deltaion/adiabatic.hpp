#pragma once

// Adiabatic description of the bound state in the oscillating field: the
// instantaneous tunneling rate D(eta), its cycle average, the AC Stark shift and
// the complex quasi-energy that drives the bound-state propagator.  Also holds
// the generic saddle-point evaluator used to cross-check the cycle average.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "deltaion/errors.hpp"
#include "deltaion/faddeeva.hpp"
#include "deltaion/model.hpp"

namespace deltaion {

/// Instantaneous tunneling rate (gamma^2/h) exp(-2 gamma^3 / (3 eta h)).
/// The prefactor is |2 E0| / h.
inline double rate_instantaneous(const ModelParams& p, double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw domain_error("field fraction eta must lie in (0, 1]");
  const double g3 = p.gamma * p.gamma * p.gamma;
  return p.gamma * p.gamma / p.h * std::exp(-2.0 * g3 / (3.0 * eta * p.h));
}

/// Saddle-point ratio between the cycle average and the peak rate, sqrt(3h / (pi gamma^3)).
inline double cycle_average_factor(const ModelParams& p) {
  return std::sqrt(3.0 * p.h / (std::numbers::pi * p.gamma * p.gamma * p.gamma));
}

/// Cycle-averaged rate in the steepest-descent approximation.
inline double rate_cycle_averaged(const ModelParams& p) {
  return cycle_average_factor(p) * rate_instantaneous(p, 1.0);
}

namespace detail {

inline double rate_at_phase(const ModelParams& p, double t) {
  const double eta = std::abs(std::cos(t));
  if (eta < 1e-300) return 0.0;
  const double g3 = p.gamma * p.gamma * p.gamma;
  return p.gamma * p.gamma / p.h * std::exp(-2.0 * g3 / (3.0 * eta * p.h));
}

template <class F>
double adaptive_integral(F&& f, double a, double b, double rel_tol, const char* what) {
  double err = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err, &l1);
  if (!(err <= rel_tol * std::abs(value)) && !(std::abs(value) == 0.0 && err == 0.0)) {
    throw numeric_error(std::string(what) + ": quadrature did not reach the requested accuracy", value);
  }
  return value;
}

}  // namespace detail

/// (1/2pi) int_0^{2pi} D(|cos t|) dt by adaptive Gauss-Kronrod, using the
/// quarter-period symmetry of |cos t|.
inline double cycle_average_quadrature(const ModelParams& p, double rel_tol = 1e-10) {
  const auto integrand = [&p](double t) { return detail::rate_at_phase(p, t); };
  return 2.0 / std::numbers::pi *
         detail::adaptive_integral(integrand, 0.0, std::numbers::pi / 2.0, rel_tol, "cycle average");
}

/// Same average taken over the full period without exploiting symmetry.
inline double cycle_average_quadrature_full(const ModelParams& p, double rel_tol = 1e-10) {
  const auto integrand = [&p](double t) { return detail::rate_at_phase(p, t); };
  constexpr double pi = std::numbers::pi;
  double total = 0.0;
  // Split at the field zeros where the integrand has an essential zero.
  const double cuts[] = {0.0, pi / 2.0, 3.0 * pi / 2.0, 2.0 * pi};
  for (int i = 0; i < 3; ++i) {
    total += detail::adaptive_integral(integrand, cuts[i], cuts[i + 1], rel_tol, "cycle average");
  }
  return total / (2.0 * pi);
}

/// AC Stark shift -5 h^2 eta^2 / (8 gamma^4).
inline double stark_shift(const ModelParams& p, double eta) {
  if (eta < 0.0 || eta > 1.0) throw domain_error("field fraction eta must lie in [0, 1]");
  const double g2 = p.gamma * p.gamma;
  return -5.0 * p.h * p.h * eta * eta / (8.0 * g2 * g2);
}

/// Cycle average of the Stark shift: half the peak value.
inline double stark_shift_averaged(const ModelParams& p) { return 0.5 * stark_shift(p, 1.0); }

struct QuasiEnergy {
  double e0 = 0.0;
  double e_ac = 0.0;
  cplx e_i{0.0, 0.0};  ///< purely imaginary, -i h D / 2
  cplx e_m{0.0, 0.0};
};

inline QuasiEnergy make_quasi_energy(double e0, double e_ac, double rate, double h) {
  QuasiEnergy q;
  q.e0 = e0;
  q.e_ac = e_ac;
  q.e_i = cplx(0.0, -0.5 * h * rate);
  q.e_m = cplx(e0 + e_ac, 0.0) + q.e_i;
  return q;
}

inline QuasiEnergy quasi_energy(const ModelParams& p, double eta) {
  return make_quasi_energy(-0.5 * p.gamma * p.gamma, stark_shift(p, eta), rate_instantaneous(p, eta), p.h);
}

inline QuasiEnergy quasi_energy_averaged(const ModelParams& p) {
  return make_quasi_energy(-0.5 * p.gamma * p.gamma, stark_shift_averaged(p), rate_cycle_averaged(p), p.h);
}

/// Quasi-energy with the field switched off: just the ground-state energy.
inline QuasiEnergy quasi_energy_field_free(const ModelParams& p) {
  return make_quasi_energy(-0.5 * p.gamma * p.gamma, 0.0, 0.0, p.h);
}

/// exp(-(i/h) E * t) for a possibly complex duration t.
inline cplx bound_propagator_factor(const QuasiEnergy& q, cplx t, double h) {
  return std::exp(cplx(0.0, -1.0 / h) * q.e_m * t);
}

inline cplx bound_propagator_factor(const ModelParams& p, cplx t) {
  return bound_propagator_factor(quasi_energy_averaged(p), t, p.h);
}

// ---------------------------------------------------------------------------
// Saddle-point integration.

enum class SaddleMode {
  steepest_descent,  ///< int g exp(-f/h) ~ sqrt(2 pi h / f'') g exp(-f/h)
  stationary_phase,  ///< int g exp(+i f/h) ~ sqrt(2 pi i h / f'') g exp(i f/h)
};

struct StationaryPoint {
  double t0 = 0.0;
  std::optional<double> second_derivative;  ///< finite differences when absent
};

/// Central second difference with step eps^(1/3) max(1, |t0|).
template <class F>
double second_derivative_fd(F&& f, double t0) {
  const double step = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(t0));
  return (f(t0 + step) - 2.0 * f(t0) + f(t0 - step)) / (step * step);
}

template <class F, class G>
cplx saddle_point_integral(F&& f, G&& g, double h, std::span<const StationaryPoint> points, SaddleMode mode) {
  if (!(h > 0.0)) throw domain_error("saddle-point parameter h must be positive");
  cplx total = 0.0;
  for (const auto& sp : points) {
    const double f2 = sp.second_derivative ? *sp.second_derivative : second_derivative_fd(f, sp.t0);
    if (f2 == 0.0 || !std::isfinite(f2)) {
      throw domain_error("degenerate saddle at t0 = " + std::to_string(sp.t0) + " (f'' = 0)");
    }
    const double f0 = f(sp.t0);
    const cplx g0 = g(sp.t0);
    if (mode == SaddleMode::steepest_descent) {
      if (f2 < 0.0) throw domain_error("steepest descent needs a minimum of f (f'' > 0)");
      total += std::sqrt(2.0 * std::numbers::pi * h / f2) * g0 * std::exp(-f0 / h);
    } else {
      const cplx width = std::sqrt(cplx(0.0, 2.0 * std::numbers::pi * h) / f2);
      total += width * g0 * std::exp(cplx(0.0, f0 / h));
    }
  }
  return total;
}

/// The cycle average evaluated by the generic saddle-point routine at the field
/// maxima t = 0 and t = pi.  Same closed form as rate_cycle_averaged, reached
/// through a separate code path.
inline double rate_cycle_averaged_saddle(const ModelParams& p, bool finite_difference = false) {
  const double g3 = p.gamma * p.gamma * p.gamma;
  const auto exponent = [g3](double t) { return 2.0 / 3.0 * g3 / std::abs(std::cos(t)); };
  const auto prefactor = [&p](double) { return cplx(p.gamma * p.gamma / p.h, 0.0); };
  std::vector<StationaryPoint> points{{0.0, {}}, {std::numbers::pi, {}}};
  if (!finite_difference) {
    for (auto& sp : points) sp.second_derivative = 2.0 / 3.0 * g3;
  }
  const cplx sum = saddle_point_integral(exponent, prefactor, p.h, points, SaddleMode::steepest_descent);
  return sum.real() / (2.0 * std::numbers::pi);
}

}  // namespace deltaion
