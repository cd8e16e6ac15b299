#pragma once

// Volkov propagator of the field-only Hamiltonian H0 = p^2/2 - drive * x cos t
// (transformed units).  The semiclassical module and the Volterra oracle both
// evaluate the kernel through this header.
//
// Going to the velocity gauge with A(t) = drive * sin t gives the classical
// action in closed form,
//
//   S(x,t; y,t') = drive (x sin t - y sin t') + (x - y + drive (cos t - cos t'))^2 / (2T)
//                  - drive^2 T/4 + drive^2 (sin 2t - sin 2t') / 8,          T = t - t',
//
// which equals the time integral of L0 = xdot^2/2 + drive x cos t along the
// classical path.  It is analytic in every argument, so complex times are fine.

#include <cmath>
#include <complex>
#include <numbers>

#include "deltaion/errors.hpp"
#include "deltaion/faddeeva.hpp"

namespace deltaion {

inline cplx volkov_action(cplx x, cplx t, cplx y, cplx t_prime, double drive = 1.0) {
  const cplx duration = t - t_prime;
  if (duration == cplx(0.0)) throw domain_error("Volkov action needs distinct end times");
  const cplx shift = x - y + drive * (std::cos(t) - std::cos(t_prime));
  return drive * (x * std::sin(t) - y * std::sin(t_prime)) + shift * shift / (2.0 * duration) -
         drive * drive * duration / 4.0 +
         drive * drive * (std::sin(2.0 * t) - std::sin(2.0 * t_prime)) / 8.0;
}

/// 1/sqrt(2 pi i h T) on the principal branch; the physical choice for real T > 0.
inline cplx free_prefactor(cplx duration, double h) {
  return 1.0 / std::sqrt(cplx(0.0, 2.0 * std::numbers::pi * h) * duration);
}

/// Exact propagator for real times t > t_prime.
inline cplx volkov_kernel(double x, double t, double y, double t_prime, double h, double drive = 1.0) {
  if (!(t > t_prime)) throw domain_error("Volkov kernel needs t > t'");
  const cplx phase = cplx(0.0, 1.0 / h) * volkov_action(x, t, y, t_prime, drive);
  return free_prefactor(t - t_prime, h) * std::exp(phase);
}

/// Free evolution of psi0 = sqrt(kappa) exp(-kappa |y|) for time tau, evaluated
/// at the point c:
///
///   Psi(c, tau) = int dy  exp(i (y - c)^2 / (2 h tau)) / sqrt(2 pi i h tau) * psi0(y)
///               = sqrt(kappa)/2 * exp(i a c^2) [erfcx(rho (i kappa/(2a) - c)) + erfcx(rho (i kappa/(2a) + c))]
///
/// with a = 1/(2 h tau) and rho = sqrt(a) exp(-i pi/4).  Tends to psi0(c) as tau -> 0.
inline cplx evolved_ground_state(double c, double tau, double kappa, double h) {
  if (tau <= 0.0) return std::sqrt(kappa) * std::exp(-kappa * std::abs(c));
  const double a = 1.0 / (2.0 * h * tau);
  const cplx rho = std::sqrt(a) * cplx(std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0);
  const cplx center(0.0, kappa / (2.0 * a));
  const cplx sum = erfcx(rho * (center - c)) + erfcx(rho * (center + c));
  return 0.5 * std::sqrt(kappa) * std::exp(cplx(0.0, a * c * c)) * sum;
}

/// <psi0 | exp(-i t p^2 / (2h)) | psi0> for the normalized two-sided exponential,
/// via the Lorentzian momentum density: (1 - 2u^2) erfcx(u) + 2u/sqrt(pi) with
/// u = kappa sqrt(i h t / 2).
inline cplx free_return_amplitude(double t, double kappa, double h) {
  if (t <= 0.0) return 1.0;
  const cplx u = kappa * std::sqrt(cplx(0.0, h * t / 2.0));
  return (1.0 - 2.0 * u * u) * erfcx(u) + 2.0 * u * std::numbers::inv_sqrtpi;
}

}  // namespace deltaion
