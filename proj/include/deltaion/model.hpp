#pragma once

// Parameter algebra of the driven delta-function atom.
//
// Physical model (atomic units): V(x,t) = -alpha delta(x) - mu x cos(omega t).
// Rescaling x' = omega^2 x / mu, t' = omega t turns the Schroedinger equation
// into
//
//   i h d/dt psi = ( -h^2/2 d^2/dx^2 - h gamma delta(x) - x cos t ) psi
//
// with h = omega^3 / mu^2 playing the role of Planck's constant.  Every other
// module works in these transformed units.

#include <cmath>
#include <numbers>
#include <string>

#include "deltaion/errors.hpp"

namespace deltaion {

struct ModelParams {
  double alpha = 0.0;  ///< binding strength
  double mu = 0.0;     ///< field amplitude
  double omega = 0.0;  ///< angular frequency
  double gamma = 0.0;  ///< Keldysh factor alpha*omega/mu
  double z = 0.0;      ///< ponderomotive photon number mu^2/(4 omega^3)
  double h = 0.0;      ///< effective Planck parameter omega^3/mu^2 = 1/(4z)
  double n_io = 0.0;   ///< ionization photon number alpha^2/(2 omega) = 2 gamma^2 z
};

namespace detail {

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw domain_error(std::string(name) + " must be positive and finite, got " +
                       std::to_string(value));
  }
}

}  // namespace detail

inline ModelParams from_physical(double alpha, double mu, double omega) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(mu, "mu");
  detail::require_positive(omega, "omega");
  ModelParams p;
  p.alpha = alpha;
  p.mu = mu;
  p.omega = omega;
  p.gamma = alpha * omega / mu;
  p.z = mu * mu / (4.0 * omega * omega * omega);
  p.h = omega * omega * omega / (mu * mu);
  p.n_io = alpha * alpha / (2.0 * omega);
  return p;
}

/// Embeds (gamma, z) with omega = 1, so mu = 2 sqrt(z) and alpha = gamma mu.
inline ModelParams from_dimensionless(double gamma, double z) {
  detail::require_positive(gamma, "gamma");
  detail::require_positive(z, "z");
  const double omega = 1.0;
  const double mu = 2.0 * omega * std::sqrt(z * omega);
  ModelParams p;
  p.alpha = gamma * mu / omega;
  p.mu = mu;
  p.omega = omega;
  // Derived quantities straight from (gamma, z) so the round trip is exact.
  p.gamma = gamma;
  p.z = z;
  p.h = 1.0 / (4.0 * z);
  p.n_io = 2.0 * gamma * gamma * z;
  return p;
}

/// Ground state psi0(x) = sqrt(gamma/h) exp(-gamma |x| / h), energy -gamma^2/2.
struct GroundState {
  double energy = 0.0;
  double norm_coeff = 0.0;
  double decay = 0.0;  ///< gamma/h, the inverse localization length

  double operator()(double x) const { return norm_coeff * std::exp(-decay * std::abs(x)); }
};

inline GroundState ground_state(const ModelParams& p) {
  return {-0.5 * p.gamma * p.gamma, std::sqrt(p.gamma / p.h), p.gamma / p.h};
}

/// Channel-closing threshold z_k = k / (1 + 2 gamma^2).
inline double channel_threshold(int k, double gamma) {
  if (k < 1) throw domain_error("photon count k must be >= 1, got " + std::to_string(k));
  if (!(gamma >= 0.0)) throw domain_error("gamma must be non-negative");
  return static_cast<double>(k) / (1.0 + 2.0 * gamma * gamma);
}

/// Spacing between consecutive thresholds at fixed gamma.
inline double threshold_spacing(double gamma) { return 1.0 / (1.0 + 2.0 * gamma * gamma); }

/// Kinetic energy (in photons) left after absorbing k photons: k - n_io - z.
/// Negative means the channel is closed.
inline double energy_balance(int k, double gamma, double z) {
  if (k < 1) throw domain_error("photon count k must be >= 1, got " + std::to_string(k));
  return static_cast<double>(k) - 2.0 * gamma * gamma * z - z;
}

inline bool channel_open(int k, double gamma, double z) { return energy_balance(k, gamma, z) >= 0.0; }

/// Lowest k whose channel is open at (gamma, z).
inline int lowest_open_channel(double gamma, double z) {
  const int k = static_cast<int>(std::ceil(z * (1.0 + 2.0 * gamma * gamma) - 1e-12));
  return k < 1 ? 1 : k;
}

}  // namespace deltaion
