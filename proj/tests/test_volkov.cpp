#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "deltaion/model.hpp"
#include "deltaion/volkov.hpp"
#include "test_support.hpp"

namespace deltaion {
namespace {

using testing::integrate;

// The action must solve the Hamilton-Jacobi equation dS/dt + (dS/dx)^2 / 2 - x cos t = 0
// in the final point and the mirrored one in the initial point.
TEST(Volkov, ActionSolvesHamiltonJacobi) {
  const double eps = 1e-5;
  for (double x : {-1.3, 0.0, 0.8}) {
    for (double y : {-0.4, 0.6}) {
      for (double t : {1.0, 4.5}) {
        const double tp = 0.3;
        const auto S = [&](double xx, double tt) { return volkov_action(xx, tt, y, tp).real(); };
        const double dSdt = (S(x, t + eps) - S(x, t - eps)) / (2.0 * eps);
        const double dSdx = (S(x + eps, t) - S(x - eps, t)) / (2.0 * eps);
        EXPECT_NEAR(dSdt + 0.5 * dSdx * dSdx - x * std::cos(t), 0.0, 1e-7);

        const auto Sp = [&](double yy, double tt) { return volkov_action(x, t, yy, tt).real(); };
        const double dSdtp = (Sp(y, tp + eps) - Sp(y, tp - eps)) / (2.0 * eps);
        const double dSdy = (Sp(y + eps, tp) - Sp(y - eps, tp)) / (2.0 * eps);
        EXPECT_NEAR(-dSdtp + 0.5 * dSdy * dSdy - y * std::cos(tp), 0.0, 1e-7);
      }
    }
  }
}

TEST(Volkov, ActionReducesToFreeParticleWithoutField) {
  const cplx s = volkov_action(1.5, 2.0, -0.5, 0.5, 0.0);
  EXPECT_NEAR(s.real(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.imag(), 0.0, 1e-15);
}

TEST(Volkov, ActionNeedsDistinctTimes) { EXPECT_THROW(volkov_action(0.0, 1.0, 0.0, 1.0), domain_error); }

TEST(Volkov, KernelAgainstGaussianIntegral) {
  // Integrate the kernel against exp(-a y^2) numerically and in closed form.
  const double h = 0.05;
  const double t = 1.7;
  const double tp = 0.2;
  const double a = 0.02;  // damping exp(-a y^2)
  const auto integrand = [&](double y) { return volkov_kernel(0.3, t, y, tp, h) * std::exp(-a * y * y); };
  const cplx numeric = integrate(integrand, -60.0, 60.0, 20000);
  // Gaussian integral in closed form with quadratic coefficient i/(2hT) - a.
  const double T = t - tp;
  const cplx c2 = cplx(-a, 1.0 / (2.0 * h * T));
  const double shift = 0.3 + std::cos(t) - std::cos(tp);  // x - y + cos t - cos t' = shift - y
  // S/h as a quadratic in y: (i/h)[ -y sin t' + (shift - y)^2/(2T) + const ].
  const cplx c1 = cplx(0.0, 1.0 / h) * (-std::sin(tp) - shift / T);
  const cplx c0 = cplx(0.0, 1.0 / h) * (volkov_action(0.3, t, 0.0, tp));
  const cplx closed = free_prefactor(T, h) * std::sqrt(std::numbers::pi / -c2) * std::exp(c0 - c1 * c1 / (4.0 * c2));
  EXPECT_LT(std::abs(numeric - closed), 1e-9 * std::abs(closed));
}

// int U(x,t; y,s) U(y,s; w,t') dy = U(x,t; w,t').  The exponent is exactly
// quadratic in y, so the Fresnel integral is done in closed form from three
// samples of it.
TEST(Volkov, KernelComposition) {
  const double h = 0.03;
  for (double s : {0.9, 2.4}) {
    const double x = 0.4;
    const double w = -0.7;
    const double t = 3.1;
    const double tp = 0.2;
    const auto exponent = [&](double y) {
      return cplx(0.0, 1.0 / h) * (volkov_action(x, t, y, s) + volkov_action(y, s, w, tp));
    };
    const cplx e0 = exponent(0.0);
    const cplx ep = exponent(1.0);
    const cplx em = exponent(-1.0);
    const cplx c2 = 0.5 * (ep + em) - e0;
    const cplx c1 = 0.5 * (ep - em);
    const cplx gauss = std::sqrt(std::numbers::pi / -c2) * std::exp(e0 - c1 * c1 / (4.0 * c2));
    const cplx composed = free_prefactor(t - s, h) * free_prefactor(s - tp, h) * gauss;
    const cplx direct = volkov_kernel(x, t, w, tp, h);
    EXPECT_LT(std::abs(composed - direct), 1e-10 * std::abs(direct)) << s;
  }
}

TEST(Volkov, EvolvedGroundStateMatchesDirectQuadrature) {
  const double h = 0.025;
  const double kappa = 0.7 / h;
  for (double tau : {0.05, 0.4, 2.0}) {
    for (double c : {0.0, 0.03, -0.2, 0.9}) {
      const double a = 1.0 / (2.0 * h * tau);
      const auto integrand = [&](double y) {
        return std::exp(cplx(0.0, a * (y - c) * (y - c))) * std::sqrt(kappa) * std::exp(-kappa * std::abs(y));
      };
      const double L = 45.0 / kappa;
      // Split at the cusp y = 0.
      const cplx numeric =
          (integrate(integrand, -L, 0.0, 400) + integrate(integrand, 0.0, L, 400)) * free_prefactor(tau, h);
      const cplx closed = evolved_ground_state(c, tau, kappa, h);
      EXPECT_LT(std::abs(numeric - closed), 1e-10 * std::max(1.0, std::abs(closed))) << tau << ' ' << c;
    }
  }
}

TEST(Volkov, EvolvedGroundStateStartsAtGroundState) {
  const double kappa = 28.0;
  for (double c : {0.0, 0.01, -0.05}) {
    EXPECT_NEAR(std::abs(evolved_ground_state(c, 0.0, kappa, 0.025) - std::sqrt(kappa) * std::exp(-kappa * std::abs(c))),
                0.0, 1e-14);
    EXPECT_LT(std::abs(evolved_ground_state(c, 1e-9, kappa, 0.025) - std::sqrt(kappa) * std::exp(-kappa * std::abs(c))),
              1e-3 * std::sqrt(kappa));
  }
}

TEST(Volkov, FreeReturnAmplitudeMatchesMomentumQuadrature) {
  const double h = 0.025;
  const double kappa = 0.7 / h;
  for (double t : {0.01, 0.3, 2.0, 12.0}) {
    // Momentum density 2 kappa^3 / (pi (kappa^2 + q^2)^2), phase exp(-i h t q^2 / 2).
    // Rotate q = s exp(-i pi/4), which passes no pole and turns the phase into
    // a Gaussian, then substitute s = kappa tan(theta).
    const cplx rotation = std::polar(1.0, -std::numbers::pi / 4.0);
    const auto integrand = [&](double theta) {
      const double u = std::tan(theta);
      const cplx denom = cplx(1.0, -u * u);
      return rotation * (2.0 / std::numbers::pi) / (std::cos(theta) * std::cos(theta) * denom * denom) *
             std::exp(-0.5 * h * t * kappa * kappa * u * u);
    };
    const cplx numeric = integrate(integrand, -std::numbers::pi / 2.0, std::numbers::pi / 2.0, 400);
    const cplx closed = free_return_amplitude(t, kappa, h);
    EXPECT_LT(std::abs(numeric - closed), 1e-12) << t;
  }
  EXPECT_EQ(free_return_amplitude(0.0, kappa, h), cplx(1.0));
}

TEST(Volkov, FreeReturnIsOverlapOfEvolvedState) {
  const double h = 0.05;
  const double kappa = 0.5 / h;
  const double tau = 0.7;
  const auto integrand = [&](double x) {
    return std::sqrt(kappa) * std::exp(-kappa * std::abs(x)) * evolved_ground_state(x, tau, kappa, h);
  };
  const double L = 40.0 / kappa;
  const cplx overlap = integrate(integrand, -L, 0.0, 200) + integrate(integrand, 0.0, L, 200);
  EXPECT_LT(std::abs(overlap - free_return_amplitude(tau, kappa, h)), 1e-10);
}

}  // namespace
}  // namespace deltaion
