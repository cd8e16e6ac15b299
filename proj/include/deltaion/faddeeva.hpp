#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-i z) and the scaled complementary
// error function erfcx(z) = exp(z^2) erfc(z) = w(i z), for complex arguments.
//
// Upper half plane:
//   * Im z >= kCfHeight or |Re z| >= kCfWidth: Laplace continued fraction,
//     evaluated with the modified Lentz algorithm.
//   * otherwise: start from the continued fraction at height kCfHeight and walk
//     down to the target with short Taylor steps.  The Taylor coefficients follow
//     from w' = -2 z w + 2i/sqrt(pi):
//       c_{n+1} = -2 (z0 c_n + c_{n-1}) / (n + 1),  c_1 = -2 z0 c_0 + 2i/sqrt(pi).
//     Walking toward the real axis is stable: the homogeneous solution exp(-z^2)
//     shrinks along the way.
// Lower half plane: w(z) = 2 exp(-z^2) - w(-z).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace deltaion {

using cplx = std::complex<double>;

namespace detail {

inline constexpr double kCfHeight = 3.0;
inline constexpr double kCfWidth = 12.0;
inline constexpr double kTaylorStep = 0.2;

inline cplx faddeeva_cf(cplx z) {
  // w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  cplx f = z;
  cplx c = f;
  cplx d = 0.0;
  for (int n = 1; n < 100000; ++n) {
    const double a = -0.5 * n;
    d = z + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return cplx(0.0, std::numbers::inv_sqrtpi) / f;
}

inline cplx faddeeva_taylor_step(cplx z0, cplx w0, cplx step) {
  const cplx two_i_over_sqrt_pi(0.0, 2.0 * std::numbers::inv_sqrtpi);
  cplx c_prev = w0;
  cplx c_cur = -2.0 * z0 * w0 + two_i_over_sqrt_pi;
  cplx power = step;
  cplx sum = w0 + c_cur * power;
  for (int n = 1; n < 200; ++n) {
    const cplx c_next = -2.0 * (z0 * c_cur + c_prev) / static_cast<double>(n + 1);
    power *= step;
    const cplx term = c_next * power;
    sum += term;
    c_prev = c_cur;
    c_cur = c_next;
    if (std::abs(term) < 1e-18 * std::abs(sum) && n > 4) break;
  }
  return sum;
}

inline cplx faddeeva_upper(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (y >= kCfHeight || std::abs(x) >= kCfWidth) return faddeeva_cf(z);
  cplx z0(x, kCfHeight);
  cplx w = faddeeva_cf(z0);
  const int steps = static_cast<int>(std::ceil((kCfHeight - y) / kTaylorStep));
  const cplx step(0.0, -(kCfHeight - y) / steps);
  for (int s = 0; s < steps; ++s) {
    w = faddeeva_taylor_step(z0, w, step);
    z0 += step;
  }
  return w;
}

}  // namespace detail

inline cplx faddeeva_w(cplx z) {
  if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - detail::faddeeva_upper(-z);
}

/// exp(z^2) erfc(z).
inline cplx erfcx(cplx z) { return faddeeva_w(cplx(-z.imag(), z.real())); }

/// erfc(z); may overflow where exp(-z^2) does.
inline cplx erfc(cplx z) { return std::exp(-z * z) * erfcx(z); }

inline cplx erf(cplx z) { return 1.0 - erfc(z); }

}  // namespace deltaion
