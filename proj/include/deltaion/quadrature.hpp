#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cstddef>

namespace deltaion {

/// Full Gauss-Legendre rule on [-1, 1]; Boost stores only the non-negative half.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        nodes[k] = 0.0;
        weights[k++] = w[i];
        continue;
      }
      nodes[k] = -x[i];
      weights[k++] = w[i];
      nodes[k] = x[i];
      weights[k++] = w[i];
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }
};

}  // namespace deltaion
