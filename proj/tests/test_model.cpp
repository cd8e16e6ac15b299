#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deltaion/model.hpp"

namespace deltaion {
namespace {

TEST(Model, PhysicalParametersMapToTransformedUnits) {
  const auto p = from_physical(0.7, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(p.gamma, 0.7 * 0.5 / 2.0);
  EXPECT_DOUBLE_EQ(p.z, 4.0 / (4.0 * 0.125));
  EXPECT_DOUBLE_EQ(p.h, 0.125 / 4.0);
  EXPECT_DOUBLE_EQ(p.n_io, 0.49 / 1.0);
}

TEST(Model, DerivedQuantitiesAreConsistent) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double alpha = std::exp(log_scale(rng));
    const double mu = std::exp(log_scale(rng));
    const double omega = std::exp(log_scale(rng));
    const auto p = from_physical(alpha, mu, omega);
    EXPECT_NEAR(p.h * 4.0 * p.z, 1.0, 1e-14);
    EXPECT_NEAR(p.n_io / (2.0 * p.gamma * p.gamma * p.z), 1.0, 1e-13);
  }
}

TEST(Model, DimensionlessRoundTrip) {
  for (double gamma : {0.1, 0.7, 1.1, 2.5}) {
    for (double z : {0.5, 6.0, 14.25, 20.0}) {
      const auto p = from_dimensionless(gamma, z);
      const auto back = from_physical(p.alpha, p.mu, p.omega);
      EXPECT_NEAR(back.gamma, gamma, 1e-14 * gamma);
      EXPECT_NEAR(back.z, z, 1e-13 * z);
      EXPECT_NEAR(back.h, p.h, 1e-14 * p.h);
      EXPECT_NEAR(back.n_io, p.n_io, 1e-13 * p.n_io);
    }
  }
}

TEST(Model, RejectsNonPositiveInput) {
  EXPECT_THROW(from_physical(0.0, 1.0, 1.0), domain_error);
  EXPECT_THROW(from_physical(1.0, -1.0, 1.0), domain_error);
  EXPECT_THROW(from_physical(1.0, 1.0, std::nan("")), domain_error);
  EXPECT_THROW(from_dimensionless(0.7, 0.0), domain_error);
  EXPECT_THROW(from_dimensionless(-0.7, 1.0), domain_error);
}

TEST(Model, GroundStateIsNormalized) {
  const auto p = from_dimensionless(0.7, 10.0);
  const auto psi = ground_state(p);
  EXPECT_DOUBLE_EQ(psi.energy, -0.245);
  // int psi^2 = 2 * norm^2 / (2 decay) in closed form; check by trapezoid.
  const double L = 40.0 / psi.decay;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -L + 2.0 * L * i / n;
    const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += weight * psi(x) * psi(x);
  }
  EXPECT_NEAR(sum * 2.0 * L / n, 1.0, 1e-6);
}

TEST(Model, ThresholdsCloseChannelsExactly) {
  for (double gamma : {0.5, 0.7, 1.1}) {
    for (int k = 1; k <= 30; ++k) {
      const double zk = channel_threshold(k, gamma);
      EXPECT_NEAR(energy_balance(k, gamma, zk), 0.0, 1e-12);
      EXPECT_TRUE(channel_open(k, gamma, zk * (1.0 - 1e-9)));
      EXPECT_FALSE(channel_open(k, gamma, zk * (1.0 + 1e-9)));
    }
    EXPECT_NEAR(channel_threshold(2, gamma) - channel_threshold(1, gamma), threshold_spacing(gamma), 1e-15);
  }
  EXPECT_NEAR(threshold_spacing(0.7), 0.505050505050505, 1e-14);
  EXPECT_THROW(channel_threshold(0, 0.7), domain_error);
}

TEST(Model, LowestOpenChannel) {
  // gamma = 0.7: z_k = k / 1.98.
  EXPECT_EQ(lowest_open_channel(0.7, 10.0), 20);
  EXPECT_EQ(lowest_open_channel(0.7, 20.0 / 1.98), 20);
  EXPECT_EQ(lowest_open_channel(0.7, 1e-6), 1);
  for (double z = 0.3; z < 20.0; z += 0.173) {
    const int k = lowest_open_channel(0.7, z);
    EXPECT_TRUE(channel_open(k, 0.7, z));
    if (k > 1) {
      EXPECT_FALSE(channel_open(k - 1, 0.7, z));
    }
  }
}

}  // namespace
}  // namespace deltaion
