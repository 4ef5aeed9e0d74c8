#include <cmath>

#include <gtest/gtest.h>

#include "tvpk/kernels.hpp"
#include "tvpk/stats.hpp"

using namespace tvpk;

namespace {

constexpr Kernel kAll[] = {Kernel::Epanechnikov, Kernel::Uniform};

TEST(Kernel, PointValues) {
  EXPECT_DOUBLE_EQ(evaluate(Kernel::Epanechnikov, 0.0), 0.75);
  EXPECT_DOUBLE_EQ(evaluate(Kernel::Epanechnikov, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(evaluate(Kernel::Uniform, 0.3), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(Kernel::Uniform, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(Kernel::Uniform, 1.0000001), 0.0);
}

TEST(Kernel, L2NormAnalytic) {
  EXPECT_DOUBLE_EQ(l2_norm_squared(Kernel::Epanechnikov), 0.6);
  EXPECT_DOUBLE_EQ(l2_norm_squared(Kernel::Uniform), 0.5);
}

TEST(Kernel, L2NormQuadratureAgrees) {
  // independent midpoint-rule oracle on a fine grid
  for (Kernel k : kAll) {
    const int n = 2000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * 2.0 / n;
      const double v = evaluate(k, x);
      s += v * v;
    }
    s *= 2.0 / n;
    EXPECT_NEAR(s, l2_norm_squared(k), 1e-8);
    EXPECT_NEAR(l2_norm_squared_quadrature(k), l2_norm_squared(k), 1e-8);
  }
}

TEST(Kernel, GridProperties) {
  for (Kernel k : kAll) {
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
      const double x = -2.0 + 4.0 * i / n;
      const double v = evaluate(k, x);
      EXPECT_GE(v, 0.0);
      if (std::fabs(x) > 1.0) {
        EXPECT_EQ(v, 0.0) << x;
      }
      EXPECT_EQ(v, evaluate(k, -x)) << x;
    }
  }
}

TEST(Kernel, UnitIntegral) {
  for (Kernel k : kAll) {
    const double I = simpson([k](double x) { return evaluate(k, x); }, -1.0, 1.0);
    EXPECT_NEAR(I, 1.0, 1e-6);
  }
}

TEST(Kernel, LipschitzOnSupport) {
  for (Kernel k : kAll) {
    const int n = 10000;
    const double dx = 2.0 / n;
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + i * dx;
      const double slope = std::fabs(evaluate(k, x + dx) - evaluate(k, x)) / dx;
      EXPECT_LE(slope, lipschitz_bound(k) + 1e-9);
    }
  }
}

TEST(Kernel, NameRegistry) {
  for (Kernel k : kAll) EXPECT_EQ(kernel_from_name(kernel_name(k)), k);
  EXPECT_THROW(kernel_from_name("gaussian"), ConfigError);
}

TEST(Stats, NormalQuantile) {
  EXPECT_NEAR(two_sided_critical(0.05), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-14);
  for (double p : {1e-6, 0.01, 0.2, 0.7, 0.999})
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 * std::max(1.0, 1.0 / p));
}

} // namespace
