#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tvpk/dgp.hpp"

using namespace tvpk;

namespace {

double mean(const Eigen::VectorXd& v) { return v.mean(); }

double variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

TEST(Paths, BreakJumpAtFloorTauT) {
  auto p = generate_tvp_path(TvpSpec{BreakPath{{0.5}, {0.0, 2.0}, 0.2, 1.0}}, 100, 1);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(p[t], 0.0) << t;
  const double jump = 2.0 / std::pow(100.0, 0.2);
  EXPECT_NEAR(jump, 0.7962, 5e-5);
  for (int t = 50; t < 100; ++t) EXPECT_DOUBLE_EQ(p[t], jump) << t;
}

TEST(Paths, ZeroScaleRandomWalkIsFlat) {
  RandomWalkPath rw;
  rw.mu = 0.7;
  rw.driver_scale = 0.0;
  auto p = generate_tvp_path(TvpSpec{rw}, 500, 9);
  for (Eigen::Index t = 0; t < p.size(); ++t) EXPECT_EQ(p[t], 0.7);
}

TEST(Paths, RescaledRandomWalkEndpointVariance) {
  // beta_T = T^-1/2 * sum of T standard normals has unit variance
  const std::size_t T = 50, n = 100000;
  Eigen::VectorXd endpoint(n);
  for (std::size_t s = 0; s < n; ++s)
    endpoint[static_cast<Eigen::Index>(s)] = generate_tvp_path(TvpSpec{RandomWalkPath{}}, T, s)[T - 1];
  EXPECT_NEAR(mean(endpoint), 0.0, 0.015);
  EXPECT_NEAR(variance(endpoint), 1.0, 0.02);
}

TEST(Paths, SmoothCatalogExact) {
  const std::size_t T = 64;
  auto bump = generate_tvp_path(TvpSpec{SmoothPath{"bump_trend", {}}}, T, 0);
  auto four = generate_tvp_path(TvpSpec{SmoothPath{"fourier4", {}}}, T, 0);
  auto poly = generate_tvp_path(TvpSpec{SmoothPath{"poly", {1.0, -2.0, 0.5}}}, T, 0);
  constexpr double pi = std::numbers::pi;
  for (std::size_t t = 1; t <= T; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(T);
    const auto i = static_cast<Eigen::Index>(t - 1);
    EXPECT_EQ(bump[i], 2.0 * u + std::exp(-16.0 * (u - 0.5) * (u - 0.5)));
    EXPECT_NEAR(four[i], (std::sin(pi * u) + std::cos(2 * pi * u) + std::sin(3 * pi * u) + std::cos(4 * pi * u)) / 4.0,
                1e-15);
    EXPECT_NEAR(poly[i], 1.0 - 2.0 * u + 0.5 * u * u, 1e-15);
  }
  EXPECT_THROW(generate_tvp_path(TvpSpec{SmoothPath{"nope", {}}}, T, 0), InvalidSpec);
}

TEST(Paths, ThresholdUsesGivenSeries) {
  ThresholdPath th;
  th.theta1 = 1.0;
  th.c = 2.0;
  th.alpha = 0.0;
  th.threshold_series = {-1.0, 0.5, 0.0, 2.0};
  auto p = generate_tvp_path(TvpSpec{th}, 4, 0);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 3.0);
  EXPECT_EQ(p[2], 1.0);
  EXPECT_EQ(p[3], 3.0);
}

TEST(Paths, MixtureIsPointwiseSum) {
  TvpSpec a{RandomWalkPath{}};
  TvpSpec b{BreakPath{{0.3, 0.7}, {0.0, 1.0, -1.0}, 0.4, 1.5}};
  TvpSpec mix{MixturePath{{a, b}}};
  const std::uint64_t seed = 77;
  auto pm = generate_tvp_path(mix, 400, seed);
  auto pa = generate_tvp_path(a, 400, derive_seed(seed, {0}));
  auto pb = generate_tvp_path(b, 400, derive_seed(seed, {1}));
  for (Eigen::Index t = 0; t < 400; ++t) EXPECT_EQ(pm[t], pa[t] + pb[t]);
}

TEST(Errors, GarchUnconditionalVariance) {
  auto e = generate_errors(GarchErrors{}, 1000000, 5);
  EXPECT_NEAR(variance(e), 1.0, 0.05);
  EXPECT_NEAR(mean(e), 0.0, 0.01);
}

TEST(Errors, GarchValidation) {
  EXPECT_THROW(generate_errors(GarchErrors{0.1, 0.5, 0.5, 500}, 10, 1), InvalidSpec);
  EXPECT_THROW(generate_errors(GarchErrors{0.1, 0.3, 0.6, 100}, 10, 1), InvalidSpec);
}

TEST(Regressors, Ar1Autocorrelation) {
  const std::size_t T = 100000;
  RowMatrix X = generate_regressors(RegressorSpec{}, T, 3);
  Eigen::VectorXd x = X.col(0);
  const double m = x.mean();
  double num = 0, den = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    den += (x[i] - m) * (x[i] - m);
    if (t > 0) num += (x[i] - m) * (x[i - 1] - m);
  }
  EXPECT_NEAR(num / den, 0.5, 0.02);
  EXPECT_NEAR(variance(x), 4.0 / 3.0, 0.05);
}

TEST(Regressors, InterceptColumn) {
  RowMatrix X = generate_regressors(RegressorSpec{Ar1Regressor{}, true}, 20, 3);
  ASSERT_EQ(X.cols(), 2);
  EXPECT_TRUE((X.col(0).array() == 1.0).all());
  EXPECT_THROW(generate_regressors(RegressorSpec{Ar1Regressor{1.0, 1.0}, false}, 20, 3), InvalidSpec);
}

TEST(Dataset, NoiselessEqualsSignal) {
  auto sim = simulate_dataset(TvpSpec{RandomWalkPath{}}, RegressorSpec{}, IidErrors{0.0}, 300, 4);
  for (Eigen::Index t = 0; t < 300; ++t)
    EXPECT_EQ(sim.data.y()[t], sim.data.X()(t, 0) * sim.beta(t, 0));
}

TEST(Dataset, SeedDeterminism) {
  auto a = simulate_dataset(TvpSpec{RandomWalkPath{}}, RegressorSpec{}, GarchErrors{}, 500, 42);
  auto b = simulate_dataset(TvpSpec{RandomWalkPath{}}, RegressorSpec{}, GarchErrors{}, 500, 42);
  auto c = simulate_dataset(TvpSpec{RandomWalkPath{}}, RegressorSpec{}, GarchErrors{}, 500, 43);
  EXPECT_EQ(a.data.y(), b.data.y());
  EXPECT_EQ(a.data.X(), b.data.X());
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_NE(a.data.y(), c.data.y());
}

TEST(Dataset, StreamIndependence) {
  auto s1 = StreamSeeds::from_master(10);
  auto s2 = s1;
  s2.error = 12345;
  auto a = simulate_dataset({TvpSpec{RandomWalkPath{}}}, RegressorSpec{}, IidErrors{}, 300, s1);
  auto b = simulate_dataset({TvpSpec{RandomWalkPath{}}}, RegressorSpec{}, IidErrors{}, 300, s2);
  EXPECT_EQ(a.data.X(), b.data.X());
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_NE(a.data.y(), b.data.y());
}

TEST(Dataset, PathCountMustMatchColumns) {
  EXPECT_THROW(simulate_dataset({TvpSpec{RandomWalkPath{}}}, RegressorSpec{Ar1Regressor{}, true}, IidErrors{}, 50,
                                StreamSeeds::from_master(1)),
               InvalidSpec);
}

TEST(HolderProbe, LinearPathExponentOne) {
  auto p = generate_tvp_path(TvpSpec{SmoothPath{"linear2u", {}}}, 10000, 0);
  auto probe = holder_smoothness_probe(p);
  ASSERT_TRUE(probe.applicable);
  EXPECT_NEAR(probe.alpha, 1.0, 0.15);
}

TEST(HolderProbe, RandomWalkExponentHalf) {
  auto p = generate_tvp_path(TvpSpec{RandomWalkPath{}}, 10000, 31);
  auto probe = holder_smoothness_probe(p);
  ASSERT_TRUE(probe.applicable);
  EXPECT_NEAR(probe.alpha, 0.5, 0.15);
}

TEST(HolderProbe, ConstantPathNotApplicable) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(2000, 1.5);
  auto probe = holder_smoothness_probe(p);
  EXPECT_FALSE(probe.applicable);
  for (double o : probe.oscillations) EXPECT_EQ(o, 0.0);
}

} // namespace
