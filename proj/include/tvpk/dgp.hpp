#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <deque>
#include <limits>
#include <type_traits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tvpk/data.hpp"
#include "tvpk/errors.hpp"
#include "tvpk/rng.hpp"

namespace tvpk {

// ---------------------------------------------------------------------------
// Coefficient path specifications
// ---------------------------------------------------------------------------

/// Deterministic f(u) evaluated at u = t/T (t = 1..T).
///
/// Built-in names: "identity" (u), "linear2u" (2u), "bump_trend"
/// (2u + exp(-16 (u - 0.5)^2)), "fourier4" ((sin pi u + cos 2 pi u +
/// sin 3 pi u + cos 4 pi u) / 4), "poly" (sum_k coefficients[k] u^k).
struct SmoothPath {
  std::string function = "identity";
  std::vector<double> coefficients;
};

enum class Driver { Gaussian, LogNormal };

//! beta_t = mu + T^-scale_exponent * sum_{i<=t} v_i.
struct RandomWalkPath {
  double mu = 0.0;
  Driver driver = Driver::Gaussian;
  double driver_scale = 1.0; ///< multiplies every increment draw
  double scale_exponent = 0.5;
};

/// Piecewise constant path delta * levels[k] / T^alpha where k counts the
/// break fractions tau_i with t > floor(tau_i T).
struct BreakPath {
  std::vector<double> fractions{0.5};
  std::vector<double> levels{0.0, 2.0};
  double alpha = 0.2;
  double delta = 1.0;
};

/// beta_t = theta1 + (c / T^alpha) 1{q_t > eta}; q_t is i.i.d. N(0,1)
/// from the path's stream unless `threshold_series` is given.
struct ThresholdPath {
  double theta1 = 0.0;
  double c = 1.0;
  double alpha = 0.5;
  double eta = 0.0;
  std::vector<double> threshold_series;
};

struct TvpSpec;

//! Pointwise sum of components; component k draws from substream (seed, k).
struct MixturePath {
  std::vector<TvpSpec> components;
};

struct TvpSpec {
  std::variant<SmoothPath, RandomWalkPath, BreakPath, ThresholdPath, MixturePath> variant;
};

// ---------------------------------------------------------------------------
// Error and regressor processes
// ---------------------------------------------------------------------------

struct IidErrors {
  double sigma = 1.0;
};

//! sigma_t^2 = omega + arch e_{t-1}^2 + garch sigma_{t-1}^2, started at the stationary variance.
struct GarchErrors {
  double omega = 0.1;
  double arch = 0.3;
  double garch = 0.6;
  std::size_t burn_in = 500;
};

using ErrorSpec = std::variant<IidErrors, GarchErrors>;

struct Ar1Regressor {
  double phi = 0.5;
  double innovation_sd = 1.0;
};

struct ConstantRegressor {};

struct CustomRegressor {
  RowMatrix X;
};

struct RegressorSpec {
  std::variant<Ar1Regressor, ConstantRegressor, CustomRegressor> variant = Ar1Regressor{};
  bool intercept = false; ///< prepend a column of ones

  std::size_t columns() const {
    std::size_t k = 1;
    if (const auto* c = std::get_if<CustomRegressor>(&variant)) k = static_cast<std::size_t>(c->X.cols());
    return k + (intercept ? 1 : 0);
  }
};

namespace detail {

inline void validate(const TvpSpec& spec) {
  std::visit(
    [](const auto& s) {
      using S = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<S, RandomWalkPath>) {
        if (!(s.driver_scale >= 0.0)) throw InvalidSpec("random walk: driver_scale must be nonnegative");
      } else if constexpr (std::is_same_v<S, BreakPath>) {
        if (s.levels.size() != s.fractions.size() + 1)
          throw InvalidSpec("break: need exactly one more level than break fractions");
        for (std::size_t i = 0; i < s.fractions.size(); ++i) {
          if (!(s.fractions[i] > 0.0 && s.fractions[i] < 1.0)) throw InvalidSpec("break: fractions must lie in (0, 1)");
          if (i > 0 && !(s.fractions[i] > s.fractions[i - 1]))
            throw InvalidSpec("break: fractions must be strictly increasing");
        }
      } else if constexpr (std::is_same_v<S, MixturePath>) {
        if (s.components.empty()) throw InvalidSpec("mixture: no components");
        for (const auto& c : s.components) validate(c);
      } else if constexpr (std::is_same_v<S, SmoothPath>) {
        static const char* known[] = {"identity", "linear2u", "bump_trend", "fourier4", "poly"};
        bool ok = false;
        for (const char* k : known) ok = ok || s.function == k;
        if (!ok) throw InvalidSpec("smooth: unknown function '" + s.function + "'");
      }
    },
    spec.variant);
}

inline double smooth_value(const SmoothPath& s, double u) {
  constexpr double pi = std::numbers::pi;
  if (s.function == "identity") return u;
  if (s.function == "linear2u") return 2.0 * u;
  if (s.function == "bump_trend") return 2.0 * u + std::exp(-16.0 * (u - 0.5) * (u - 0.5));
  if (s.function == "fourier4")
    return (std::sin(pi * u) + std::cos(2 * pi * u) + std::sin(3 * pi * u) + std::cos(4 * pi * u)) / 4.0;
  double v = 0.0, pw = 1.0;
  for (double c : s.coefficients) {
    v += c * pw;
    pw *= u;
  }
  return v;
}

} // namespace detail

/// Coefficient path of length T, deterministic given `seed`.
inline Eigen::VectorXd generate_tvp_path(const TvpSpec& spec, std::size_t T, std::uint64_t seed) {
  if (T < 2) throw InvalidSpec("path length T must be at least 2");
  detail::validate(spec);
  const auto n = static_cast<Eigen::Index>(T);
  const double Td = static_cast<double>(T);
  Eigen::VectorXd path(n);
  std::visit(
    [&](const auto& s) {
      using S = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<S, SmoothPath>) {
        for (Eigen::Index t = 0; t < n; ++t) path[t] = detail::smooth_value(s, static_cast<double>(t + 1) / Td);
      } else if constexpr (std::is_same_v<S, RandomWalkPath>) {
        StdNormal z(seed);
        const double scale = std::pow(Td, -s.scale_exponent);
        double level = s.mu;
        for (Eigen::Index t = 0; t < n; ++t) {
          const double draw = s.driver == Driver::Gaussian ? z() : std::exp(z());
          level += s.driver_scale * draw * scale;
          path[t] = level;
        }
      } else if constexpr (std::is_same_v<S, BreakPath>) {
        const double scale = s.delta / std::pow(Td, s.alpha);
        for (Eigen::Index t = 0; t < n; ++t) {
          std::size_t k = 0;
          for (double tau : s.fractions)
            if (static_cast<double>(t + 1) > std::floor(tau * Td)) ++k;
          path[t] = s.levels[k] * scale;
        }
      } else if constexpr (std::is_same_v<S, ThresholdPath>) {
        if (!s.threshold_series.empty() && s.threshold_series.size() != T)
          throw InvalidSpec("threshold: series length differs from T");
        StdNormal z(seed);
        const double effect = s.c / std::pow(Td, s.alpha);
        for (Eigen::Index t = 0; t < n; ++t) {
          const double qt = s.threshold_series.empty() ? z() : s.threshold_series[static_cast<std::size_t>(t)];
          path[t] = s.theta1 + (qt > s.eta ? effect : 0.0);
        }
      } else {
        path.setZero();
        for (std::size_t k = 0; k < s.components.size(); ++k)
          path += generate_tvp_path(s.components[k], T, derive_seed(seed, {k}));
      }
    },
    spec.variant);
  return path;
}

//! Independent substream seeds for the three random inputs of a dataset.
struct StreamSeeds {
  std::uint64_t tvp;
  std::uint64_t regressor;
  std::uint64_t error;

  static StreamSeeds from_master(std::uint64_t seed) noexcept {
    return {derive_seed(seed, {1}), derive_seed(seed, {2}), derive_seed(seed, {3})};
  }
};

inline RowMatrix generate_regressors(const RegressorSpec& spec, std::size_t T, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(T);
  RowMatrix body;
  std::visit(
    [&](const auto& s) {
      using S = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<S, Ar1Regressor>) {
        if (!(std::fabs(s.phi) < 1.0)) throw InvalidSpec("AR(1) regressor: |phi| must be below 1");
        StdNormal z(seed);
        body.resize(n, 1);
        // stationary start
        double x = z() * s.innovation_sd / std::sqrt(1.0 - s.phi * s.phi);
        for (Eigen::Index t = 0; t < n; ++t) {
          x = s.phi * x + s.innovation_sd * z();
          body(t, 0) = x;
        }
      } else if constexpr (std::is_same_v<S, ConstantRegressor>) {
        body = RowMatrix::Ones(n, 1);
      } else {
        if (s.X.rows() != n) throw InvalidSpec("custom regressor: row count differs from T");
        body = s.X;
      }
    },
    spec.variant);
  if (!spec.intercept) return body;
  RowMatrix X(n, body.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(body.cols()) = body;
  return X;
}

inline Eigen::VectorXd generate_errors(const ErrorSpec& spec, std::size_t T, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(T);
  Eigen::VectorXd e(n);
  StdNormal z(seed);
  if (const auto* iid = std::get_if<IidErrors>(&spec)) {
    if (!(iid->sigma >= 0.0)) throw InvalidSpec("i.i.d. errors: sigma must be nonnegative");
    for (Eigen::Index t = 0; t < n; ++t) e[t] = iid->sigma * z();
    return e;
  }
  const auto& g = std::get<GarchErrors>(spec);
  if (!(g.omega > 0.0 && g.arch >= 0.0 && g.garch >= 0.0)) throw InvalidSpec("GARCH: parameters must be positive");
  if (!(g.arch + g.garch < 1.0)) throw InvalidSpec("GARCH: arch + garch must be below 1");
  if (g.burn_in < 200) throw InvalidSpec("GARCH: burn_in must be at least 200");
  double var = g.omega / (1.0 - g.arch - g.garch);
  double prev = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < g.burn_in + T; ++k) {
    if (!first) var = g.omega + g.arch * prev * prev + g.garch * var;
    first = false;
    prev = std::sqrt(var) * z();
    if (k >= g.burn_in) e[static_cast<Eigen::Index>(k - g.burn_in)] = prev;
  }
  return e;
}

struct SimulatedData {
  TimeSeriesData data;
  RowMatrix beta; ///< true coefficient path, T x p
};

/// y_t = x_t' beta_t + e_t with one TvpSpec per regressor column.
inline SimulatedData simulate_dataset(const std::vector<TvpSpec>& tvp, const RegressorSpec& reg,
                                      const ErrorSpec& err, std::size_t T, StreamSeeds seeds) {
  RowMatrix X = generate_regressors(reg, T, seeds.regressor);
  if (static_cast<std::size_t>(X.cols()) != tvp.size())
    throw InvalidSpec("simulate: " + std::to_string(tvp.size()) + " coefficient paths for " +
                      std::to_string(X.cols()) + " regressor columns");
  const auto n = static_cast<Eigen::Index>(T);
  RowMatrix beta(n, X.cols());
  for (std::size_t j = 0; j < tvp.size(); ++j)
    beta.col(static_cast<Eigen::Index>(j)) = generate_tvp_path(tvp[j], T, derive_seed(seeds.tvp, {j}));
  Eigen::VectorXd y = generate_errors(err, T, seeds.error);
  for (Eigen::Index t = 0; t < n; ++t) y[t] += X.row(t).dot(beta.row(t));
  return {TimeSeriesData(std::move(y), std::move(X)), std::move(beta)};
}

inline SimulatedData simulate_dataset(const TvpSpec& tvp, const RegressorSpec& reg, const ErrorSpec& err,
                                      std::size_t T, std::uint64_t seed) {
  return simulate_dataset(std::vector<TvpSpec>{tvp}, reg, err, T, StreamSeeds::from_master(seed));
}

// ---------------------------------------------------------------------------
// Smoothness probe
// ---------------------------------------------------------------------------

struct HolderProbe {
  bool applicable = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> window_sizes;  ///< a in observations
  std::vector<double> oscillations;  ///< mean_t max_{|t-j|<=a} |beta_t - beta_j|
};

/// Log-log slope of mean local oscillation against a/T.
///
/// Diagnostic only: a path in the type-a class with exponent alpha should
/// give a slope near alpha.
inline HolderProbe holder_smoothness_probe(const Eigen::VectorXd& path,
                                           const std::vector<double>& window_fractions = {0.005, 0.01, 0.02, 0.04, 0.08}) {
  const auto T = static_cast<std::size_t>(path.size());
  if (T < 500) throw InvalidInput("holder probe: need T >= 500");
  HolderProbe out;
  std::vector<double> lx, ly;
  for (double f : window_fractions) {
    const auto a = static_cast<std::size_t>(std::max(1.0, std::round(f * static_cast<double>(T))));
    // sliding max/min over [t-a, t+a]
    std::deque<std::size_t> qmax, qmin;
    double total = 0.0;
    std::size_t next = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t hi = std::min(T - 1, t + a);
      for (; next <= hi; ++next) {
        while (!qmax.empty() && path[static_cast<Eigen::Index>(qmax.back())] <= path[static_cast<Eigen::Index>(next)])
          qmax.pop_back();
        qmax.push_back(next);
        while (!qmin.empty() && path[static_cast<Eigen::Index>(qmin.back())] >= path[static_cast<Eigen::Index>(next)])
          qmin.pop_back();
        qmin.push_back(next);
      }
      const std::size_t lo = t >= a ? t - a : 0;
      while (qmax.front() < lo) qmax.pop_front();
      while (qmin.front() < lo) qmin.pop_front();
      const double v = path[static_cast<Eigen::Index>(t)];
      total += std::max(path[static_cast<Eigen::Index>(qmax.front())] - v, v - path[static_cast<Eigen::Index>(qmin.front())]);
    }
    const double osc = total / static_cast<double>(T);
    out.window_sizes.push_back(static_cast<double>(a));
    out.oscillations.push_back(osc);
    if (osc > 0.0) {
      lx.push_back(std::log(static_cast<double>(a) / static_cast<double>(T)));
      ly.push_back(std::log(osc));
    }
  }
  if (lx.size() < 2 || lx.size() < window_fractions.size()) return out;
  const auto k = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return out;
  out.applicable = true;
  out.alpha = sxy / sxx;
  if (lx.size() > 2) {
    double sse = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - my - out.alpha * (lx[i] - mx);
      sse += r * r;
    }
    out.standard_error = std::sqrt(sse / (k - 2.0) / sxx);
  }
  return out;
}

} // namespace tvpk
