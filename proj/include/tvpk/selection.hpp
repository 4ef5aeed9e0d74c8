#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvpk/data.hpp"
#include "tvpk/errors.hpp"
#include "tvpk/estimator.hpp"
#include "tvpk/kernels.hpp"
#include "tvpk/parallel.hpp"
#include "tvpk/rng.hpp"
#include "tvpk/stats.hpp"

namespace tvpk {

// ---------------------------------------------------------------------------
// Admissible bandwidth / smoothness algebra
// ---------------------------------------------------------------------------

//! Smoothness class: type-a bounds growing oscillation, type-b bounded jumps.
enum class SmoothnessType { TypeA, TypeB };

//! Open interval (lower, upper); `upper` may be +inf.
struct OpenInterval {
  double lower;
  double upper;
  bool empty() const noexcept { return !(lower < upper); }
  bool contains(double v) const noexcept { return v > lower && v < upper; }
};

/// Bandwidth exponents giving sqrt(Th)-consistent, asymptotically normal
/// estimation for smoothness alpha.
inline OpenInterval admissible_gamma_range(double alpha, SmoothnessType type) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("alpha must be positive and finite");
  if (type == SmoothnessType::TypeA) return {-1.0, -1.0 / (2.0 * alpha + 1.0)};
  return {-1.0, std::min(2.0 * alpha - 1.0, 0.0)};
}

//! Smoothness values estimable without asymptotic bias at exponent gamma.
inline OpenInterval admissible_alpha_set(double gamma, SmoothnessType type) {
  if (!(gamma > -1.0 && gamma < 0.0)) throw InvalidGamma("gamma must lie in (-1, 0)");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (type == SmoothnessType::TypeA) return {-(1.0 + 1.0 / gamma) / 2.0, inf};
  return {(1.0 + gamma) / 2.0, inf};
}

// ---------------------------------------------------------------------------
// Selection types
// ---------------------------------------------------------------------------

/// Candidate gamma values on [lower, upper], a subset of (-1, 0).
class GammaGrid {
public:
  GammaGrid(std::vector<double> values, std::optional<double> lower = {}, std::optional<double> upper = {})
    : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInput("GammaGrid: grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > -1.0 && values_[i] < 0.0)) throw InvalidGamma("GammaGrid: values must lie in (-1, 0)");
      if (i > 0 && !(values_[i] > values_[i - 1])) throw InvalidInput("GammaGrid: values must be strictly increasing");
    }
    lower_ = lower.value_or(values_.front());
    upper_ = upper.value_or(values_.back());
    if (!(lower_ <= values_.front() && upper_ >= values_.back()))
      throw InvalidInput("GammaGrid: bounds must enclose the grid values");
  }

  //! Evenly spaced grid lower, lower + step, ..., upper (inclusive up to rounding).
  static GammaGrid uniform(double lower, double upper, double step) {
    if (!(step > 0.0) || upper < lower) throw InvalidInput("GammaGrid: invalid range");
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) v.push_back(lower + step * static_cast<double>(k));
    return GammaGrid(std::move(v), lower, upper);
  }

  //! Grid used for the simulation studies: {-0.5, -0.4, -0.33, -0.2}.
  static GammaGrid default_grid() { return GammaGrid({-0.5, -0.4, -0.33, -0.2}); }

  const std::vector<double>& values() const noexcept { return values_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  std::vector<double> values_;
  double lower_;
  double upper_;
};

enum class Multiplier { GaussianWild };

//! How a bootstrap interval "covers" when p > 1.
enum class CoverageMode {
  Joint,          ///< all p coefficient intervals must cover
  PerCoefficient, ///< average of the p individual indicators
};

struct BootstrapConfig {
  std::size_t B = 200;
  double q = 0.05;
  double q_bar = 0.10;
  std::uint64_t seed = 20240101;
  Multiplier multiplier = Multiplier::GaussianWild;
  CoverageMode coverage = CoverageMode::Joint;
  bool exclude_boundary = true;
  VarianceMode variance = VarianceMode::Local; ///< standard error of the bootstrap fit
  std::size_t workers = 1;

  void validate() const {
    if (B < 50) throw ConfigError("bootstrap: B must be at least 50");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("bootstrap: q must lie in (0, 1)");
    if (!(q_bar > 0.0 && q_bar < 1.0)) throw ConfigError("bootstrap: q_bar must lie in (0, 1)");
  }
};

//! One (gamma1, gamma2) cell of the bootstrap coverage matrix.
struct CoverageCell {
  double gamma1;
  double gamma2;
  double cr;                    ///< mean over the averaged t of per_t
  std::vector<double> per_t;    ///< empirical coverage at each t, a multiple of 1/B (1/(pB) per-coefficient)
  std::vector<bool> averaged;   ///< which t entered the mean
};

struct CvPoint {
  double x; ///< gamma or c
  double cv;
};

struct SelectionResult {
  double gamma_hat = std::numeric_limits<double>::quiet_NaN();
  double c_hat = 1.0;
  std::vector<double> upsilon;      ///< admissible gamma1 values (bootstrap)
  std::vector<CoverageCell> cr_matrix;
  std::vector<CvPoint> cv_curve;    ///< CV(gamma) for the CV selector
  std::vector<CvPoint> c_curve;     ///< CV(c) when the scale was selected
  std::size_t m = 0;                ///< leave-(2m+1)-out parameter of the CV curve

  const CoverageCell* cell(double g1, double g2) const {
    for (const auto& c : cr_matrix)
      if (c.gamma1 == g1 && c.gamma2 == g2) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// CV = T^-1 sum_t (y_t - x_t' beta_{-t,m})^2 with h = c T^gamma.
inline double cross_validation_criterion(const TimeSeriesData& data, const Bandwidth& bw, Kernel kernel,
                                         std::size_t m) {
  CompensatedSum acc;
  for (std::size_t t = 0; t < data.T(); ++t) {
    const Eigen::VectorXd b = leave_out_estimate(data, t, bw, kernel, m);
    const auto ti = static_cast<Eigen::Index>(t);
    const double e = data.y()[ti] - data.X().row(ti).dot(b);
    acc.add(e * e);
  }
  return acc.value() / static_cast<double>(data.T());
}

namespace detail {

//! Values closer than this are ties; resolved toward the first (smaller) candidate.
inline double tie_tolerance(const TimeSeriesData& data) {
  return 1e-10 * (data.y().squaredNorm() / static_cast<double>(data.T()) + 1e-300);
}

inline std::size_t argmin_with_ties(const std::vector<CvPoint>& curve, double tol) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < curve.size(); ++k)
    if (curve[k].cv < curve[best].cv - tol) best = k;
  return best;
}

inline std::string fmt_gamma(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

} // namespace detail

/// Picks gamma minimizing the leave-(2m+1)-out CV criterion (c = 1).
/// Ties go to the smaller gamma.
inline SelectionResult cv_select_gamma(const TimeSeriesData& data, const GammaGrid& grid, std::size_t m,
                                       Kernel kernel) {
  SelectionResult res;
  res.m = m;
  for (double g : grid.values()) {
    try {
      res.cv_curve.push_back({g, cross_validation_criterion(data, Bandwidth(1.0, g, data.T()), kernel, m)});
    } catch (const Error& e) {
      throw SelectionError("cv at gamma=" + detail::fmt_gamma(g) + ": " + e.what(), g);
    }
  }
  res.gamma_hat = res.cv_curve[detail::argmin_with_ties(res.cv_curve, detail::tie_tolerance(data))].x;
  return res;
}

//! Default scale grid {0.5, 0.55, ..., 1.5}.
inline std::vector<double> default_c_grid() {
  std::vector<double> v;
  for (int k = 0; k <= 20; ++k) v.push_back(0.5 + 0.05 * k);
  return v;
}

/// Leave-one-out CV choice of c given gamma; ties toward the smaller c.
inline double select_scale_c(const TimeSeriesData& data, double gamma_hat, const std::vector<double>& c_grid,
                             Kernel kernel, std::vector<CvPoint>* curve_out = nullptr) {
  if (c_grid.empty()) throw InvalidInput("select_scale_c: empty c grid");
  std::vector<double> cs = c_grid;
  std::sort(cs.begin(), cs.end());
  std::vector<CvPoint> curve;
  for (double c : cs) {
    try {
      curve.push_back({c, cross_validation_criterion(data, Bandwidth(c, gamma_hat, data.T()), kernel, 0)});
    } catch (const Error& e) {
      throw SelectionError("cv at c=" + detail::fmt_gamma(c) + ": " + e.what(), gamma_hat);
    }
  }
  const double c_hat = curve[detail::argmin_with_ties(curve, detail::tie_tolerance(data))].x;
  if (curve_out) *curve_out = std::move(curve);
  return c_hat;
}

// ---------------------------------------------------------------------------
// Fixed-design wild bootstrap selector
// ---------------------------------------------------------------------------

/// Bootstrap selection of gamma.
///
/// For each gamma1: fit, resample y* = x'beta(gamma1) + eta * e(gamma1) with
/// eta ~ N(0,1), refit at every gamma2 <= gamma1, and record whether the
/// normal interval built from the bootstrap fit and its local sandwich
/// standard error covers beta(gamma1). gamma_hat is the largest gamma1 whose
/// mean coverage is at least 1 - q_bar for all gamma2 <= gamma1, or the grid
/// lower bound when no gamma1 qualifies.
///
/// The multipliers of draw b for gamma1 come from the substream
/// (seed, gamma1 index, b), so the same resample feeds every gamma2 and the
/// result does not depend on cfg.workers.
inline SelectionResult bootstrap_select_gamma(const TimeSeriesData& data, const GammaGrid& grid,
                                              const BootstrapConfig& cfg, Kernel kernel) {
  cfg.validate();
  const auto& gammas = grid.values();
  const std::size_t G = gammas.size();
  const std::size_t T = data.T();
  const std::size_t p = data.p();
  const double z = two_sided_critical(cfg.q);

  std::vector<PathSmoother> smoothers;
  smoothers.reserve(G);
  for (double g : gammas) {
    try {
      smoothers.emplace_back(data.X(), Bandwidth(1.0, g, T), kernel);
    } catch (const Error& e) {
      throw SelectionError("bootstrap at gamma=" + detail::fmt_gamma(g) + ": " + e.what(), g);
    }
  }
  std::vector<RowMatrix> beta1(G);
  std::vector<Eigen::VectorXd> resid1(G);
  for (std::size_t a = 0; a < G; ++a) {
    smoothers[a].fit(data.y(), beta1[a]);
    smoothers[a].residuals(data.y(), beta1[a], resid1[a]);
  }

  // hits[a][b2][t]: number of covering draws (per-coefficient mode counts coefficients).
  // Integer counts make the reduction exact in any order.
  const std::size_t units = G * cfg.B;
  std::vector<std::vector<std::uint32_t>> unit_hits(units);
  parallel_for(units, cfg.workers, [&](std::size_t u) {
    const std::size_t a = u / cfg.B;
    const std::size_t draw = u % cfg.B;
    StdNormal eta(derive_seed(cfg.seed, {a, draw}));
    Eigen::VectorXd ystar(static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      ystar[ti] = data.X().row(ti).dot(beta1[a].row(ti)) + eta() * resid1[a][ti];
    }
    auto& hits = unit_hits[u];
    hits.assign((a + 1) * T, 0);
    RowMatrix bstar, var;
    Eigen::VectorXd rstar;
    for (std::size_t b2 = 0; b2 <= a; ++b2) {
      const auto& sm = smoothers[b2];
      sm.fit(ystar, bstar);
      sm.residuals(ystar, bstar, rstar);
      if (cfg.variance == VarianceMode::Local) {
        sm.sandwich_variances(rstar, var);
      } else {
        const Eigen::MatrixXd V = sm.global_sandwich(rstar);
        var = V.diagonal().transpose().replicate(static_cast<Eigen::Index>(T), 1);
      }
      for (std::size_t t = 0; t < T; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        std::uint32_t covered = 0;
        for (std::size_t j = 0; j < p; ++j) {
          const auto ji = static_cast<Eigen::Index>(j);
          const double half = z * std::sqrt(std::max(0.0, var(ti, ji)));
          if (std::fabs(bstar(ti, ji) - beta1[a](ti, ji)) <= half) ++covered;
        }
        if (cfg.coverage == CoverageMode::Joint)
          hits[b2 * T + t] = covered == p ? 1 : 0;
        else
          hits[b2 * T + t] = covered;
      }
    }
  });

  SelectionResult res;
  const double denom = static_cast<double>(cfg.B) * (cfg.coverage == CoverageMode::Joint ? 1.0 : static_cast<double>(p));
  for (std::size_t a = 0; a < G; ++a) {
    for (std::size_t b2 = 0; b2 <= a; ++b2) {
      CoverageCell cell{gammas[a], gammas[b2], 0.0, std::vector<double>(T), std::vector<bool>(T)};
      std::vector<std::uint64_t> count(T, 0);
      for (std::size_t draw = 0; draw < cfg.B; ++draw) {
        const auto& hits = unit_hits[a * cfg.B + draw];
        for (std::size_t t = 0; t < T; ++t) count[t] += hits[b2 * T + t];
      }
      CompensatedSum acc;
      std::size_t used = 0;
      for (std::size_t t = 0; t < T; ++t) {
        cell.per_t[t] = static_cast<double>(count[t]) / denom;
        cell.averaged[t] = !(cfg.exclude_boundary && smoothers[b2].boundary(t));
        if (cell.averaged[t]) {
          acc.add(cell.per_t[t]);
          ++used;
        }
      }
      if (used == 0)
        throw SelectionError("bootstrap: every t is a boundary point at gamma2=" + detail::fmt_gamma(gammas[b2]),
                             gammas[a], gammas[b2]);
      cell.cr = acc.value() / static_cast<double>(used);
      res.cr_matrix.push_back(std::move(cell));
    }
  }

  // gamma1 qualifies using only gamma2 <= gamma1.
  for (std::size_t a = 0; a < G; ++a) {
    bool ok = true;
    for (const auto& cell : res.cr_matrix)
      if (cell.gamma1 == gammas[a] && cell.cr < 1.0 - cfg.q_bar) ok = false;
    if (ok) res.upsilon.push_back(gammas[a]);
  }
  res.gamma_hat = res.upsilon.empty() ? grid.lower() : res.upsilon.back();
  return res;
}

} // namespace tvpk
