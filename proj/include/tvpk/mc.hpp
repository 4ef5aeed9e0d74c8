#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvpk/dgp.hpp"
#include "tvpk/errors.hpp"
#include "tvpk/estimator.hpp"
#include "tvpk/parallel.hpp"
#include "tvpk/rng.hpp"
#include "tvpk/selection.hpp"

namespace tvpk {

// ---------------------------------------------------------------------------
// Closed-form MSE results for rescaled random walk coefficients
// ---------------------------------------------------------------------------

/// Leading-order MSE of the uniform-kernel estimator in the local-level
/// model: (sigma_u^2 / 6) h + sigma_eps^2 / (2 T h).
inline double mse_theoretical_local_level(double h, std::size_t T, double sigma_u2, double sigma_eps2) {
  if (!(h > 0.0) || !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0) || T == 0)
    throw InvalidInput("mse_theoretical_local_level: h, T and variances must be positive");
  return sigma_u2 / 6.0 * h + sigma_eps2 / (2.0 * static_cast<double>(T) * h);
}

/// Exact finite-sample counterpart for an interior point with half window
/// n = floor(T h): 2 sigma_u^2 n (n+1) / (6 T (2n+1)) + sigma_eps^2 / (2n+1).
inline double mse_exact_local_level(std::size_t n, std::size_t T, double sigma_u2, double sigma_eps2) {
  const double nd = static_cast<double>(n);
  const double w = 2.0 * nd + 1.0;
  return 2.0 * sigma_u2 * nd * (nd + 1.0) / (6.0 * static_cast<double>(T) * w) + sigma_eps2 / w;
}

struct OptimalBandwidth {
  double h_min;
  double c; ///< h_min = c T^-1/2
};

inline OptimalBandwidth mse_minimizing_bandwidth(std::size_t T, double sigma_u2, double sigma_eps2) {
  if (T == 0 || !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0))
    throw InvalidInput("mse_minimizing_bandwidth: inputs must be positive");
  const double c = std::sqrt(3.0 * sigma_eps2 / sigma_u2);
  return {c / std::sqrt(static_cast<double>(T)), c};
}

/// Leading-order MSE for a p-dimensional rescaled random walk:
/// (sigma_u^2 h / 4) tr[Omega^-1 (Lambda LambdaBar + LambdaBar Lambda - 2 Xi) Omega^-1]
///   + (sigma_eps^2 / (2 T h)) tr[Omega^-1].
inline double mse_theoretical_general(double h, std::size_t T, double sigma_u2, double sigma_eps2,
                                      const Eigen::MatrixXd& Omega, const Eigen::MatrixXd& Lambda,
                                      const Eigen::MatrixXd& LambdaBar, const Eigen::MatrixXd& Xi) {
  if (!(h > 0.0) || T == 0 || !(sigma_u2 > 0.0) || !(sigma_eps2 > 0.0))
    throw InvalidInput("mse_theoretical_general: h, T and variances must be positive");
  const auto p = Omega.rows();
  for (const auto* M : {&Omega, &Lambda, &LambdaBar, &Xi})
    if (M->rows() != p || M->cols() != p) throw InvalidInput("mse_theoretical_general: matrix dimensions differ");
  const Eigen::MatrixXd inner = Lambda * LambdaBar + LambdaBar * Lambda - 2.0 * Xi;
  const Eigen::MatrixXd sym = 0.5 * (inner + inner.transpose());
  if (Eigen::LLT<Eigen::MatrixXd>(sym).info() != Eigen::Success)
    throw InvalidInput("mse_theoretical_general: Lambda LambdaBar + LambdaBar Lambda - 2 Xi is not positive definite");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Omega);
  if (!lu.isInvertible()) throw InvalidInput("mse_theoretical_general: Omega is singular");
  const Eigen::MatrixXd Oi = lu.inverse();
  return sigma_u2 * h / 4.0 * (Oi * inner * Oi).trace() +
         sigma_eps2 / (2.0 * static_cast<double>(T) * h) * Oi.trace();
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

enum class RuleKind { Fixed, CrossValidation, Bootstrap };

//! How the bandwidth of one table row is chosen in each replication.
struct BandwidthRule {
  RuleKind kind = RuleKind::Fixed;
  double gamma = -0.5;
  double c = 1.0;
  std::vector<double> grid;  ///< candidates for CV / bootstrap
  std::size_t cv_m = 1;
  std::size_t B = 100;
  double q_bar = 0.10;

  static BandwidthRule fixed(double gamma, double c = 1.0) { return {RuleKind::Fixed, gamma, c, {}, 1, 100, 0.1}; }
  static BandwidthRule cv(std::vector<double> grid, std::size_t m) {
    return {RuleKind::CrossValidation, -0.5, 1.0, std::move(grid), m, 100, 0.1};
  }
  static BandwidthRule boot(std::vector<double> grid, std::size_t B, double q_bar) {
    return {RuleKind::Bootstrap, -0.5, 1.0, std::move(grid), 1, B, q_bar};
  }

  std::string label() const {
    switch (kind) {
      case RuleKind::CrossValidation: return "CV";
      case RuleKind::Bootstrap: return "Boot";
      case RuleKind::Fixed: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", gamma);
    return buf;
  }
};

struct McConfig {
  std::string label = "dgp";  ///< row label of the design (e.g. the break exponent)
  std::vector<TvpSpec> tvp;
  RegressorSpec regressors;
  ErrorSpec errors = IidErrors{};
  std::vector<std::size_t> sample_sizes{100, 200, 400, 800};
  std::vector<BandwidthRule> bandwidths;
  std::size_t replications = 500;
  std::vector<double> eval_points{0.5};
  VarianceMode variance = VarianceMode::Global;
  Kernel kernel = Kernel::Epanechnikov;
  double q = 0.05;
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;

  void validate() const {
    if (replications < 1) throw ConfigError("mc: replications must be at least 1");
    if (tvp.empty()) throw ConfigError("mc: no coefficient path specified");
    if (sample_sizes.empty()) throw ConfigError("mc: no sample sizes");
    if (bandwidths.empty()) throw ConfigError("mc: no bandwidth rules");
    for (double tau : eval_points)
      if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("mc: evaluation fractions must lie in (0, 1)");
  }
};

struct PointStats {
  double tau;
  std::size_t t;             ///< 1-based evaluation index floor(tau T)
  double mse;
  double mse_se;
  double coverage;           ///< NaN when no replication had a nondegenerate interval
  double coverage_se;
  std::size_t coverage_n;    ///< replications with a nondegenerate interval
};

struct McCell {
  std::string dgp;
  std::size_t T;
  std::string bandwidth;
  double mean_mse;
  double mse_se;
  double mean_gamma;         ///< average selected gamma (fixed rules: the gamma itself)
  std::vector<PointStats> points;
  std::size_t replications;
  std::size_t failures;
  double wall_seconds;

  const PointStats* at(double tau) const {
    for (const auto& p : points)
      if (std::fabs(p.tau - tau) < 1e-12) return &p;
    return nullptr;
  }
};

struct McResult {
  std::vector<McCell> cells;

  const McCell* find(const std::string& dgp, std::size_t T, const std::string& bw) const {
    for (const auto& c : cells)
      if (c.dgp == dgp && c.T == T && c.bandwidth == bw) return &c;
    return nullptr;
  }
  const McCell* find(std::size_t T, const std::string& bw) const {
    for (const auto& c : cells)
      if (c.T == T && c.bandwidth == bw) return &c;
    return nullptr;
  }
  void merge(const McResult& other) { cells.insert(cells.end(), other.cells.begin(), other.cells.end()); }
  std::size_t total_failures() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.failures;
    return n;
  }
};

namespace detail {

struct RuleOutcome {
  bool ok = false;
  double path_mse = 0.0;
  double gamma = 0.0;
  double seconds = 0.0;
  std::vector<double> sq_err;  ///< per eval point
  std::vector<int> covered;    ///< 1 / 0, or -1 for a degenerate interval
};

//! 1-based index floor(tau T), clamped to [1, T].
inline std::size_t eval_index(double tau, std::size_t T) {
  const auto t = static_cast<std::size_t>(std::floor(tau * static_cast<double>(T) + 1e-9));
  return std::clamp<std::size_t>(t, 1, T);
}

inline double choose_gamma(const BandwidthRule& rule, const TimeSeriesData& data, Kernel kernel, double q,
                           VarianceMode variance, std::uint64_t seed) {
  switch (rule.kind) {
    case RuleKind::Fixed: return rule.gamma;
    case RuleKind::CrossValidation: {
      GammaGrid grid(rule.grid);
      return cv_select_gamma(data, grid, rule.cv_m, kernel).gamma_hat;
    }
    case RuleKind::Bootstrap: {
      BootstrapConfig bc;
      bc.B = rule.B;
      bc.q = q;
      bc.q_bar = rule.q_bar;
      bc.seed = seed;
      bc.variance = variance;
      bc.workers = 1;
      return bootstrap_select_gamma(data, GammaGrid(rule.grid), bc, kernel).gamma_hat;
    }
  }
  return rule.gamma;
}

inline RuleOutcome run_rule(const BandwidthRule& rule, const SimulatedData& sim, const McConfig& cfg,
                            std::uint64_t seed) {
  RuleOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t T = sim.data.T();
  try {
    const double gamma = choose_gamma(rule, sim.data, cfg.kernel, cfg.q, cfg.variance, seed);
    const double c = rule.kind == RuleKind::Fixed ? rule.c : 1.0;
    EstimateOptions opts;
    opts.q = cfg.q;
    opts.variance = cfg.variance;
    const TvpEstimate est = estimate_path(sim.data, Bandwidth(c, gamma, T), cfg.kernel, opts);
    CompensatedSum acc;
    for (std::size_t t = 0; t < T; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      acc.add((est.beta_hat.row(ti) - sim.beta.row(ti)).squaredNorm());
    }
    out.path_mse = acc.value() / static_cast<double>(T);
    out.gamma = gamma;
    for (double tau : cfg.eval_points) {
      const auto ti = static_cast<Eigen::Index>(eval_index(tau, T) - 1);
      out.sq_err.push_back((est.beta_hat.row(ti) - sim.beta.row(ti)).squaredNorm());
      int cov = 1;
      bool degenerate = false;
      for (Eigen::Index j = 0; j < est.beta_hat.cols(); ++j) {
        if (!(est.ci_upper(ti, j) > est.ci_lower(ti, j))) degenerate = true;
        if (!(sim.beta(ti, j) >= est.ci_lower(ti, j) && sim.beta(ti, j) <= est.ci_upper(ti, j))) cov = 0;
      }
      out.covered.push_back(degenerate ? -1 : cov);
    }
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

} // namespace detail

/// Runs every (T, bandwidth rule) cell of the design.
///
/// Replication r at sample size T uses the dataset seeded by
/// (master_seed, T, r); all rules see the same dataset. Results are stored
/// per replication and reduced in index order, so they do not depend on
/// the worker count. Failed replications are excluded and counted.
inline McResult run_experiment(const McConfig& cfg) {
  cfg.validate();
  McResult result;
  const std::size_t R = cfg.replications;
  const std::size_t nrules = cfg.bandwidths.size();
  for (std::size_t T : cfg.sample_sizes) {
    std::vector<std::vector<detail::RuleOutcome>> reps(R);
    parallel_for(R, cfg.workers, [&](std::size_t r) {
      const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {T, r});
      auto& slot = reps[r];
      slot.resize(nrules);
      std::optional<SimulatedData> sim;
      try {
        sim.emplace(simulate_dataset(cfg.tvp, cfg.regressors, cfg.errors, T, StreamSeeds::from_master(rep_seed)));
      } catch (const Error&) {
        return; // every rule stays !ok
      }
      for (std::size_t k = 0; k < nrules; ++k)
        slot[k] = detail::run_rule(cfg.bandwidths[k], *sim, cfg, derive_seed(rep_seed, {0xB007, k}));
    });

    for (std::size_t k = 0; k < nrules; ++k) {
      McCell cell;
      cell.dgp = cfg.label;
      cell.T = T;
      cell.bandwidth = cfg.bandwidths[k].label();
      cell.replications = 0;
      cell.failures = 0;
      cell.wall_seconds = 0.0;
      CompensatedSum mse, mse2, gam;
      const std::size_t npts = cfg.eval_points.size();
      std::vector<CompensatedSum> pm(npts), pm2(npts);
      std::vector<std::size_t> hits(npts, 0), ncov(npts, 0);
      for (std::size_t r = 0; r < R; ++r) {
        const auto& o = reps[r][k];
        cell.wall_seconds += o.seconds;
        if (!o.ok) {
          ++cell.failures;
          continue;
        }
        ++cell.replications;
        mse.add(o.path_mse);
        mse2.add(o.path_mse * o.path_mse);
        gam.add(o.gamma);
        for (std::size_t i = 0; i < npts; ++i) {
          pm[i].add(o.sq_err[i]);
          pm2[i].add(o.sq_err[i] * o.sq_err[i]);
          if (o.covered[i] >= 0) {
            ++ncov[i];
            hits[i] += static_cast<std::size_t>(o.covered[i]);
          }
        }
      }
      const double n = static_cast<double>(cell.replications);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      auto mean_se = [n](const CompensatedSum& s, const CompensatedSum& s2, double& mean, double& se) {
        mean = n > 0 ? s.value() / n : std::numeric_limits<double>::quiet_NaN();
        se = n > 1 ? std::sqrt(std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0)) / n) : 0.0;
      };
      mean_se(mse, mse2, cell.mean_mse, cell.mse_se);
      cell.mean_gamma = n > 0 ? gam.value() / n : nan;
      for (std::size_t i = 0; i < npts; ++i) {
        PointStats ps{};
        ps.tau = cfg.eval_points[i];
        ps.t = detail::eval_index(ps.tau, T);
        mean_se(pm[i], pm2[i], ps.mse, ps.mse_se);
        ps.coverage_n = ncov[i];
        if (ncov[i] > 0) {
          const double cr = static_cast<double>(hits[i]) / static_cast<double>(ncov[i]);
          ps.coverage = cr;
          ps.coverage_se = std::sqrt(cr * (1.0 - cr) / static_cast<double>(ncov[i]));
        } else {
          ps.coverage = nan;
          ps.coverage_se = nan;
        }
        cell.points.push_back(ps);
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Local-level bandwidth study
// ---------------------------------------------------------------------------

struct MseCurvePoint {
  double h;
  std::size_t half_window;
  double empirical;
  double empirical_se;
  double theoretical;  ///< leading-order formula
  double exact;        ///< finite-sample formula for the interior point
};

struct LocalLevelConfig {
  std::size_t T = 2000;
  std::vector<double> h_grid;  ///< default {0.01, ..., 0.30}
  double sigma_u2 = 1.0;
  double sigma_eps2 = 1.0;
  std::size_t replications = 5000;
  std::uint64_t seed = 7;
  std::size_t workers = 1;
};

/// Empirical MSE of the uniform-kernel estimate at t = T/2 in the local-level
/// model y_t = beta_t + e_t with beta a rescaled Gaussian random walk.
/// Every bandwidth is evaluated on the same simulated samples.
inline std::vector<MseCurvePoint> local_level_mse_curve(const LocalLevelConfig& cfg) {
  std::vector<double> hs = cfg.h_grid;
  if (hs.empty())
    for (int k = 1; k <= 30; ++k) hs.push_back(0.01 * k);
  const std::size_t T = cfg.T;
  const std::size_t t = T / 2 - 1; // 0-based index of t = T/2
  std::vector<Bandwidth> bws;
  for (double h : hs) bws.push_back(Bandwidth::from_h(h, T));
  TvpSpec rw{RandomWalkPath{0.0, Driver::Gaussian, std::sqrt(cfg.sigma_u2), 0.5}};
  RegressorSpec reg{ConstantRegressor{}, false};
  ErrorSpec err = IidErrors{std::sqrt(cfg.sigma_eps2)};

  std::vector<std::vector<double>> sq(cfg.replications, std::vector<double>(hs.size()));
  parallel_for(cfg.replications, cfg.workers, [&](std::size_t r) {
    const auto sim = simulate_dataset(std::vector<TvpSpec>{rw}, reg, err, T,
                                      StreamSeeds::from_master(derive_seed(cfg.seed, {r})));
    const double truth = sim.beta(static_cast<Eigen::Index>(t), 0);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const double b = local_constant_estimate(sim.data, t, bws[k], Kernel::Uniform)[0];
      sq[r][k] = (b - truth) * (b - truth);
    }
  });

  std::vector<MseCurvePoint> out;
  const double n = static_cast<double>(cfg.replications);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    CompensatedSum s, s2;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      s.add(sq[r][k]);
      s2.add(sq[r][k] * sq[r][k]);
    }
    const double mean = s.value() / n;
    const double se = n > 1 ? std::sqrt(std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0)) / n) : 0.0;
    out.push_back({hs[k], bws[k].half_window(), mean, se,
                   mse_theoretical_local_level(hs[k], T, cfg.sigma_u2, cfg.sigma_eps2),
                   mse_exact_local_level(bws[k].half_window(), T, cfg.sigma_u2, cfg.sigma_eps2)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace presets {

inline std::vector<double> cv_gamma_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 30; ++k) g.push_back(-0.5 + 0.01 * k);
  return g;
}

inline std::vector<double> boot_gamma_grid() { return {-0.5, -0.4, -0.33, -0.2}; }

inline TvpSpec rescaled_rw(Driver d = Driver::Gaussian) { return TvpSpec{RandomWalkPath{0.0, d, 1.0, 0.5}}; }

//! Rescaled random walk coefficient, AR(1) regressor, global variance estimators.
inline McConfig random_walk_design(Driver driver, ErrorSpec errors, std::size_t replications, std::size_t boot_B = 100) {
  McConfig cfg;
  cfg.label = driver == Driver::Gaussian ? "(i)" : "(ii)";
  cfg.tvp = {rescaled_rw(driver)};
  cfg.errors = errors;
  cfg.sample_sizes = {100, 200, 400, 800};
  for (double g : {-0.2, -0.33, -0.5, -0.55, -0.6, -0.7}) cfg.bandwidths.push_back(BandwidthRule::fixed(g));
  cfg.bandwidths.push_back(BandwidthRule::cv(cv_gamma_grid(), 1));
  cfg.bandwidths.push_back(BandwidthRule::boot(boot_gamma_grid(), boot_B, 0.10));
  cfg.replications = replications;
  cfg.eval_points = {0.5};
  cfg.variance = VarianceMode::Global;
  cfg.master_seed = 1001;
  return cfg;
}

//! Random walk plus a neglected mean break of size 2 / T^alpha at T/2, h = T^-1/2, local variances.
inline McConfig neglected_break_design(double alpha, ErrorSpec errors, std::size_t replications) {
  McConfig cfg;
  char buf[32];
  std::snprintf(buf, sizeof buf, "alpha=%g", alpha);
  cfg.label = buf;
  cfg.tvp = {TvpSpec{MixturePath{{TvpSpec{BreakPath{{0.5}, {0.0, 2.0}, alpha, 1.0}}, rescaled_rw()}}}};
  cfg.errors = errors;
  cfg.sample_sizes = {100, 200, 400, 800};
  cfg.bandwidths = {BandwidthRule::fixed(-0.5)};
  cfg.replications = replications;
  cfg.eval_points = {0.4, 0.45, 0.5, 0.55, 0.6};
  cfg.variance = VarianceMode::Local;
  cfg.master_seed = 3003;
  return cfg;
}

//! beta(u) = u + 1.5 / T^0.4 * 1{u > 0.5}, local variances, coverage at T/2.
inline McConfig smooth_jump_design(ErrorSpec errors, std::size_t replications, std::size_t boot_B = 100) {
  McConfig cfg;
  cfg.label = std::holds_alternative<IidErrors>(errors) ? "iid" : "garch";
  cfg.tvp = {TvpSpec{MixturePath{{TvpSpec{SmoothPath{"identity", {}}}, TvpSpec{BreakPath{{0.5}, {0.0, 1.5}, 0.4, 1.0}}}}}};
  cfg.errors = errors;
  cfg.sample_sizes = {100, 200, 400, 800};
  for (double g : {-0.2, -0.33, -0.5}) cfg.bandwidths.push_back(BandwidthRule::fixed(g));
  cfg.bandwidths.push_back(BandwidthRule::cv(cv_gamma_grid(), 1));
  cfg.bandwidths.push_back(BandwidthRule::boot(boot_gamma_grid(), boot_B, 0.10));
  cfg.replications = replications;
  cfg.eval_points = {0.5};
  cfg.variance = VarianceMode::Local;
  cfg.master_seed = 5005;
  return cfg;
}

} // namespace presets

} // namespace tvpk
