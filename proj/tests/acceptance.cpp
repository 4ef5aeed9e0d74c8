// Acceptance runner: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or, with
// --known-unattainable=4,8, when exactly the listed criteria fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvpk/tvpk.hpp"

using namespace tvpk;

namespace {

const std::string kFixture = std::string(TVPK_TEST_DATA_DIR) + "/portfolios_25.csv";

// Pinned tolerances.
constexpr std::size_t kDeskReplications = 500;
constexpr double kTable1MseTol = 0.006;
constexpr double kTable1CrTol = 0.04;
constexpr double kBootMseTol = 0.006;
constexpr double kBootCrTol = 0.04;
constexpr std::size_t kBootDraws = 100;
constexpr double kBreakCrMid = 0.25, kBreakCrOff = 0.82, kBreakMseMid = 0.2, kBreakMseOff = 0.03;
constexpr double kJumpCrWide = 0.83, kJumpCrNarrow = 0.86;
constexpr double kCurveRelTol = 0.10;
constexpr double kCurveGridStep = 0.01;
constexpr double kOlsTol = 1e-10, kWlsTol = 1e-10, kTheoryTol = 1e-12;
constexpr std::size_t kNormalReplications = 2000;
constexpr double kZMeanLo = -0.1, kZMeanHi = 0.1, kZVarLo = 0.85, kZVarHi = 1.25, kZCovLo = 0.86, kZCovHi = 0.93;
constexpr double kIdentityTol = 1e-10;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

McConfig subset(McConfig cfg, std::vector<std::size_t> Ts, std::vector<std::string> labels) {
  cfg.sample_sizes = std::move(Ts);
  std::vector<BandwidthRule> keep;
  for (const auto& r : cfg.bandwidths)
    if (std::find(labels.begin(), labels.end(), r.label()) != labels.end()) keep.push_back(r);
  cfg.bandwidths = keep;
  cfg.workers = default_workers();
  return cfg;
}

void criterion1(Check& c) {
  auto cfg = subset(presets::random_walk_design(Driver::Gaussian, IidErrors{}, kDeskReplications),
                    {100, 200, 400, 800}, {"-0.2", "-0.33", "-0.5", "-0.55", "-0.6", "-0.7"});
  const auto r = run_experiment(cfg);
  c.require(r.total_failures() == 0, "no failed replications");
  struct Target {
    std::size_t T;
    const char* bw;
    double mse, cr;
  };
  for (const auto& t : {Target{400, "-0.5", 0.032, 0.874}, Target{800, "-0.5", 0.022, 0.899},
                        Target{400, "-0.2", 0.043, 0.461}}) {
    const auto* cell = r.find(t.T, t.bw);
    const double mse = cell->mean_mse, cr = cell->points[0].coverage;
    c.detail << " T=" << t.T << ",g=" << t.bw << ": MSE " << f3(mse) << " (" << t.mse << ") CR " << f3(cr) << " ("
             << t.cr << ");";
    c.require(std::fabs(mse - t.mse) <= kTable1MseTol, std::string("MSE at T=") + std::to_string(t.T) + " g=" + t.bw);
    c.require(std::fabs(cr - t.cr) <= kTable1CrTol, std::string("CR at T=") + std::to_string(t.T) + " g=" + t.bw);
  }
  // mean MSE falls with T for every fixed gamma
  for (const auto& rule : cfg.bandwidths) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t T : cfg.sample_sizes) {
      const double m = r.find(T, rule.label())->mean_mse;
      c.require(m < prev, "MSE decreasing in T at g=" + rule.label());
      prev = m;
    }
  }
}

void criterion2(Check& c) {
  auto run = [](double alpha) {
    auto cfg = presets::neglected_break_design(alpha, IidErrors{}, kDeskReplications);
    cfg.sample_sizes = {800};
    cfg.workers = default_workers();
    return run_experiment(cfg);
  };
  const auto r01 = run(0.1);
  const auto r04 = run(0.4);
  c.require(r01.total_failures() == 0 && r04.total_failures() == 0, "no failed replications");
  const auto& cell = r01.cells.at(0);
  const double cr5 = cell.at(0.5)->coverage, cr4 = cell.at(0.4)->coverage;
  const double m5 = cell.at(0.5)->mse, m4 = cell.at(0.4)->mse;
  c.detail << " alpha=0.1: CR(0.5) " << f3(cr5) << " CR(0.4) " << f3(cr4) << " MSE(0.5) " << f3(m5) << " MSE(0.4) "
           << f3(m4) << ";";
  c.require(cr5 < kBreakCrMid, "CR(0.5) below bound");
  c.require(cr4 > kBreakCrOff, "CR(0.4) above bound");
  c.require(m5 > kBreakMseMid, "MSE(0.5) above bound");
  c.require(m4 <= kBreakMseOff, "MSE(0.4) below bound");
  // locality across alpha
  const auto& c4 = r04.cells.at(0);
  const double off_ratio = std::max(m4, c4.at(0.4)->mse) / std::min(m4, c4.at(0.4)->mse);
  const double mid_ratio = m5 / c4.at(0.5)->mse;
  c.detail << " MSE(0.4) ratio across alpha " << f3(off_ratio) << ", MSE(0.5) ratio " << f3(mid_ratio) << ";";
  c.require(off_ratio < 1.15, "MSE(0.4) stable across alpha");
  c.require(mid_ratio > 5.0, "MSE(0.5) grows > 5x as alpha falls");
}

void criterion3(Check& c) {
  auto cfg = subset(presets::smooth_jump_design(IidErrors{}, kDeskReplications), {800}, {"-0.2", "-0.5"});
  const auto r = run_experiment(cfg);
  c.require(r.total_failures() == 0, "no failed replications");
  const double wide = r.find(800, "-0.2")->points[0].coverage;
  const double narrow = r.find(800, "-0.5")->points[0].coverage;
  c.detail << " T=800: CR(g=-0.2) " << f3(wide) << " (0.785) CR(g=-0.5) " << f3(narrow) << " (0.899);";
  c.require(wide < kJumpCrWide, "CR at g=-0.2 below bound");
  c.require(narrow > kJumpCrNarrow, "CR at g=-0.5 above bound");
}

void criterion4(Check& c) {
  auto cfg = subset(presets::random_walk_design(Driver::Gaussian, IidErrors{}, kDeskReplications, kBootDraws), {400},
                    {"-0.5", "Boot"});
  const auto r = run_experiment(cfg);
  c.require(r.total_failures() == 0, "no failed replications");
  const auto* fixed = r.find(400, "-0.5");
  const auto* boot = r.find(400, "Boot");
  c.detail << " T=400: Boot MSE " << f3(boot->mean_mse) << " vs " << f3(fixed->mean_mse) << ", CR "
           << f3(boot->points[0].coverage) << " vs " << f3(fixed->points[0].coverage) << ", mean gamma_hat "
           << f3(boot->mean_gamma) << ";";
  c.require(std::fabs(boot->mean_mse - fixed->mean_mse) <= kBootMseTol, "Boot MSE within tolerance of g=-0.5");
  c.require(std::fabs(boot->points[0].coverage - fixed->points[0].coverage) <= kBootCrTol,
            "Boot CR within tolerance of g=-0.5");
}

void criterion5(Check& c) {
  LocalLevelConfig cfg;
  cfg.workers = default_workers();
  const auto curve = local_level_mse_curve(cfg);
  const auto argmin = std::min_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.empirical < b.empirical; });
  const double h_min = mse_minimizing_bandwidth(cfg.T, cfg.sigma_u2, cfg.sigma_eps2).h_min;
  double worst = 0.0;
  for (const auto& p : curve)
    if (p.h >= 0.02 - 1e-12 && p.h <= 0.3 + 1e-12)
      worst = std::max(worst, std::fabs(p.empirical - p.theoretical) / p.theoretical);
  c.detail << " argmin h " << argmin->h << " (h_min " << h_min << ", grid step " << kCurveGridStep << "), max rel err " << f3(worst) << ";";
  c.require(std::fabs(argmin->h - h_min) <= kCurveGridStep + 1e-12, "argmin within one grid step of h_min");
  c.require(worst <= kCurveRelTol, "relative error within tolerance");
}

// Explicit-summation weighted least squares.
Eigen::VectorXd wls(const TimeSeriesData& d, std::size_t t, const Bandwidth& bw, Kernel k) {
  const long p = static_cast<long>(d.p());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
  for (long i = 0; i < static_cast<long>(d.T()); ++i) {
    const long dist = std::labs(i - static_cast<long>(t));
    if (dist > static_cast<long>(bw.half_window())) continue;
    const double w = evaluate(k, static_cast<double>(dist) / bw.scale());
    for (long a = 0; a < p; ++a) {
      r[a] += w * d.X()(i, a) * d.y()[i];
      for (long b = 0; b < p; ++b) G(a, b) += w * d.X()(i, a) * d.X()(i, b);
    }
  }
  return G.fullPivLu().solve(r);
}

TimeSeriesData random_data(std::size_t T, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  Eigen::VectorXd y(static_cast<Eigen::Index>(T));
  RowMatrix X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(p));
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(t, j) = z(gen) + (j == 0 ? 1.0 : 0.0);
    y[t] = z(gen);
  }
  return TimeSeriesData(std::move(y), std::move(X));
}

void criterion6(Check& c) {
  double ols_err = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto d = random_data(60, 1 + s % 3, s);
    const Eigen::VectorXd ols = (d.X().transpose() * d.X()).ldlt().solve(d.X().transpose() * d.y());
    const auto est = estimate_path(d, Bandwidth(1.0, 0.0, d.T()), Kernel::Uniform);
    for (Eigen::Index t = 0; t < 60; ++t)
      ols_err = std::max(ols_err, (est.beta_hat.row(t).transpose() - ols).cwiseAbs().maxCoeff());
  }
  double wls_err = 0.0;
  std::mt19937_64 gen(2718);
  std::size_t instances = 0;
  while (instances < 100) {
    const std::size_t p = 1 + gen() % 3;
    const std::size_t T = std::max<std::size_t>(2 * p, 4 + gen() % 9);
    const auto d = random_data(T, p, gen());
    const Bandwidth bw(1.0, -0.05 - 0.5 * static_cast<double>(gen() % 1000) / 1000.0, T);
    const Kernel k = instances % 2 ? Kernel::Uniform : Kernel::Epanechnikov;
    bool usable = true;
    std::vector<Eigen::VectorXd> ours(T);
    for (std::size_t t = 0; t < T && usable; ++t) {
      try {
        ours[t] = local_constant_estimate(d, t, bw, k);
      } catch (const SingularGram&) {
        usable = false;
      }
    }
    if (!usable) continue;
    for (std::size_t t = 0; t < T; ++t)
      wls_err = std::max(wls_err, (ours[t] - wls(d, t, bw, k)).cwiseAbs().maxCoeff());
    ++instances;
  }
  double theory_err = 0.0;
  for (double h : {0.01, 0.0387, 0.1, 0.3}) {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    theory_err = std::max(theory_err, std::fabs(mse_theoretical_general(h, 2000, 1.0, 1.0, one, one, 0.5 * one, one / 6.0) -
                                                mse_theoretical_local_level(h, 2000, 1.0, 1.0)));
  }
  c.detail << " OLS err " << ols_err << ", WLS err " << wls_err << ", theory err " << theory_err << ";";
  c.require(ols_err <= kOlsTol, "full-window uniform equals OLS");
  c.require(wls_err <= kWlsTol, "WLS oracle");
  c.require(theory_err <= kTheoryTol, "general formula reduces to local level");
}

void criterion7(Check& c) {
  // kernels
  bool kern = true;
  for (Kernel k : {Kernel::Epanechnikov, Kernel::Uniform}) {
    kern = kern && std::fabs(simpson([k](double x) { return evaluate(k, x); }, -1.0, 1.0) - 1.0) < 1e-6;
    for (int i = 0; i <= 10000; ++i) {
      const double x = -2.0 + 4.0 * i / 10000.0;
      const double v = evaluate(k, x);
      kern = kern && v >= 0.0 && v == evaluate(k, -x) && (std::fabs(x) <= 1.0 || v == 0.0);
    }
  }
  c.require(kern, "kernel normalization/symmetry/support");

  // orthogonality, equivariance, locality
  const auto d = random_data(120, 2, 77);
  const Bandwidth bw(1.0, -0.45, 120);
  const auto w = detail::offset_weights(bw, Kernel::Epanechnikov);
  double orth = 0.0;
  for (std::size_t t = 0; t < 120; ++t) {
    const auto b = local_constant_estimate(d, t, bw, Kernel::Epanechnikov);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
    for (std::size_t i = 0; i < 120; ++i) {
      const std::size_t dist = i > t ? i - t : t - i;
      if (dist > bw.half_window()) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      g += w[dist] * d.X().row(ii).transpose() * (d.y()[ii] - d.X().row(ii).dot(b));
    }
    orth = std::max(orth, g.cwiseAbs().maxCoeff());
  }
  c.require(orth < 1e-8 * d.y().norm(), "normal-equation orthogonality");
  const auto base = estimate_path(d, bw, Kernel::Epanechnikov);
  const auto scaled = estimate_path(d.with_response(2.5 * d.y()), bw, Kernel::Epanechnikov);
  c.require((scaled.beta_hat - 2.5 * base.beta_hat).cwiseAbs().maxCoeff() < 1e-10, "affine equivariance");
  Eigen::VectorXd y = d.y();
  for (Eigen::Index s = 0; s < 120; ++s)
    if (std::labs(s - 60) > static_cast<long>(bw.half_window())) y[s] += 1e3;
  const auto moved = local_constant_estimate(d.with_response(y), 60, bw, Kernel::Epanechnikov);
  const auto orig = local_constant_estimate(d, 60, bw, Kernel::Epanechnikov);
  c.require(moved[0] == orig[0] && moved[1] == orig[1], "locality");

  // duality
  bool dual = true;
  for (auto type : {SmoothnessType::TypeA, SmoothnessType::TypeB})
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double alpha = 0.0623 + 0.1 * i, gamma = -0.9733 + 0.05 * j;
        dual = dual && admissible_alpha_set(gamma, type).contains(alpha) ==
                         admissible_gamma_range(alpha, type).contains(gamma);
      }
  c.require(dual, "Gamma/A duality on 20x20 grid");

  // worker determinism
  auto mc = subset(presets::random_walk_design(Driver::Gaussian, IidErrors{}, 16, 50), {100}, {"-0.5", "CV", "Boot"});
  std::vector<McResult> runs;
  for (std::size_t wk : {1u, 2u, 8u}) {
    mc.workers = wk;
    runs.push_back(run_experiment(mc));
  }
  bool same = true;
  for (std::size_t k = 1; k < runs.size(); ++k)
    for (std::size_t i = 0; i < runs[0].cells.size(); ++i)
      same = same && runs[0].cells[i].mean_mse == runs[k].cells[i].mean_mse &&
             runs[0].cells[i].mean_gamma == runs[k].cells[i].mean_gamma &&
             runs[0].cells[i].points[0].coverage == runs[k].cells[i].points[0].coverage;
  const auto sim = simulate_dataset(presets::rescaled_rw(), RegressorSpec{}, IidErrors{}, 200, 5);
  std::vector<SelectionResult> sels;
  for (std::size_t wk : {1u, 2u, 8u}) {
    BootstrapConfig bc;
    bc.B = 60;
    bc.workers = wk;
    sels.push_back(bootstrap_select_gamma(sim.data, GammaGrid::default_grid(), bc, Kernel::Epanechnikov));
  }
  for (std::size_t k = 1; k < sels.size(); ++k)
    for (std::size_t i = 0; i < sels[0].cr_matrix.size(); ++i)
      same = same && sels[0].cr_matrix[i].per_t == sels[k].cr_matrix[i].per_t && sels[0].gamma_hat == sels[k].gamma_hat;
  c.require(same, "bit-identical across 1, 2, 8 workers");
  c.detail << " kernels, orthogonality, equivariance, locality, duality, worker determinism checked;";
}

void criterion8(Check& c) {
  const auto cfg = presets::random_walk_design(Driver::Gaussian, IidErrors{}, kNormalReplications);
  const std::size_t T = 800;
  const std::size_t t = detail::eval_index(0.5, T) - 1;
  const double zc = two_sided_critical(0.05);
  std::vector<double> z(kNormalReplications);
  parallel_for(kNormalReplications, default_workers(), [&](std::size_t r) {
    const auto sim = simulate_dataset(cfg.tvp, cfg.regressors, cfg.errors, T,
                                      StreamSeeds::from_master(derive_seed(cfg.master_seed, {T, r})));
    EstimateOptions opts;
    opts.variance = cfg.variance;
    const auto est = estimate_path(sim.data, Bandwidth(1.0, -0.5, T), cfg.kernel, opts);
    const auto ti = static_cast<Eigen::Index>(t);
    z[r] = (est.beta_hat(ti, 0) - sim.beta(ti, 0)) / est.se(t, 0);
  });
  CompensatedSum s, s2;
  std::size_t covered = 0;
  for (double v : z) {
    s.add(v);
    s2.add(v * v);
    if (std::fabs(v) <= zc) ++covered;
  }
  const double n = static_cast<double>(z.size());
  const double mean = s.value() / n;
  const double var = (s2.value() - n * mean * mean) / (n - 1.0);
  const double cov = static_cast<double>(covered) / n;
  c.detail << " mean " << f3(mean) << ", variance " << f3(var) << ", coverage " << f3(cov) << ";";
  c.require(mean >= kZMeanLo && mean <= kZMeanHi, "mean in band");
  c.require(var >= kZVarLo && var <= kZVarHi, "variance in band");
  c.require(cov >= kZCovLo && cov <= kZCovHi, "coverage in band");
}

void criterion9(Check& c) {
  PortfolioSpec spec;
  spec.source = kFixture;
  const auto series = build_portfolios(spec);
  double ident = 0.0;
  for (std::size_t t = 0; t < series.T(); ++t) ident = std::max(ident, std::fabs(series.VmG[t] + series.G[t] - series.V[t]));
  c.require(series.T() == 816, "T = 816 for the default range");
  c.require(ident <= kIdentityTol, "VmG + G = V");

  // regression CSV -> data, as the command line tool reads it
  const auto reg = csv::parse(csv::to_string(regression_table(series, PortfolioTarget::VmG)));
  const auto n = static_cast<Eigen::Index>(reg.rows.size());
  Eigen::VectorXd y(n);
  RowMatrix X(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& row = reg.rows[static_cast<std::size_t>(k)];
    y[k] = csv::parse_double(row[reg.column("excess_return")], 0, 0);
    X(k, 0) = csv::parse_double(row[reg.column("intercept")], 0, 0);
    X(k, 1) = csv::parse_double(row[reg.column("market_excess")], 0, 0);
  }
  const TimeSeriesData data(y, X);
  c.require(data.y() == capm_data(series, PortfolioTarget::VmG).y(), "regression CSV round trip");

  BootstrapConfig bc;
  bc.B = 200;
  bc.seed = 816;
  bc.workers = default_workers();
  const GammaGrid grid = GammaGrid::default_grid();
  const auto sel = bootstrap_select_gamma(data, grid, bc, Kernel::Epanechnikov);
  bool prefix = sel.cr_matrix.size() == grid.size() * (grid.size() + 1) / 2;
  for (double g1 : grid.values()) {
    bool all = true;
    for (double g2 : grid.values())
      if (g2 <= g1) {
        const auto* cell = sel.cell(g1, g2);
        prefix = prefix && cell != nullptr;
        if (cell) all = all && cell->cr >= 1.0 - bc.q_bar;
      } else {
        prefix = prefix && sel.cell(g1, g2) == nullptr;
      }
    prefix = prefix && all == (std::count(sel.upsilon.begin(), sel.upsilon.end(), g1) > 0);
  }
  // membership must not change when larger gamma values are dropped
  std::vector<double> lower(grid.values().begin(), grid.values().end() - 1);
  const auto sub = bootstrap_select_gamma(data, GammaGrid(lower), bc, Kernel::Epanechnikov);
  for (double g : lower)
    prefix = prefix && (std::count(sub.upsilon.begin(), sub.upsilon.end(), g) > 0) ==
                         (std::count(sel.upsilon.begin(), sel.upsilon.end(), g) > 0);
  const double expect_hat = sel.upsilon.empty() ? grid.lower() : sel.upsilon.back();
  prefix = prefix && sel.gamma_hat == expect_hat;
  c.require(prefix, "monotone-prefix upsilon structure");

  const auto est = estimate_path(data, Bandwidth(1.0, sel.gamma_hat, data.T()), Kernel::Epanechnikov);
  const auto tab = csv::parse(csv::to_string(estimates_table(est, {"intercept", "market_excess"}, series.dates)));
  const auto plot = csv::parse(csv::to_string(plotdata({tab, bands_table(est, {"intercept", "market_excess"})})));
  bool plot_ok = !plot.rows.empty();
  for (const auto& row : plot.rows)
    if (row[0] == "beta_market_excess") {
      const auto t = static_cast<std::size_t>(csv::parse_integer(row[1], 0, 0));
      plot_ok = plot_ok && csv::parse_double(row[2], 0, 0) == est.beta_hat(static_cast<Eigen::Index>(t - 1), 1);
    }
  c.require(plot_ok, "plot data round trip");
  c.detail << " T=" << series.T() << ", identity err " << ident << ", gamma_hat " << sel.gamma_hat << ", upsilon size "
           << sel.upsilon.size() << ", plot rows " << plot.rows.size() << ";";
}

} // namespace

int main(int argc, char** argv) {
  std::vector<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const std::string key = "--known-unattainable=";
    if (arg.rfind(key, 0) != 0) {
      std::fprintf(stderr, "unknown argument %s\n", argv[i]);
      return 2;
    }
    std::stringstream ss(arg.substr(key.size()));
    for (std::string item; std::getline(ss, item, ',');) known.push_back(std::stoi(item));
  }
  std::sort(known.begin(), known.end());
  const std::vector<std::pair<int, std::function<void(Check&)>>> criteria = {
    {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
    {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  std::vector<int> failed_ids;
  for (const auto& [id, fn] : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%.1fs)%s\n", id, c.ok ? "PASS" : "FAIL", secs, c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) failed_ids.push_back(id);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed_ids.size(), criteria.size());
  if (!known.empty()) {
    std::printf("known unattainable:");
    for (int k : known) std::printf(" %d", k);
    std::printf("; failing set %s the known set\n", failed_ids == known ? "matches" : "differs from");
  }
  return failed_ids == known ? 0 : 1;
}
