// Command-line front end: estimation, bandwidth selection, portfolio
// construction, simulation, Monte Carlo tables and plot data.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tvpk/tvpk.hpp"

namespace fs = std::filesystem;
using namespace tvpk;

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kParse = 2, kConfig = 3, kNumerical = 4 };

struct InputOptions {
  std::string input;
  std::string y;
  std::vector<std::string> x;
  bool intercept = false;
};

struct BandwidthOptions {
  std::string mode = "fixed";
  double gamma = -0.5;
  double c = 1.0;
  bool select_c = false;
  std::vector<double> grid{-0.5, -0.4, -0.33, -0.2};
  std::vector<std::size_t> cv_m{1};
  std::size_t B = 200;
  double q_bar = 0.10;
  std::string coverage = "joint";
  bool include_boundary = false;
};

struct Common {
  std::string kernel = "epanechnikov";
  double q = 0.05;
  std::uint64_t seed = 20240101;
  std::string output_dir = ".";
  std::size_t workers = 0;
  std::string variance = "local";
};

std::size_t workers_or_default(std::size_t w) { return w == 0 ? default_workers() : w; }

VarianceMode variance_from_name(const std::string& s) {
  if (s == "local") return VarianceMode::Local;
  if (s == "global") return VarianceMode::Global;
  throw ConfigError("unknown variance estimator '" + s + "' (expected local or global)");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

struct LoadedData {
  TimeSeriesData data;
  std::vector<std::string> names;
  std::vector<int> dates;
};

LoadedData load_data(const InputOptions& in) {
  const csv::Table tab = csv::read_file(in.input);
  if (tab.header.empty()) throw ParseError("empty input file '" + in.input + "'", 1, 0);
  std::vector<std::size_t> skip;
  for (std::size_t j = 0; j < tab.header.size(); ++j)
    if (tab.header[j] == "date" || tab.header[j] == "t") skip.push_back(j);
  auto skipped = [&](std::size_t j) { return std::find(skip.begin(), skip.end(), j) != skip.end(); };

  std::size_t cy = tab.header.size();
  if (!in.y.empty()) {
    cy = tab.column(in.y);
  } else {
    for (std::size_t j = 0; j < tab.header.size() && cy == tab.header.size(); ++j)
      if (!skipped(j)) cy = j;
    if (cy == tab.header.size()) throw ConfigError("input has no response column");
  }
  std::vector<std::size_t> cx;
  if (!in.x.empty()) {
    for (const auto& n : in.x) cx.push_back(tab.column(n));
  } else {
    for (std::size_t j = 0; j < tab.header.size(); ++j)
      if (j != cy && !skipped(j)) cx.push_back(j);
  }
  if (cx.empty() && !in.intercept) throw ConfigError("no regressor columns selected");
  for (std::size_t j : cx)
    if (j == cy) throw ConfigError("response column '" + tab.header[cy] + "' also listed as a regressor");

  bool has_intercept_col = false;
  for (std::size_t j : cx)
    if (tab.header[j] == "intercept") has_intercept_col = true;
  const bool inject = in.intercept && !has_intercept_col;

  const auto T = static_cast<Eigen::Index>(tab.rows.size());
  const auto p = static_cast<Eigen::Index>(cx.size() + (inject ? 1 : 0));
  Eigen::VectorXd y(T);
  RowMatrix X(T, p);
  LoadedData out{TimeSeriesData(Eigen::VectorXd::Ones(2), RowMatrix::Ones(2, 1)), {}, {}};
  if (inject) out.names.push_back("intercept");
  for (std::size_t j : cx) out.names.push_back(tab.header[j]);
  const bool has_date = tab.has_column("date");
  for (Eigen::Index r = 0; r < T; ++r) {
    const auto& row = tab.rows[static_cast<std::size_t>(r)];
    const std::size_t line = tab.row_lines[static_cast<std::size_t>(r)];
    y[r] = csv::parse_double(row[cy], line, cy + 1);
    Eigen::Index k = 0;
    if (inject) X(r, k++) = 1.0;
    for (std::size_t j : cx) X(r, k++) = csv::parse_double(row[j], line, j + 1);
    if (has_date)
      out.dates.push_back(static_cast<int>(csv::parse_integer(row[tab.column("date")], line, tab.column("date") + 1)));
  }
  out.data = TimeSeriesData(std::move(y), std::move(X));
  return out;
}

BootstrapConfig bootstrap_config(const BandwidthOptions& b, const Common& c) {
  BootstrapConfig cfg;
  cfg.B = b.B;
  cfg.q = c.q;
  cfg.q_bar = b.q_bar;
  cfg.seed = c.seed;
  cfg.exclude_boundary = !b.include_boundary;
  cfg.variance = variance_from_name(c.variance);
  cfg.workers = workers_or_default(c.workers);
  if (b.coverage == "joint")
    cfg.coverage = CoverageMode::Joint;
  else if (b.coverage == "per-coefficient")
    cfg.coverage = CoverageMode::PerCoefficient;
  else
    throw ConfigError("unknown coverage mode '" + b.coverage + "'");
  return cfg;
}

GammaGrid gamma_grid(const std::vector<double>& v) {
  std::vector<double> g = v;
  std::sort(g.begin(), g.end());
  return GammaGrid(g);
}

struct Selection {
  SelectionResult result;
  std::vector<std::pair<std::size_t, std::vector<CvPoint>>> cv_curves;
  double gamma;
  double c;
};

Selection run_selection(const TimeSeriesData& data, const BandwidthOptions& b, const Common& c, Kernel kernel) {
  Selection s{{}, {}, b.gamma, b.c};
  if (b.mode == "fixed") {
    // nothing to select
  } else if (b.mode == "cv") {
    if (b.cv_m.empty()) throw ConfigError("cv mode needs at least one m");
    for (std::size_t m : b.cv_m) {
      auto r = cv_select_gamma(data, gamma_grid(b.grid), m, kernel);
      s.cv_curves.emplace_back(m, r.cv_curve);
      if (m == b.cv_m.front()) s.result = r;
    }
    s.gamma = s.result.gamma_hat;
    s.c = 1.0;
  } else if (b.mode == "bootstrap") {
    s.result = bootstrap_select_gamma(data, gamma_grid(b.grid), bootstrap_config(b, c), kernel);
    s.gamma = s.result.gamma_hat;
    s.c = 1.0;
  } else {
    throw ConfigError("unknown bandwidth mode '" + b.mode + "' (expected fixed, cv or bootstrap)");
  }
  if (b.select_c) {
    std::vector<CvPoint> curve;
    s.c = select_scale_c(data, s.gamma, default_c_grid(), kernel, &curve);
    s.result.c_hat = s.c;
    s.result.c_curve = curve;
  }
  return s;
}

void write_selection_files(const Selection& s, const std::string& dir) {
  if (!s.result.cr_matrix.empty()) csv::write_file(join(dir, "selection.csv"), coverage_matrix_table(s.result));
  if (!s.cv_curves.empty()) csv::write_file(join(dir, "cv_curve.csv"), cv_curve_table(s.cv_curves));
  if (!s.result.c_curve.empty()) csv::write_file(join(dir, "c_curve.csv"), cv_curve_table({{1, s.result.c_curve}}, "c"));
}

int cmd_estimate(const InputOptions& in, const BandwidthOptions& b, const Common& c) {
  const Kernel kernel = kernel_from_name(c.kernel);
  const auto loaded = load_data(in);
  const Selection s = run_selection(loaded.data, b, c, kernel);
  EstimateOptions opts;
  opts.q = c.q;
  opts.variance = variance_from_name(c.variance);
  const Bandwidth bw(s.c, s.gamma, loaded.data.T());
  const TvpEstimate est = estimate_path(loaded.data, bw, kernel, opts);

  ensure_dir(c.output_dir);
  csv::write_file(join(c.output_dir, "estimates.csv"), estimates_table(est, loaded.names, loaded.dates));
  csv::write_file(join(c.output_dir, "bands.csv"), bands_table(est, loaded.names));
  write_selection_files(s, c.output_dir);
  EstimateSummary sum;
  sum.kernel = std::string(kernel_name(kernel));
  sum.mode = b.mode + (b.select_c ? " + cv(c)" : "");
  sum.gamma = s.gamma;
  sum.c = s.c;
  sum.T = loaded.data.T();
  sum.half_window = bw.half_window();
  sum.q = c.q;
  sum.ssr = est.ssr();
  for (bool f : est.boundary) sum.boundary_points += f ? 1 : 0;
  const bool has_sel = b.mode != "fixed" || b.select_c;
  write_text(join(c.output_dir, "report.txt"), estimate_report_text(sum, has_sel ? &s.result : nullptr, b.q_bar));
  std::cout << "gamma=" << csv::format(s.gamma) << " c=" << csv::format(s.c) << " T=" << sum.T
            << " ssr=" << csv::format(sum.ssr) << " output=" << c.output_dir << '\n';
  return kOk;
}

int cmd_select(const InputOptions& in, BandwidthOptions b, const Common& c) {
  const Kernel kernel = kernel_from_name(c.kernel);
  if (b.mode == "fixed") b.mode = "bootstrap";
  const auto loaded = load_data(in);
  const Selection s = run_selection(loaded.data, b, c, kernel);
  ensure_dir(c.output_dir);
  write_selection_files(s, c.output_dir);
  EstimateSummary sum;
  sum.kernel = std::string(kernel_name(kernel));
  sum.mode = b.mode;
  sum.gamma = s.gamma;
  sum.c = s.c;
  sum.T = loaded.data.T();
  sum.half_window = Bandwidth(s.c, s.gamma, sum.T).half_window();
  sum.q = c.q;
  write_text(join(c.output_dir, "report.txt"), estimate_report_text(sum, &s.result, b.q_bar));
  std::cout << "gamma_hat=" << csv::format(s.gamma) << " c_hat=" << csv::format(s.c);
  if (!s.result.cr_matrix.empty()) {
    std::cout << " upsilon=";
    for (std::size_t k = 0; k < s.result.upsilon.size(); ++k)
      std::cout << (k ? ";" : "") << csv::format(s.result.upsilon[k]);
  }
  std::cout << '\n';
  return kOk;
}

struct PortfolioOptions {
  std::string source;
  std::string target = "VmG";
  std::string start = "1952-01";
  std::string end = "2019-12";
  std::string output;
};

int cmd_build_portfolios(const PortfolioOptions& o, const Common& c) {
  PortfolioSpec spec;
  spec.source = o.source;
  spec.target = target_from_name(o.target);
  spec.start = YearMonth::parse(o.start);
  spec.end = YearMonth::parse(o.end);
  const auto series = build_portfolios(spec);
  std::string path = o.output;
  if (path.empty()) {
    ensure_dir(c.output_dir);
    path = join(c.output_dir, std::string(target_name(spec.target)) + ".csv");
  }
  csv::write_file(path, regression_table(series, spec.target));
  std::cout << "target=" << target_name(spec.target) << " T=" << series.T() << " output=" << path << '\n';
  return kOk;
}

struct SimulateOptions {
  std::string dgp = "rw";
  double alpha = 0.2;
  std::string errors = "iid";
  std::size_t T = 400;
  std::string output;
};

ErrorSpec error_spec(const std::string& s) {
  if (s == "iid") return IidErrors{};
  if (s == "garch") return GarchErrors{};
  throw ConfigError("unknown error process '" + s + "' (expected iid or garch)");
}

TvpSpec dgp_spec(const std::string& name, double alpha) {
  if (name == "rw") return presets::rescaled_rw(Driver::Gaussian);
  if (name == "rw-lognormal") return presets::rescaled_rw(Driver::LogNormal);
  if (name == "rw-break") return presets::neglected_break_design(alpha, IidErrors{}, 1).tvp.front();
  if (name == "smooth-jump") return presets::smooth_jump_design(IidErrors{}, 1).tvp.front();
  if (name.rfind("smooth:", 0) == 0) return TvpSpec{SmoothPath{name.substr(7), {}}};
  throw ConfigError("unknown dgp '" + name + "' (expected rw, rw-lognormal, rw-break, smooth-jump or smooth:<name>)");
}

int cmd_simulate(const SimulateOptions& o, const Common& c) {
  const auto sim = simulate_dataset(dgp_spec(o.dgp, o.alpha), RegressorSpec{}, error_spec(o.errors), o.T, c.seed);
  csv::Table tab;
  tab.header = {"t", "y", "x", "beta"};
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(o.T); ++t)
    tab.rows.push_back({std::to_string(t + 1), csv::format(sim.data.y()[t]), csv::format(sim.data.X()(t, 0)),
                        csv::format(sim.beta(t, 0))});
  std::string path = o.output;
  if (path.empty()) {
    ensure_dir(c.output_dir);
    path = join(c.output_dir, "simulated.csv");
  }
  csv::write_file(path, tab);
  std::cout << "dgp=" << o.dgp << " T=" << o.T << " seed=" << c.seed << " output=" << path << '\n';
  return kOk;
}

struct McOptions {
  std::string preset = "table1-desk";
  std::size_t replications = 0;
  std::size_t B = 0;
  std::vector<std::size_t> sample_sizes;
  bool seed_given = false;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

int cmd_mc(const McOptions& o, const Common& c) {
  ensure_dir(c.output_dir);
  std::ostringstream canon;
  canon << "preset=" << o.preset << ";replications=" << o.replications << ";B=" << o.B << ";seed=" << c.seed
        << ";seed_given=" << o.seed_given << ";T=";
  for (auto T : o.sample_sizes) canon << T << ',';
  const auto start = std::chrono::steady_clock::now();
  std::string table_text;

  if (o.preset == "appendixB") {
    LocalLevelConfig cfg;
    if (o.replications) cfg.replications = o.replications;
    if (!o.sample_sizes.empty()) cfg.T = o.sample_sizes.front();
    if (o.seed_given) cfg.seed = c.seed;
    cfg.workers = workers_or_default(c.workers);
    const auto curve = local_level_mse_curve(cfg);
    csv::write_file(join(c.output_dir, "mse_curve.csv"), mse_curve_table(curve));
    const auto hm = mse_minimizing_bandwidth(cfg.T, cfg.sigma_u2, cfg.sigma_eps2);
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
      if (curve[k].empirical < curve[best].empirical) best = k;
    std::ostringstream os;
    os << "T=" << cfg.T << " replications=" << cfg.replications << "\nh_min (theory)   " << csv::format(hm.h_min)
       << "\nargmin (sim)     " << csv::format(curve[best].h) << '\n';
    table_text = os.str();
  } else {
    std::vector<McConfig> cfgs;
    TableLayout layout = TableLayout::Table1;
    const std::size_t R = o.replications ? o.replications : 500;
    const std::size_t B = o.B ? o.B : 100;
    if (o.preset == "table1-desk") {
      cfgs.push_back(presets::random_walk_design(Driver::Gaussian, IidErrors{}, R, B));
      cfgs.push_back(presets::random_walk_design(Driver::LogNormal, IidErrors{}, R, B));
    } else if (o.preset == "table2-desk") {
      cfgs.push_back(presets::random_walk_design(Driver::Gaussian, GarchErrors{}, R, B));
      cfgs.push_back(presets::random_walk_design(Driver::LogNormal, GarchErrors{}, R, B));
    } else if (o.preset == "table3-desk" || o.preset == "table4-desk") {
      layout = TableLayout::Table3;
      const ErrorSpec err = o.preset == "table3-desk" ? ErrorSpec{IidErrors{}} : ErrorSpec{GarchErrors{}};
      for (double a : {0.1, 0.2, 0.3, 0.4}) cfgs.push_back(presets::neglected_break_design(a, err, R));
    } else if (o.preset == "table5-desk") {
      layout = TableLayout::Table5;
      cfgs.push_back(presets::smooth_jump_design(IidErrors{}, R, B));
      cfgs.push_back(presets::smooth_jump_design(GarchErrors{}, R, B));
    } else {
      throw ConfigError("unknown preset '" + o.preset + "'");
    }
    McResult result;
    for (auto& cfg : cfgs) {
      if (!o.sample_sizes.empty()) cfg.sample_sizes = o.sample_sizes;
      if (o.seed_given) cfg.master_seed = c.seed;
      cfg.workers = workers_or_default(c.workers);
      result.merge(run_experiment(cfg));
    }
    const auto rendered = emit_table(result, layout);
    csv::write_file(join(c.output_dir, "results.csv"), rendered.csv);
    table_text = rendered.text;
    if (result.total_failures() > 0)
      table_text += "failed replications: " + std::to_string(result.total_failures()) + "\n";
  }
  write_text(join(c.output_dir, "table.txt"), table_text);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream man;
  man << "preset " << o.preset << "\nconfig_hash " << std::hex << fnv1a(canon.str()) << std::dec << "\nseed "
      << (o.seed_given ? std::to_string(c.seed) : std::string("preset default")) << "\ntvpk " << kVersion
      << "\ncompiler " << __VERSION__ << "\neigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
      << EIGEN_MINOR_VERSION << '\n';
  write_text(join(c.output_dir, "manifest.txt"), man.str());
  std::cout << table_text;
  std::cerr << "wall time " << secs << " s\n";
  return kOk;
}

int cmd_plotdata(const std::vector<std::string>& inputs, const std::string& output, const Common& c) {
  std::vector<csv::Table> tabs;
  for (const auto& p : inputs) tabs.push_back(csv::read_file(p));
  std::string path = output;
  if (path.empty()) {
    ensure_dir(c.output_dir);
    path = join(c.output_dir, "plotdata.csv");
  }
  const auto out = plotdata(tabs);
  csv::write_file(path, out);
  std::cout << "rows=" << out.rows.size() << " output=" << path << '\n';
  return kOk;
}

int fail(int code, const char* kind, const std::string& what) {
  std::cerr << "error kind=" << kind << " exit=" << code << " message=\"" << what << "\"\n";
  return code;
}

void add_input(CLI::App* app, InputOptions& in) {
  app->add_option("-i,--input", in.input, "Input CSV (header row required)")->required();
  app->add_option("--y", in.y, "Response column (default: first non-date column)");
  app->add_option("--x", in.x, "Regressor columns (default: all remaining columns)")->delimiter(',');
  app->add_flag("--intercept", in.intercept, "Prepend a constant regressor");
}

void add_bandwidth(CLI::App* app, BandwidthOptions& b, bool fixed_allowed) {
  auto* mode = app->add_option("--bandwidth-mode", b.mode, "fixed, cv or bootstrap");
  if (fixed_allowed)
    mode->check(CLI::IsMember({"fixed", "cv", "bootstrap"}));
  else
    mode->check(CLI::IsMember({"cv", "bootstrap"}))->default_str("bootstrap");
  app->add_option("--gamma", b.gamma, "Bandwidth exponent for fixed mode");
  app->add_option("--c", b.c, "Bandwidth scale for fixed mode");
  app->add_flag("--select-c", b.select_c, "Choose c by leave-one-out CV over 0.5, 0.55, ..., 1.5");
  app->add_option("--grid", b.grid, "Candidate gamma values")->delimiter(',');
  app->add_option("--cv-m", b.cv_m, "Leave-(2m+1)-out parameter(s); the first one selects")->delimiter(',');
  app->add_option("--B", b.B, "Bootstrap draws");
  app->add_option("--q-bar", b.q_bar, "Coverage tolerance");
  app->add_option("--coverage", b.coverage, "joint or per-coefficient");
  app->add_flag("--include-boundary", b.include_boundary, "Average bootstrap coverage over boundary t as well");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel estimation of time-varying coefficients"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI configuration file ([estimate], [mc], ... sections)");
  app.require_subcommand(1);

  Common common;
  app.add_option("--kernel", common.kernel, "epanechnikov or uniform")->capture_default_str();
  app.add_option("--q", common.q, "Confidence intervals at level 1 - q")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", common.seed, "Random seed")->envname("TVPK_SEED");
  app.add_option("-o,--output-dir", common.output_dir, "Output directory")->envname("TVPK_OUTPUT_DIR");
  app.add_option("--workers", common.workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--variance", common.variance, "local or global variance estimator")
    ->check(CLI::IsMember({"local", "global"}));

  InputOptions est_in, sel_in;
  BandwidthOptions est_bw, sel_bw;
  sel_bw.mode = "bootstrap";
  auto* est = app.add_subcommand("estimate", "Estimate the coefficient path with confidence bands");
  add_input(est, est_in);
  add_bandwidth(est, est_bw, true);

  auto* sel = app.add_subcommand("select-bandwidth", "Select gamma (and optionally c)");
  add_input(sel, sel_in);
  add_bandwidth(sel, sel_bw, false);

  PortfolioOptions port;
  auto* bp = app.add_subcommand("build-portfolios", "Build G, V or VmG from a 25-portfolio file");
  bp->add_option("--source", port.source, "25 size/B-M portfolio CSV")->required();
  bp->add_option("--target", port.target, "G, V or VmG")->capture_default_str();
  bp->add_option("--start", port.start, "First month YYYY-MM")->capture_default_str();
  bp->add_option("--end", port.end, "Last month YYYY-MM")->capture_default_str();
  bp->add_option("--output", port.output, "Output CSV (default <output-dir>/<target>.csv)");

  SimulateOptions simo;
  auto* sim = app.add_subcommand("simulate", "Simulate one dataset");
  sim->add_option("--dgp", simo.dgp, "rw, rw-lognormal, rw-break, smooth-jump or smooth:<name>")->capture_default_str();
  sim->add_option("--alpha", simo.alpha, "Break magnitude exponent for rw-break")->capture_default_str();
  sim->add_option("--errors", simo.errors, "iid or garch")->capture_default_str();
  sim->add_option("--T", simo.T, "Sample size")->capture_default_str();
  sim->add_option("--output", simo.output, "Output CSV (default <output-dir>/simulated.csv)");

  McOptions mco;
  auto* mc = app.add_subcommand("mc", "Run a Monte Carlo preset");
  mc->add_option("--preset", mco.preset, "table1-desk, table2-desk, table3-desk, table4-desk, table5-desk, appendixB")
    ->capture_default_str();
  mc->add_option("--replications", mco.replications, "Override the replication count");
  mc->add_option("--B", mco.B, "Bootstrap draws for the Boot rows");
  mc->add_option("--sample-sizes", mco.sample_sizes, "Override the sample sizes")->delimiter(',');

  std::vector<std::string> plot_inputs;
  std::string plot_output;
  auto* plot = app.add_subcommand("plotdata", "Flatten estimates, bands or CV curves into long format");
  plot->add_option("inputs", plot_inputs, "CSV files written by estimate / select-bandwidth")->required();
  plot->add_option("--output", plot_output, "Output CSV (default <output-dir>/plotdata.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfig, "ConfigError", e.what());
  }
  mco.seed_given = seed_opt->count() > 0;

  try {
    if (*est) return cmd_estimate(est_in, est_bw, common);
    if (*sel) return cmd_select(sel_in, sel_bw, common);
    if (*bp) return cmd_build_portfolios(port, common);
    if (*sim) return cmd_simulate(simo, common);
    if (*mc) return cmd_mc(mco, common);
    if (*plot) return cmd_plotdata(plot_inputs, plot_output, common);
  } catch (const LayoutError& e) {
    return fail(kParse, "LayoutError", e.what());
  } catch (const ParseError& e) {
    return fail(kParse, "ParseError", e.what());
  } catch (const DateRangeError& e) {
    return fail(kParse, "DateRangeError", e.what());
  } catch (const SingularGram& e) {
    return fail(kNumerical, "SingularGram", e.what());
  } catch (const EmptyWindow& e) {
    return fail(kNumerical, "EmptyWindow", e.what());
  } catch (const SelectionError& e) {
    return fail(kNumerical, "SelectionError", e.what());
  } catch (const Error& e) {
    return fail(kConfig, "ConfigError", e.what());
  } catch (const std::exception& e) {
    return fail(kConfig, "Error", e.what());
  }
  return kOk;
}
