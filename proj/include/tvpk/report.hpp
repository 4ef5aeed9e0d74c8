#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tvpk/csv.hpp"
#include "tvpk/estimator.hpp"
#include "tvpk/mc.hpp"
#include "tvpk/selection.hpp"

namespace tvpk {

namespace detail {

inline std::string fixed(double v, int digits = 3) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Estimates
// ---------------------------------------------------------------------------

//! t (1-based), optional date, beta_j, se_j, boundary.
inline csv::Table estimates_table(const TvpEstimate& est, const std::vector<std::string>& names,
                                  const std::vector<int>& dates = {}) {
  csv::Table tab;
  tab.header = {"t"};
  if (!dates.empty()) tab.header.push_back("date");
  for (const auto& n : names) tab.header.push_back("beta_" + n);
  for (const auto& n : names) tab.header.push_back("se_" + n);
  tab.header.push_back("residual");
  tab.header.push_back("boundary");
  for (std::size_t t = 0; t < est.T(); ++t) {
    std::vector<std::string> row{std::to_string(t + 1)};
    if (!dates.empty()) row.push_back(std::to_string(dates[t]));
    for (std::size_t j = 0; j < est.p(); ++j)
      row.push_back(csv::format(est.beta_hat(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j))));
    for (std::size_t j = 0; j < est.p(); ++j) row.push_back(csv::format(est.se(t, j)));
    row.push_back(csv::format(est.residuals[static_cast<Eigen::Index>(t)]));
    row.push_back(est.boundary[t] ? "1" : "0");
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

inline csv::Table bands_table(const TvpEstimate& est, const std::vector<std::string>& names) {
  csv::Table tab;
  tab.header = {"t"};
  for (const auto& n : names) {
    tab.header.push_back("lower_" + n);
    tab.header.push_back("upper_" + n);
  }
  tab.header.push_back("boundary");
  for (std::size_t t = 0; t < est.T(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    std::vector<std::string> row{std::to_string(t + 1)};
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(est.p()); ++j) {
      row.push_back(csv::format(est.ci_lower(ti, j)));
      row.push_back(csv::format(est.ci_upper(ti, j)));
    }
    row.push_back(est.boundary[t] ? "1" : "0");
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

// ---------------------------------------------------------------------------
// Selection reports
// ---------------------------------------------------------------------------

/// Lower-triangular coverage matrix: rows gamma1, columns gamma2 <= gamma1.
inline std::string coverage_matrix_text(const SelectionResult& sel, double q_bar) {
  std::vector<double> g;
  for (const auto& c : sel.cr_matrix) detail::push_unique(g, c.gamma1);
  std::sort(g.begin(), g.end());
  std::ostringstream os;
  os << detail::pad("g1 \\ g2", 10);
  for (double x : g) os << detail::pad(detail::fmt_gamma(x), 9);
  os << "   admissible\n";
  for (double g1 : g) {
    os << detail::pad(detail::fmt_gamma(g1), 10);
    for (double g2 : g) {
      const auto* c = g2 <= g1 ? sel.cell(g1, g2) : nullptr;
      os << detail::pad(c ? detail::fixed(c->cr) : "", 9);
    }
    const bool in = std::find(sel.upsilon.begin(), sel.upsilon.end(), g1) != sel.upsilon.end();
    os << "   " << (in ? "yes" : "no") << '\n';
  }
  os << "threshold 1 - q_bar = " << detail::fixed(1.0 - q_bar) << '\n';
  return os.str();
}

inline csv::Table coverage_matrix_table(const SelectionResult& sel) {
  csv::Table tab;
  tab.header = {"gamma1", "gamma2", "cr", "in_upsilon"};
  for (const auto& c : sel.cr_matrix) {
    const bool in = std::find(sel.upsilon.begin(), sel.upsilon.end(), c.gamma1) != sel.upsilon.end();
    tab.rows.push_back({csv::format(c.gamma1), csv::format(c.gamma2), csv::format(c.cr), in ? "1" : "0"});
  }
  return tab;
}

//! Rows (m, x, cv, is_min); x is gamma or c.
inline csv::Table cv_curve_table(const std::vector<std::pair<std::size_t, std::vector<CvPoint>>>& curves,
                                 const std::string& x_name = "gamma") {
  csv::Table tab;
  tab.header = {"m", x_name, "cv", "is_min"};
  for (const auto& [m, curve] : curves) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
      if (curve[k].cv < curve[best].cv) best = k;
    for (std::size_t k = 0; k < curve.size(); ++k)
      tab.rows.push_back({std::to_string(m), csv::format(curve[k].x), csv::format(curve[k].cv), k == best ? "1" : "0"});
  }
  return tab;
}

struct EstimateSummary {
  std::string kernel;
  std::string mode;
  double gamma = -0.5;
  double c = 1.0;
  std::size_t T = 0;
  std::size_t half_window = 0;
  double q = 0.05;
  double ssr = 0.0;
  std::size_t boundary_points = 0;
};

inline std::string estimate_report_text(const EstimateSummary& s, const SelectionResult* sel, double q_bar) {
  std::ostringstream os;
  os << "kernel            " << s.kernel << '\n'
     << "bandwidth mode    " << s.mode << '\n'
     << "gamma             " << detail::fmt_gamma(s.gamma) << '\n'
     << "c                 " << csv::format(s.c) << '\n'
     << "T                 " << s.T << '\n'
     << "half window       " << s.half_window << '\n'
     << "confidence level  " << detail::fixed(1.0 - s.q, 3) << '\n'
     << "SSR               " << csv::format(s.ssr) << '\n'
     << "boundary points   " << s.boundary_points << " (intervals flagged, not covered by the asymptotics)\n";
  if (sel && !sel->cr_matrix.empty()) {
    os << "\nbootstrap coverage (mean over t)\n" << coverage_matrix_text(*sel, q_bar);
    std::vector<double> g;
    for (const auto& c : sel->cr_matrix) detail::push_unique(g, c.gamma1);
    for (double x : g)
      if (std::find(sel->upsilon.begin(), sel->upsilon.end(), x) == sel->upsilon.end())
        os << "gamma1 = " << detail::fmt_gamma(x) << " rejected\n";
    os << "selected gamma = " << detail::fmt_gamma(sel->gamma_hat)
       << (sel->upsilon.empty() ? " (no admissible candidate, lower bound used)" : "") << '\n';
  }
  if (sel && !sel->cv_curve.empty()) {
    os << "\ncross-validation (m = " << sel->m << ")\n";
    for (const auto& p : sel->cv_curve) os << "  " << detail::pad(detail::fmt_gamma(p.x), 7) << "  " << csv::format(p.cv) << '\n';
  }
  if (sel && !sel->c_curve.empty()) {
    os << "\nscale selection, c_hat = " << csv::format(sel->c_hat) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Monte Carlo tables
// ---------------------------------------------------------------------------

enum class TableLayout { Table1, Table3, Table5, Custom };

inline TableLayout layout_from_name(const std::string& s) {
  if (s == "table1") return TableLayout::Table1;
  if (s == "table3") return TableLayout::Table3;
  if (s == "table5") return TableLayout::Table5;
  if (s == "custom") return TableLayout::Custom;
  throw ConfigError("unknown table layout '" + s + "'");
}

//! One row per (cell, evaluation point); the lossless form of an McResult.
inline csv::Table results_table(const McResult& r) {
  csv::Table tab;
  tab.header = {"dgp",      "T",        "bandwidth",   "tau",        "t",          "mse",
                "mse_se",   "coverage", "coverage_se", "coverage_n", "path_mse",   "path_mse_se",
                "mean_gamma", "replications", "failures", "wall_seconds"};
  for (const auto& c : r.cells)
    for (const auto& p : c.points)
      tab.rows.push_back({c.dgp, std::to_string(c.T), c.bandwidth, csv::format(p.tau), std::to_string(p.t),
                          csv::format(p.mse), csv::format(p.mse_se), csv::format(p.coverage),
                          csv::format(p.coverage_se), std::to_string(p.coverage_n), csv::format(c.mean_mse),
                          csv::format(c.mse_se), csv::format(c.mean_gamma), std::to_string(c.replications),
                          std::to_string(c.failures), csv::format(c.wall_seconds)});
  return tab;
}

inline McResult parse_results(const csv::Table& tab) {
  McResult r;
  auto col = [&](const char* n) { return tab.column(n); };
  const std::size_t cd = col("dgp"), cT = col("T"), cb = col("bandwidth"), ctau = col("tau"), ct = col("t"),
                    cm = col("mse"), cms = col("mse_se"), cc = col("coverage"), ccs = col("coverage_se"),
                    ccn = col("coverage_n"), cpm = col("path_mse"), cpms = col("path_mse_se"), cg = col("mean_gamma"),
                    cr = col("replications"), cf = col("failures"), cw = col("wall_seconds");
  for (std::size_t i = 0; i < tab.rows.size(); ++i) {
    const auto& row = tab.rows[i];
    const std::size_t line = tab.row_lines.empty() ? i + 2 : tab.row_lines[i];
    auto num = [&](std::size_t c) { return csv::parse_double(row[c], line, c + 1); };
    auto integer = [&](std::size_t c) { return static_cast<std::size_t>(csv::parse_integer(row[c], line, c + 1)); };
    const std::size_t T = integer(cT);
    McCell* cell = nullptr;
    for (auto& c : r.cells)
      if (c.dgp == row[cd] && c.T == T && c.bandwidth == row[cb]) cell = &c;
    if (!cell) {
      r.cells.push_back({row[cd], T, row[cb], num(cpm), num(cpms), num(cg), {}, integer(cr), integer(cf), num(cw)});
      cell = &r.cells.back();
    }
    cell->points.push_back({num(ctau), integer(ct), num(cm), num(cms), num(cc), num(ccs), integer(ccn)});
  }
  return r;
}

struct RenderedTable {
  std::string text;
  csv::Table csv;
};

/// Fixed-layout text table plus the long CSV of every cell.
///
/// Table1/Table5: rows are bandwidth rules, columns T x {MSE, CR} where MSE
/// is the path MSE and CR the coverage at the first evaluation point.
/// Table3: one block per T, rows are designs, columns MSE(tau) then CR(tau).
inline RenderedTable emit_table(const McResult& r, TableLayout layout) {
  RenderedTable out;
  out.csv = results_table(r);
  std::vector<std::string> dgps, bws;
  std::vector<std::size_t> Ts;
  for (const auto& c : r.cells) {
    detail::push_unique(dgps, c.dgp);
    detail::push_unique(bws, c.bandwidth);
    detail::push_unique(Ts, c.T);
  }
  std::ostringstream os;
  switch (layout) {
    case TableLayout::Table1:
    case TableLayout::Table5: {
      os << detail::pad("", 8) << detail::pad("gamma", 8);
      for (auto T : Ts) os << detail::pad("MSE T=" + std::to_string(T), 12) << detail::pad("CR", 8);
      os << '\n';
      for (const auto& d : dgps)
        for (const auto& b : bws) {
          bool any = false;
          std::ostringstream line;
          line << detail::pad(d, 8) << detail::pad(b, 8);
          for (auto T : Ts) {
            const auto* c = r.find(d, T, b);
            any = any || c;
            line << detail::pad(c ? detail::fixed(c->mean_mse) : "", 12)
                 << detail::pad(c && !c->points.empty() ? detail::fixed(c->points.front().coverage) : "", 8);
          }
          if (any) os << line.str() << '\n';
        }
      break;
    }
    case TableLayout::Table3: {
      std::vector<double> taus;
      for (const auto& c : r.cells)
        for (const auto& p : c.points) detail::push_unique(taus, p.tau);
      os << detail::pad("T", 6) << detail::pad("design", 12);
      for (double t : taus) os << detail::pad("MSE " + detail::fixed(t, 2), 10);
      for (double t : taus) os << detail::pad("CR " + detail::fixed(t, 2), 10);
      os << '\n';
      for (auto T : Ts)
        for (const auto& d : dgps)
          for (const auto& b : bws) {
            const auto* c = r.find(d, T, b);
            if (!c) continue;
            os << detail::pad(std::to_string(T), 6) << detail::pad(bws.size() > 1 ? d + "/" + b : d, 12);
            for (double t : taus) {
              const auto* p = c->at(t);
              os << detail::pad(p ? detail::fixed(p->mse, 2) : "", 10);
            }
            for (double t : taus) {
              const auto* p = c->at(t);
              os << detail::pad(p ? detail::fixed(p->coverage, 2) : "", 10);
            }
            os << '\n';
          }
      break;
    }
    case TableLayout::Custom:
      out.text = csv::to_string(out.csv);
      return out;
  }
  out.text = os.str();
  return out;
}

inline csv::Table mse_curve_table(const std::vector<MseCurvePoint>& curve) {
  csv::Table tab;
  tab.header = {"h", "half_window", "empirical", "empirical_se", "theoretical", "exact"};
  for (const auto& p : curve)
    tab.rows.push_back({csv::format(p.h), std::to_string(p.half_window), csv::format(p.empirical),
                        csv::format(p.empirical_se), csv::format(p.theoretical), csv::format(p.exact)});
  return tab;
}

// ---------------------------------------------------------------------------
// Plot data
// ---------------------------------------------------------------------------

/// Long format (series, x, value) from an estimates, bands or CV-curve CSV.
///
/// Estimates/bands: every numeric column except t/date becomes a series
/// indexed by t. CV curves (columns m, gamma|c, cv): series "cv_m{m}" and
/// "cv_m{m}_min" for the minimizer.
inline csv::Table plotdata(const std::vector<csv::Table>& inputs) {
  csv::Table out;
  out.header = {"series", "x", "value"};
  for (const auto& tab : inputs) {
    if (tab.header.empty()) continue;
    if (tab.has_column("m") && tab.has_column("cv")) {
      const std::size_t cm = tab.column("m"), ccv = tab.column("cv");
      const std::size_t cx = tab.has_column("gamma") ? tab.column("gamma") : tab.column("c");
      const bool has_min = tab.has_column("is_min");
      for (const auto& row : tab.rows) {
        const std::string name = "cv_m" + row[cm];
        out.rows.push_back({name, row[cx], row[ccv]});
        if (has_min && row[tab.column("is_min")] == "1") out.rows.push_back({name + "_min", row[cx], row[ccv]});
      }
      continue;
    }
    if (!tab.has_column("t")) throw ConfigError("plotdata: input has neither a 't' nor an 'm'/'cv' column");
    const std::size_t ct = tab.column("t");
    for (std::size_t j = 0; j < tab.header.size(); ++j) {
      if (j == ct || tab.header[j] == "date") continue;
      for (const auto& row : tab.rows) out.rows.push_back({tab.header[j], row[ct], row[j]});
    }
  }
  return out;
}

} // namespace tvpk
