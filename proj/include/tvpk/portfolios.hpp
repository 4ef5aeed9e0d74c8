#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tvpk/csv.hpp"
#include "tvpk/data.hpp"
#include "tvpk/errors.hpp"

namespace tvpk {

/// Monthly 25 size/book-to-market portfolio file.
///
/// Expected columns: `date` (YYYYMM), `Mkt-RF`, `RF`, and the 25 returns
/// `ME{i}_BM{j}` for i, j in 1..5 (BM1 = lowest book-to-market). Extra
/// columns are ignored; column order does not matter.
enum class PortfolioTarget { G, V, VmG };

inline const char* target_name(PortfolioTarget t) {
  switch (t) {
    case PortfolioTarget::G: return "G";
    case PortfolioTarget::V: return "V";
    case PortfolioTarget::VmG: return "VmG";
  }
  return "?";
}

inline PortfolioTarget target_from_name(const std::string& s) {
  if (s == "G") return PortfolioTarget::G;
  if (s == "V") return PortfolioTarget::V;
  if (s == "VmG" || s == "V-G") return PortfolioTarget::VmG;
  throw ConfigError("unknown portfolio target '" + s + "' (expected G, V or VmG)");
}

//! Year-month packed as YYYYMM.
struct YearMonth {
  int year = 1952;
  int month = 1;

  int packed() const { return year * 100 + month; }
  static YearMonth from_packed(long long v) {
    YearMonth ym{static_cast<int>(v / 100), static_cast<int>(v % 100)};
    if (ym.month < 1 || ym.month > 12 || v < 0) throw DateRangeError("invalid year-month " + std::to_string(v));
    return ym;
  }
  //! Accepts "YYYY-MM" or "YYYYMM".
  static YearMonth parse(const std::string& s) {
    std::string digits;
    for (char c : s)
      if (c != '-') digits.push_back(c);
    if (digits.size() != 6) throw DateRangeError("expected YYYY-MM, got '" + s + "'");
    return from_packed(csv::parse_integer(digits, 0, 0));
  }
};

struct PortfolioSpec {
  std::string source;
  std::string market_column = "Mkt-RF";
  std::string rf_column = "RF";
  PortfolioTarget target = PortfolioTarget::VmG;
  YearMonth start{1952, 1};
  YearMonth end{2019, 12};
};

//! Monthly series of the three portfolios within the requested range.
struct PortfolioSeries {
  std::vector<int> dates;
  std::vector<double> market_excess;
  std::vector<double> G; ///< excess return of the low B/M average
  std::vector<double> V; ///< excess return of the high B/M average
  std::vector<double> VmG;

  std::size_t T() const noexcept { return dates.size(); }
  const std::vector<double>& series(PortfolioTarget t) const {
    switch (t) {
      case PortfolioTarget::G: return G;
      case PortfolioTarget::V: return V;
      case PortfolioTarget::VmG: break;
    }
    return VmG;
  }
};

inline std::string portfolio_column(int size, int bm) {
  return "ME" + std::to_string(size) + "_BM" + std::to_string(bm);
}

namespace detail {

inline bool is_sentinel(double v) {
  return std::fabs(v + 99.99) < 1e-9 || std::fabs(v + 999.0) < 1e-9 || std::isnan(v);
}

} // namespace detail

/// G and V average the five size portfolios of the lowest and highest B/M
/// quintile; both are taken in excess of RF. VmG = V - G.
inline PortfolioSeries build_portfolios(const csv::Table& table, const PortfolioSpec& spec) {
  auto col = [&](const std::string& name) {
    for (std::size_t j = 0; j < table.header.size(); ++j)
      if (table.header[j] == name) return j;
    throw LayoutError("missing column '" + name + "'", 1, 0);
  };
  const std::size_t cdate = col("date");
  const std::size_t cmkt = col(spec.market_column);
  const std::size_t crf = col(spec.rf_column);
  std::size_t cg[5], cv[5];
  for (int i = 1; i <= 5; ++i) {
    // the whole 5x5 grid must be present even though only two quintiles are used
    for (int j = 1; j <= 5; ++j) col(portfolio_column(i, j));
    cg[i - 1] = col(portfolio_column(i, 1));
    cv[i - 1] = col(portfolio_column(i, 5));
  }
  const int lo = spec.start.packed(), hi = spec.end.packed();
  if (lo > hi) throw DateRangeError("start " + std::to_string(lo) + " is after end " + std::to_string(hi));

  PortfolioSeries out;
  int prev = -1;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines.empty() ? r + 2 : table.row_lines[r];
    const auto ym = YearMonth::from_packed(csv::parse_integer(row[cdate], line, cdate + 1));
    const int d = ym.packed();
    if (prev >= 0 && d <= prev) throw LayoutError("dates must be strictly increasing", line, cdate + 1);
    prev = d;
    if (d < lo || d > hi) continue;
    auto value = [&](std::size_t c) {
      const double v = csv::parse_double(row[c], line, c + 1);
      if (detail::is_sentinel(v)) throw LayoutError("missing-value sentinel '" + row[c] + "' in range", line, c + 1);
      return v;
    };
    const double rf = value(crf);
    double g = 0.0, v = 0.0;
    for (int i = 0; i < 5; ++i) {
      g += value(cg[i]);
      v += value(cv[i]);
    }
    g = g / 5.0 - rf;
    v = v / 5.0 - rf;
    out.dates.push_back(d);
    out.market_excess.push_back(value(cmkt));
    out.G.push_back(g);
    out.V.push_back(v);
    out.VmG.push_back(v - g);
  }
  if (out.dates.empty()) throw DateRangeError("no observations between " + std::to_string(lo) + " and " + std::to_string(hi));
  if (out.dates.front() != lo || out.dates.back() != hi)
    throw DateRangeError("data cover " + std::to_string(out.dates.front()) + ".." + std::to_string(out.dates.back()) +
                         ", requested " + std::to_string(lo) + ".." + std::to_string(hi));
  for (std::size_t k = 1; k < out.dates.size(); ++k) {
    const int a = out.dates[k - 1], b = out.dates[k];
    const int next = (a % 100 == 12) ? (a / 100 + 1) * 100 + 1 : a + 1;
    if (b != next) throw DateRangeError("gap in monthly data after " + std::to_string(a));
  }
  return out;
}

inline PortfolioSeries build_portfolios(const PortfolioSpec& spec) {
  return build_portfolios(csv::read_file(spec.source), spec);
}

//! Columns: date, excess_return, intercept, market_excess.
inline csv::Table regression_table(const PortfolioSeries& s, PortfolioTarget target) {
  csv::Table t;
  t.header = {"date", "excess_return", "intercept", "market_excess"};
  const auto& y = s.series(target);
  for (std::size_t k = 0; k < s.T(); ++k)
    t.rows.push_back({std::to_string(s.dates[k]), csv::format(y[k]), "1", csv::format(s.market_excess[k])});
  return t;
}

//! x_t = (1, market excess)'.
inline TimeSeriesData capm_data(const PortfolioSeries& s, PortfolioTarget target) {
  const auto n = static_cast<Eigen::Index>(s.T());
  Eigen::VectorXd y(n);
  RowMatrix X(n, 2);
  const auto& r = s.series(target);
  for (Eigen::Index k = 0; k < n; ++k) {
    y[k] = r[static_cast<std::size_t>(k)];
    X(k, 0) = 1.0;
    X(k, 1) = s.market_excess[static_cast<std::size_t>(k)];
  }
  return TimeSeriesData(std::move(y), std::move(X));
}

} // namespace tvpk
