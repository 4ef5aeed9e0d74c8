#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tvpk/errors.hpp"

namespace tvpk::csv {

//! Header plus string cells; line numbers are kept for error reporting.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines; ///< 1-based source line of each row

  std::size_t column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw ConfigError("csv: no column named '" + std::string(name) + "'");
  }
  bool has_column(std::string_view name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
};

/// Shortest representation that parses back to the same double; "NA" for NaN.
inline std::string format(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line, std::size_t column) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "NA" || s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "Inf" || s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-Inf" || s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'", line, column);
  return v;
}

inline long long parse_integer(std::string_view s, std::size_t line, std::size_t column) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("not an integer: '" + std::string(s) + "'", line, column);
  return v;
}

namespace detail {

// Splits one record; a quoted field may contain separators, doubled quotes and newlines.
inline bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line, char sep) {
  fields.clear();
  std::string cur;
  bool quoted = false, any = false, field_started = false;
  std::size_t col = 1;
  const std::size_t start_line = line + 1;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cur.push_back(c);
      }
      ++col;
      continue;
    }
    if (c == '"') {
      if (field_started && !cur.empty()) throw ParseError("unexpected quote inside field", line + 1, col);
      quoted = true;
      field_started = true;
    } else if (c == sep) {
      fields.push_back(std::move(cur));
      cur.clear();
      field_started = false;
    } else if (c == '\n') {
      ++line;
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      fields.push_back(std::move(cur));
      return true;
    } else {
      cur.push_back(c);
      field_started = true;
    }
    ++col;
  }
  if (quoted) throw ParseError("unterminated quoted field", start_line, col);
  if (!any) return false;
  ++line;
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  fields.push_back(std::move(cur));
  return true;
}

inline bool blank(const std::vector<std::string>& f) { return f.size() == 1 && f[0].empty(); }

} // namespace detail

/// Reads a header line then data rows. Blank lines are skipped; every data
/// row must have as many fields as the header.
inline Table read(std::istream& in, char sep = ',') {
  Table t;
  std::size_t line = 0;
  std::vector<std::string> f;
  while (detail::read_record(in, f, line, sep)) {
    if (detail::blank(f)) continue;
    t.header = f;
    break;
  }
  if (t.header.empty()) return t;
  if (!t.header.empty() && t.header[0].size() >= 3 && t.header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
    t.header[0].erase(0, 3);
  while (detail::read_record(in, f, line, sep)) {
    if (detail::blank(f)) continue;
    if (f.size() != t.header.size())
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " + std::to_string(f.size()),
                       line, f.size() < t.header.size() ? f.size() : t.header.size() + 1);
    t.rows.push_back(f);
    t.row_lines.push_back(line);
  }
  return t;
}

inline Table read_file(const std::string& path, char sep = ',') {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  return read(in, sep);
}

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write(std::ostream& out, const Table& t) {
  auto line = [&out](const std::vector<std::string>& f) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (j) out << ',';
      out << quote(f[j]);
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write(out, t);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

inline std::string to_string(const Table& t) {
  std::ostringstream os;
  write(os, t);
  return os.str();
}

inline Table parse(const std::string& text) {
  std::istringstream is(text);
  return read(is);
}

} // namespace tvpk::csv
