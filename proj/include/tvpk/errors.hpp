#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace tvpk {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Weighted Gram matrix is numerically singular at time index `t`.
class SingularGram : public Error {
public:
  SingularGram(std::size_t t, double condition_estimate)
    : Error("singular weighted Gram matrix at t=" + std::to_string(t) +
            " (condition estimate " + std::to_string(condition_estimate) + ")"),
      t_(t), condition_(condition_estimate) {}

  std::size_t t() const noexcept { return t_; }
  double condition_estimate() const noexcept { return condition_; }

private:
  std::size_t t_;
  double condition_;
};

//! Leave-out exclusion removed every observation of the kernel window.
class EmptyWindow : public Error {
public:
  explicit EmptyWindow(std::size_t t)
    : Error("leave-out exclusion empties the kernel window at t=" + std::to_string(t)), t_(t) {}
  std::size_t t() const noexcept { return t_; }

private:
  std::size_t t_;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class InvalidSpec : public Error {
public:
  using Error::Error;
};

class InvalidAlpha : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

class InvalidGamma : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

//! Malformed input file; `line` and `column` are 1-based (0 when unknown).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
    : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class LayoutError : public ParseError {
public:
  explicit LayoutError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
    : ParseError(what, line, column) {}
};

class DateRangeError : public Error {
public:
  using Error::Error;
};

//! Estimation failed for a specific bandwidth cell during selection.
class SelectionError : public Error {
public:
  SelectionError(const std::string& what, double gamma1, double gamma2 = std::numeric_limits<double>::quiet_NaN())
    : Error(what), gamma1_(gamma1), gamma2_(gamma2) {}
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }

private:
  double gamma1_;
  double gamma2_;
};

} // namespace tvpk
