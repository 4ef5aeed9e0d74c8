#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "tvpk/errors.hpp"

namespace tvpk {

//! Compactly supported kernels on [-1, 1].
enum class Kernel { Epanechnikov, Uniform };

inline std::string_view kernel_name(Kernel k) {
  switch (k) {
    case Kernel::Epanechnikov: return "epanechnikov";
    case Kernel::Uniform: return "uniform";
  }
  return "unknown";
}

inline Kernel kernel_from_name(std::string_view name) {
  if (name == "epanechnikov") return Kernel::Epanechnikov;
  if (name == "uniform") return Kernel::Uniform;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected epanechnikov|uniform)");
}

//! K(x); exactly zero outside [-1, 1].
inline double evaluate(Kernel k, double x) noexcept {
  const double ax = std::fabs(x);
  if (ax > 1.0) return 0.0;
  switch (k) {
    case Kernel::Epanechnikov: return 0.75 * (1.0 - x * x);
    case Kernel::Uniform: return 0.5;
  }
  return 0.0;
}

//! Lipschitz constant of K on [-1, 1].
inline double lipschitz_bound(Kernel k) noexcept {
  return k == Kernel::Epanechnikov ? 1.5 : 0.0;
}

//! Composite Simpson rule on [a, b] with an even number of intervals.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals = std::size_t{1} << 14) {
  if (intervals % 2 != 0) ++intervals;
  const double step = (b - a) / static_cast<double>(intervals);
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(a + step * static_cast<double>(i));
    (i % 2 ? odd : even) += v;
  }
  return step / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

//! Closed-form integral of K(x)^2 over [-1, 1].
inline double l2_norm_squared(Kernel k) noexcept {
  switch (k) {
    case Kernel::Epanechnikov: return 0.6; // 0.5625 * 16/15
    case Kernel::Uniform: return 0.5;
  }
  return 0.0;
}

inline double l2_norm_squared_quadrature(Kernel k) {
  return simpson([k](double x) { const double v = evaluate(k, x); return v * v; }, -1.0, 1.0);
}

} // namespace tvpk
