#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "tvpk/errors.hpp"

namespace tvpk {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Observed sample (y_t, x_t), t = 0..T-1, with p regressor columns.
///
/// Time indices are 0-based throughout the library; files written by the
/// command line tool number rows from 1.
class TimeSeriesData {
public:
  TimeSeriesData(Eigen::VectorXd y, RowMatrix X) : y_(std::move(y)), X_(std::move(X)) {
    if (X_.cols() < 1) throw InvalidInput("TimeSeriesData: at least one regressor column is required");
    if (y_.size() != X_.rows())
      throw InvalidInput("TimeSeriesData: y has " + std::to_string(y_.size()) + " rows but X has " +
                         std::to_string(X_.rows()));
    if (y_.size() < 2 * X_.cols())
      throw InvalidInput("TimeSeriesData: T=" + std::to_string(y_.size()) + " is smaller than 2p=" +
                         std::to_string(2 * X_.cols()));
    if (!y_.allFinite() || !X_.allFinite()) throw InvalidInput("TimeSeriesData: non-finite entries");
  }

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const RowMatrix& X() const noexcept { return X_; }
  std::size_t T() const noexcept { return static_cast<std::size_t>(y_.size()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(X_.cols()); }

  //! Same regressors, different response (used by resampling schemes).
  TimeSeriesData with_response(Eigen::VectorXd y) const { return TimeSeriesData(std::move(y), X_); }

private:
  Eigen::VectorXd y_;
  RowMatrix X_;
};

/// Bandwidth h = c * T^gamma and its integer half window floor(T h).
class Bandwidth {
public:
  Bandwidth(double c, double gamma, std::size_t T) : c_(c), gamma_(gamma), T_(T) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("Bandwidth: scale c must be positive");
    if (!(gamma > -1.0 && gamma <= 0.0)) throw InvalidGamma("Bandwidth: gamma must lie in (-1, 0]");
    if (T < 1) throw InvalidInput("Bandwidth: T must be positive");
    h_ = c * std::pow(static_cast<double>(T), gamma);
    finish();
  }

  //! Bandwidth given directly as a fraction h of the sample.
  static Bandwidth from_h(double h, std::size_t T) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("Bandwidth: h must be positive");
    Bandwidth bw(1.0, -0.5, T);
    bw.c_ = h * std::sqrt(static_cast<double>(T));
    bw.h_ = h;
    bw.finish();
    return bw;
  }

  double c() const noexcept { return c_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t T() const noexcept { return T_; }
  double h() const noexcept { return h_; }
  //! T * h, the kernel argument scale.
  double scale() const noexcept { return static_cast<double>(T_) * h_; }
  std::size_t half_window() const noexcept { return half_window_; }

private:
  void finish() {
    // Guard against T^gamma landing one ulp below an integer product.
    const double th = scale();
    half_window_ = static_cast<std::size_t>(std::floor(th * (1.0 + 1e-12)));
    if (half_window_ < 1)
      throw InvalidInput("Bandwidth: floor(T h) = 0 for T=" + std::to_string(T_) + ", h=" + std::to_string(h_));
  }

  double c_;
  double gamma_;
  std::size_t T_;
  double h_ = 0.0;
  std::size_t half_window_ = 0;
};

} // namespace tvpk
