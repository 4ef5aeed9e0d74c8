#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tvpk/data.hpp"
#include "tvpk/errors.hpp"
#include "tvpk/kernels.hpp"
#include "tvpk/stats.hpp"

namespace tvpk {

//! Gram matrices with a condition estimate above this are treated as singular.
inline constexpr double kSingularCondition = 1e12;

enum class VarianceMode {
  Local,  ///< kernel-weighted Omega_t and Sigma_t around each t
  Global, ///< full-sample Omega and Sigma scaled by the kernel's L2 norm (stationary designs)
};

struct EstimateOptions {
  double q = 0.05;
  VarianceMode variance = VarianceMode::Local;
};

/// Per-t output of the local constant estimator.
struct TvpEstimate {
  RowMatrix beta_hat;                ///< T x p
  std::vector<Eigen::MatrixXd> cov;  ///< p x p sandwich covariance per t
  Eigen::VectorXd residuals;         ///< y_t - x_t' beta_hat_t
  RowMatrix ci_lower;
  RowMatrix ci_upper;
  std::vector<bool> boundary;        ///< window clipped at the sample edge
  double q = 0.05;

  std::size_t T() const noexcept { return static_cast<std::size_t>(beta_hat.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(beta_hat.cols()); }
  double se(std::size_t t, std::size_t j) const { return std::sqrt(std::max(0.0, cov[t](j, j))); }
  double ssr() const noexcept { return residuals.squaredNorm(); }
};

namespace detail {

//! Kernel weights K(d / Th) for offsets d = 0..floor(Th).
inline std::vector<double> offset_weights(const Bandwidth& bw, Kernel k) {
  const std::size_t n = bw.half_window();
  const double scale = bw.scale();
  std::vector<double> w(n + 1);
  for (std::size_t d = 0; d <= n; ++d) w[d] = evaluate(k, std::min(1.0, static_cast<double>(d) / scale));
  return w;
}

inline void check_bandwidth(const Bandwidth& bw, Kernel k, std::size_t T) {
  if (bw.T() != T) throw InvalidInput("bandwidth was built for T=" + std::to_string(bw.T()) + ", data has T=" +
                                      std::to_string(T));
  if (bw.gamma() == 0.0 && k != Kernel::Uniform)
    throw InvalidInput("gamma = 0 is only supported with the uniform kernel");
}

struct Window {
  std::size_t lo;
  std::size_t hi; // inclusive
  bool clipped;
};

inline Window window_at(std::size_t t, std::size_t n, std::size_t T) {
  const std::size_t lo = t >= n ? t - n : 0;
  const std::size_t hi = std::min(T - 1, t + n);
  return {lo, hi, t < n || t + n > T - 1};
}

/// Inverts a symmetric PSD Gram matrix in place of `inv`.
///
/// Cholesky first; on failure a column-pivoted QR. Returns the condition
/// estimate, +inf for a zero matrix. The caller decides on singularity.
inline double invert_gram(const Eigen::MatrixXd& G, Eigen::MatrixXd& inv) {
  const Eigen::Index p = G.rows();
  if (p == 1) {
    const double g = G(0, 0);
    if (!(g > 0.0) || !std::isfinite(g)) return std::numeric_limits<double>::infinity();
    inv.resize(1, 1);
    inv(0, 0) = 1.0 / g;
    return 1.0;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() == Eigen::Success) {
    const double rc = llt.rcond();
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (cond <= kSingularCondition) inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
    return cond;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
  const auto& R = qr.matrixR();
  const double top = std::fabs(R(0, 0));
  const double bottom = std::fabs(R(p - 1, p - 1));
  if (top == 0.0 || bottom == 0.0) return std::numeric_limits<double>::infinity();
  const double cond = top / bottom;
  if (cond <= kSingularCondition) inv = qr.inverse();
  return cond;
}

//! Accumulates sum_i w_i x_i x_i' and sum_i w_i x_i y_i over [lo, hi], skipping [skip_lo, skip_hi].
inline std::size_t accumulate_normal_equations(const RowMatrix& X, const Eigen::VectorXd& y,
                                               const std::vector<double>& w, std::size_t t, Window win,
                                               std::ptrdiff_t skip_lo, std::ptrdiff_t skip_hi,
                                               Eigen::MatrixXd& G, Eigen::VectorXd& rhs) {
  const Eigen::Index p = X.cols();
  G.setZero(p, p);
  rhs.setZero(p);
  std::size_t used = 0;
  for (std::size_t i = win.lo; i <= win.hi; ++i) {
    const auto si = static_cast<std::ptrdiff_t>(i);
    if (si >= skip_lo && si <= skip_hi) continue;
    ++used;
    const double wi = w[i > t ? i - t : t - i];
    const double* xi = X.row(static_cast<Eigen::Index>(i)).data();
    const double wy = wi * y[static_cast<Eigen::Index>(i)];
    for (Eigen::Index a = 0; a < p; ++a) {
      const double wxa = wi * xi[a];
      rhs[a] += xi[a] * wy;
      for (Eigen::Index b = 0; b <= a; ++b) G(a, b) += wxa * xi[b];
    }
  }
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = a + 1; b < p; ++b) G(a, b) = G(b, a);
  return used;
}

inline Eigen::VectorXd solve_at(const RowMatrix& X, const Eigen::VectorXd& y, const std::vector<double>& w,
                                std::size_t t, Window win, std::ptrdiff_t skip_lo, std::ptrdiff_t skip_hi) {
  Eigen::MatrixXd G, inv;
  Eigen::VectorXd rhs;
  const std::size_t used = accumulate_normal_equations(X, y, w, t, win, skip_lo, skip_hi, G, rhs);
  if (used == 0) throw EmptyWindow(t);
  const double cond = invert_gram(G, inv);
  if (!(cond <= kSingularCondition)) throw SingularGram(t, cond);
  return inv * rhs;
}

} // namespace detail

/// Local constant (Nadaraya-Watson) estimate of beta at time t.
///
/// Solves sum_i K((t-i)/Th) x_i (y_i - x_i' b) = 0 over the window
/// [t - floor(Th), t + floor(Th)] clipped to the sample.
inline Eigen::VectorXd local_constant_estimate(const TimeSeriesData& data, std::size_t t, const Bandwidth& bw,
                                               Kernel kernel) {
  detail::check_bandwidth(bw, kernel, data.T());
  if (t >= data.T()) throw InvalidInput("time index out of range");
  const auto w = detail::offset_weights(bw, kernel);
  return detail::solve_at(data.X(), data.y(), w, t, detail::window_at(t, bw.half_window(), data.T()), 1, 0);
}

/// Leave-(2m+1)-out estimate: observations s in [t-m, t+m] get zero weight.
inline Eigen::VectorXd leave_out_estimate(const TimeSeriesData& data, std::size_t t, const Bandwidth& bw,
                                          Kernel kernel, std::size_t m) {
  detail::check_bandwidth(bw, kernel, data.T());
  if (t >= data.T()) throw InvalidInput("time index out of range");
  const auto w = detail::offset_weights(bw, kernel);
  const auto st = static_cast<std::ptrdiff_t>(t);
  const auto sm = static_cast<std::ptrdiff_t>(m);
  return detail::solve_at(data.X(), data.y(), w, t, detail::window_at(t, bw.half_window(), data.T()), st - sm,
                          st + sm);
}

struct GramConditionReport {
  std::vector<double> condition; ///< lambda_max / lambda_min, +inf when singular or zero
  std::vector<bool> singular;
  std::size_t singular_count() const { return static_cast<std::size_t>(std::count(singular.begin(), singular.end(), true)); }
};

//! Eigenvalue-ratio condition numbers of the weighted Gram matrix at every t.
inline GramConditionReport gram_condition_report(const TimeSeriesData& data, const Bandwidth& bw, Kernel kernel) {
  detail::check_bandwidth(bw, kernel, data.T());
  const auto w = detail::offset_weights(bw, kernel);
  GramConditionReport rep;
  rep.condition.resize(data.T());
  rep.singular.resize(data.T());
  Eigen::MatrixXd G;
  Eigen::VectorXd rhs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (std::size_t t = 0; t < data.T(); ++t) {
    detail::accumulate_normal_equations(data.X(), data.y(), w, t, detail::window_at(t, bw.half_window(), data.T()),
                                        1, 0, G, rhs);
    eig.compute(G, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    double cond = std::numeric_limits<double>::infinity();
    if (lmax > 0.0 && lmin > 0.0) cond = lmax / lmin;
    rep.condition[t] = cond;
    rep.singular[t] = !(cond <= kSingularCondition);
  }
  return rep;
}

/// Kernel smoother for a fixed design X and bandwidth.
///
/// Inverse Gram matrices depend only on X, so they are computed once and
/// reused for every response vector (bootstrap draws, Monte Carlo refits).
class PathSmoother {
public:
  PathSmoother(const RowMatrix& X, const Bandwidth& bw, Kernel kernel)
    : X_(X), bw_(bw), kernel_(kernel), T_(static_cast<std::size_t>(X.rows())), p_(static_cast<std::size_t>(X.cols())) {
    detail::check_bandwidth(bw, kernel, T_);
    w_ = detail::offset_weights(bw, kernel);
    w2_.resize(w_.size());
    for (std::size_t d = 0; d < w_.size(); ++d) w2_[d] = w_[d] * w_[d];
    windows_.reserve(T_);
    inv_.resize(T_ * p_ * p_);
    Eigen::MatrixXd G, inv;
    Eigen::VectorXd rhs;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(T_));
    for (std::size_t t = 0; t < T_; ++t) {
      const auto win = detail::window_at(t, bw.half_window(), T_);
      windows_.push_back(win);
      detail::accumulate_normal_equations(X_, zero, w_, t, win, 1, 0, G, rhs);
      const double cond = detail::invert_gram(G, inv);
      if (!(cond <= kSingularCondition)) throw SingularGram(t, cond);
      for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = 0; b < p_; ++b)
          inv_[(t * p_ + a) * p_ + b] = inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }

  std::size_t T() const noexcept { return T_; }
  std::size_t p() const noexcept { return p_; }
  const Bandwidth& bandwidth() const noexcept { return bw_; }
  Kernel kernel() const noexcept { return kernel_; }
  bool boundary(std::size_t t) const { return windows_[t].clipped; }

  //! beta_hat_t for every t.
  void fit(const Eigen::VectorXd& y, RowMatrix& beta) const {
    beta.resize(static_cast<Eigen::Index>(T_), static_cast<Eigen::Index>(p_));
    std::vector<double> rhs(p_);
    for (std::size_t t = 0; t < T_; ++t) {
      std::fill(rhs.begin(), rhs.end(), 0.0);
      const auto win = windows_[t];
      for (std::size_t i = win.lo; i <= win.hi; ++i) {
        const double wy = w_[i > t ? i - t : t - i] * y[static_cast<Eigen::Index>(i)];
        const double* xi = X_.row(static_cast<Eigen::Index>(i)).data();
        for (std::size_t a = 0; a < p_; ++a) rhs[a] += xi[a] * wy;
      }
      const double* inv = &inv_[t * p_ * p_];
      for (std::size_t a = 0; a < p_; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < p_; ++b) s += inv[a * p_ + b] * rhs[b];
        beta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a)) = s;
      }
    }
  }

  void residuals(const Eigen::VectorXd& y, const RowMatrix& beta, Eigen::VectorXd& out) const {
    out.resize(static_cast<Eigen::Index>(T_));
    for (std::size_t t = 0; t < T_; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      out[ti] = y[ti] - X_.row(ti).dot(beta.row(ti));
    }
  }

  //! Local sandwich covariance G_t^-1 S_t G_t^-1 with S_t = sum K^2 e_i^2 x_i x_i'.
  void sandwich(const Eigen::VectorXd& resid, std::vector<Eigen::MatrixXd>& cov) const {
    cov.resize(T_);
    std::vector<double> S(p_ * p_), tmp(p_ * p_);
    for (std::size_t t = 0; t < T_; ++t) {
      meat(t, resid, S);
      const double* inv = &inv_[t * p_ * p_];
      // tmp = inv * S
      for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = 0; b < p_; ++b) {
          double s = 0.0;
          for (std::size_t k = 0; k < p_; ++k) s += inv[a * p_ + k] * S[k * p_ + b];
          tmp[a * p_ + b] = s;
        }
      auto& C = cov[t];
      C.resize(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));
      for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          double s = 0.0;
          for (std::size_t k = 0; k < p_; ++k) s += tmp[a * p_ + k] * inv[k * p_ + b];
          C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
          C(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = s;
        }
    }
  }

  //! Diagonal of the local sandwich covariance only (T x p).
  void sandwich_variances(const Eigen::VectorXd& resid, RowMatrix& var) const {
    var.resize(static_cast<Eigen::Index>(T_), static_cast<Eigen::Index>(p_));
    std::vector<double> S(p_ * p_);
    for (std::size_t t = 0; t < T_; ++t) {
      meat(t, resid, S);
      const double* inv = &inv_[t * p_ * p_];
      for (std::size_t a = 0; a < p_; ++a) {
        double s = 0.0;
        for (std::size_t k = 0; k < p_; ++k)
          for (std::size_t l = 0; l < p_; ++l) s += inv[a * p_ + k] * S[k * p_ + l] * inv[l * p_ + a];
        var(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a)) = s;
      }
    }
  }

  /// Full-sample sandwich Omega^-1 Sigma Omega^-1 / (Th) with
  /// Omega = T^-1 sum x x' and Sigma = int K^2 * T^-1 sum e^2 x x'.
  Eigen::MatrixXd global_sandwich(const Eigen::VectorXd& resid) const {
    const auto p = static_cast<Eigen::Index>(p_);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t i = 0; i < T_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const Eigen::RowVectorXd xi = X_.row(ii);
      const Eigen::MatrixXd xx = xi.transpose() * xi;
      omega += xx;
      sigma += resid[ii] * resid[ii] * xx;
    }
    const double Td = static_cast<double>(T_);
    omega /= Td;
    sigma *= l2_norm_squared(kernel_) / Td;
    Eigen::MatrixXd inv;
    const double cond = detail::invert_gram(omega, inv);
    if (!(cond <= kSingularCondition)) throw SingularGram(0, cond);
    Eigen::MatrixXd V = inv * sigma * inv / bw_.scale();
    return 0.5 * (V + V.transpose());
  }

private:
  void meat(std::size_t t, const Eigen::VectorXd& resid, std::vector<double>& S) const {
    std::fill(S.begin(), S.end(), 0.0);
    const auto win = windows_[t];
    for (std::size_t i = win.lo; i <= win.hi; ++i) {
      const double e = resid[static_cast<Eigen::Index>(i)];
      const double we = w2_[i > t ? i - t : t - i] * e * e;
      const double* xi = X_.row(static_cast<Eigen::Index>(i)).data();
      for (std::size_t a = 0; a < p_; ++a) {
        const double wa = we * xi[a];
        for (std::size_t b = 0; b <= a; ++b) S[a * p_ + b] += wa * xi[b];
      }
    }
    for (std::size_t a = 0; a < p_; ++a)
      for (std::size_t b = a + 1; b < p_; ++b) S[a * p_ + b] = S[b * p_ + a];
  }

  RowMatrix X_;
  Bandwidth bw_;
  Kernel kernel_;
  std::size_t T_;
  std::size_t p_;
  std::vector<double> w_;
  std::vector<double> w2_;
  std::vector<detail::Window> windows_;
  std::vector<double> inv_;
};

/// Two-pass path estimate: beta_hat and residuals, then sandwich
/// covariances and pointwise normal confidence intervals at level 1 - q.
inline TvpEstimate estimate_path(const TimeSeriesData& data, const Bandwidth& bw, Kernel kernel,
                                 const EstimateOptions& opts = {}) {
  const double z = two_sided_critical(opts.q);
  PathSmoother smoother(data.X(), bw, kernel);
  TvpEstimate est;
  est.q = opts.q;
  smoother.fit(data.y(), est.beta_hat);
  smoother.residuals(data.y(), est.beta_hat, est.residuals);
  if (opts.variance == VarianceMode::Local) {
    smoother.sandwich(est.residuals, est.cov);
  } else {
    est.cov.assign(data.T(), smoother.global_sandwich(est.residuals));
  }
  const auto T = static_cast<Eigen::Index>(data.T());
  const auto p = static_cast<Eigen::Index>(data.p());
  est.ci_lower.resize(T, p);
  est.ci_upper.resize(T, p);
  est.boundary.resize(data.T());
  for (Eigen::Index t = 0; t < T; ++t) {
    est.boundary[static_cast<std::size_t>(t)] = smoother.boundary(static_cast<std::size_t>(t));
    for (Eigen::Index j = 0; j < p; ++j) {
      const double half = z * std::sqrt(std::max(0.0, est.cov[static_cast<std::size_t>(t)](j, j)));
      est.ci_lower(t, j) = est.beta_hat(t, j) - half;
      est.ci_upper(t, j) = est.beta_hat(t, j) + half;
    }
  }
  return est;
}

} // namespace tvpk
