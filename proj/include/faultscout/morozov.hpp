#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace faultscout::detail {

struct MorozovResult {
  Eigen::VectorXd coeffs;
  double lambda = 0.0;
  double max_residual = 0.0;
};

inline Eigen::VectorXd solve_penalized(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                       const Eigen::MatrixXd& b, double lambda, double ridge) {
  const int m = static_cast<int>(a.cols());
  Eigen::MatrixXd stacked(a.rows() + b.rows() + m, m);
  stacked.topRows(a.rows()) = a;
  stacked.middleRows(a.rows(), b.rows()) = std::sqrt(lambda) * b;
  stacked.bottomRows(m) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(stacked.rows());
  rhs.head(a.rows()) = y;
  return stacked.colPivHouseholderQr().solve(rhs);
}

/// Tikhonov fit min |a x - y|^2 + lambda |b x|^2 with the weight chosen by
/// bisection on log(lambda) so the maximal residual stays at the target
/// (Morozov's discrepancy principle). Picks the largest admissible lambda,
/// i.e. the smoothest model still reproducing the data within target.
inline MorozovResult morozov_fit(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                 const Eigen::MatrixXd& b, double target, int max_iter) {
  const double ridge = 1e-13 * std::max(1.0, a.squaredNorm() / a.cols());
  auto max_resid = [&](const Eigen::VectorXd& x) { return (a * x - y).cwiseAbs().maxCoeff(); };

  double lo_log = -14.0, hi_log = 6.0;
  Eigen::VectorXd x_hi = solve_penalized(a, y, b, std::pow(10.0, hi_log), ridge);
  if (max_resid(x_hi) <= target) {
    return {x_hi, std::pow(10.0, hi_log), max_resid(x_hi)};
  }
  Eigen::VectorXd x_lo = solve_penalized(a, y, b, std::pow(10.0, lo_log), ridge);
  if (max_resid(x_lo) > target) {
    // even the weakest regularization misses the target: ill conditioned
    // data, keep the smallest weight
    return {x_lo, std::pow(10.0, lo_log), max_resid(x_lo)};
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid_log = 0.5 * (lo_log + hi_log);
    Eigen::VectorXd x_mid = solve_penalized(a, y, b, std::pow(10.0, mid_log), ridge);
    if (max_resid(x_mid) <= target) {
      lo_log = mid_log;
      x_lo = std::move(x_mid);
    } else {
      hi_log = mid_log;
    }
  }
  return {x_lo, std::pow(10.0, lo_log), max_resid(x_lo)};
}

}  // namespace faultscout::detail
