#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "faultscout/morozov.hpp"

namespace faultscout {

/// Gaussian RBF least-squares fit of a univariate graph with a penalty on the
/// second derivative. Centers sit at the data abscissae; a linear tail keeps
/// straight data exactly representable, so the penalty can drive the
/// curvature of the model to zero.
class RbfCurveModel {
 public:
  static RbfCurveModel fit(std::span<const double> s, std::span<const double> v, double eps_b,
                           double shape_scale = 0.5, int morozov_iter = 60) {
    const int n = static_cast<int>(s.size());
    if (n < 3) throw std::invalid_argument("rbf_fit: need at least 3 points");
    if (v.size() != s.size()) throw std::invalid_argument("rbf_fit: size mismatch");

    double lo = s[0], hi = s[0];
    for (double x : s) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi - lo <= 0) throw std::invalid_argument("rbf_fit: abscissae must be distinct");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (s[i] == s[j]) throw std::invalid_argument("rbf_fit: duplicate abscissae");

    RbfCurveModel model;
    model.centers_.assign(s.begin(), s.end());
    model.shape_ = shape_scale * (n - 1) / (hi - lo);  // inverse mean spacing

    // penalty sites: data abscissae plus midpoints, so curvature hiding
    // between the samples is charged as well
    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> pen(sorted);
    for (int i = 0; i + 1 < n; ++i) pen.push_back(0.5 * (sorted[i] + sorted[i + 1]));

    // columns: n RBF coefficients, then constant and linear tail
    Eigen::MatrixXd a(n, n + 2);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<int>(pen.size()), n + 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) a(i, k) = model.basis(s[i], k);
      a(i, n) = 1.0;
      a(i, n + 1) = s[i];
      y[i] = v[i];
    }
    for (int i = 0; i < static_cast<int>(pen.size()); ++i)
      for (int k = 0; k < n; ++k) b(i, k) = model.basis_second(pen[i], k);
    auto res = detail::morozov_fit(a, y, b, eps_b, morozov_iter);
    model.coeffs_ = res.coeffs;
    model.lambda_ = res.lambda;
    model.max_residual_ = res.max_residual;
    return model;
  }

  double value(double s) const {
    double r = coeffs_[n_centers()] + coeffs_[n_centers() + 1] * s;
    for (int k = 0; k < n_centers(); ++k) r += coeffs_[k] * basis(s, k);
    return r;
  }

  double deriv(double s) const {
    double r = coeffs_[n_centers() + 1];
    for (int k = 0; k < n_centers(); ++k) r += coeffs_[k] * basis_first(s, k);
    return r;
  }

  double second(double s) const {
    double r = 0.0;
    for (int k = 0; k < n_centers(); ++k) r += coeffs_[k] * basis_second(s, k);
    return r;
  }

  /// Curvature of the graph (s, value(s)).
  double curvature(double s) const {
    const double d1 = deriv(s);
    return std::abs(second(s)) / std::pow(1.0 + d1 * d1, 1.5);
  }

  double lambda() const { return lambda_; }
  double max_residual() const { return max_residual_; }

 private:
  int n_centers() const { return static_cast<int>(centers_.size()); }

  double basis(double s, int k) const {
    const double t = shape_ * (s - centers_[k]);
    return std::exp(-t * t);
  }
  double basis_first(double s, int k) const {
    const double d = s - centers_[k];
    return -2.0 * shape_ * shape_ * d * basis(s, k);
  }
  double basis_second(double s, int k) const {
    const double d = s - centers_[k];
    const double e2 = shape_ * shape_;
    return (-2.0 * e2 + 4.0 * e2 * e2 * d * d) * basis(s, k);
  }

  std::vector<double> centers_;
  double shape_ = 1.0;
  Eigen::VectorXd coeffs_;
  double lambda_ = 0.0;
  double max_residual_ = 0.0;
};

/// Two-variable counterpart used for local surface patches: Gaussian RBFs at
/// the data sites plus an affine tail, second derivatives penalized.
class RbfSurfaceModel {
 public:
  static RbfSurfaceModel fit(std::span<const Eigen::Vector2d> uv, std::span<const double> w,
                             double eps_b, double shape_scale = 0.5, int morozov_iter = 60) {
    const int n = static_cast<int>(uv.size());
    if (n < 3) throw std::invalid_argument("surface rbf: need at least 3 points");
    if (w.size() != uv.size()) throw std::invalid_argument("surface rbf: size mismatch");

    RbfSurfaceModel model;
    model.centers_.assign(uv.begin(), uv.end());

    // mean nearest-neighbour spacing sets the shape parameter
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (j != i) best = std::min(best, (uv[i] - uv[j]).norm());
      acc += best;
    }
    const double spacing = acc / n;
    if (!(spacing > 0)) throw std::invalid_argument("surface rbf: duplicate sites");
    model.shape_ = shape_scale / spacing;

    Eigen::MatrixXd a(n, n + 3);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3 * n, n + 3);
    Eigen::VectorXd y(n);
    const double sqrt2 = std::numbers::sqrt2;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        a(i, k) = model.basis(uv[i], k);
        const auto h = model.basis_hessian(uv[i], k);
        b(3 * i + 0, k) = h[0];          // g_uu
        b(3 * i + 1, k) = sqrt2 * h[1];  // g_uv
        b(3 * i + 2, k) = h[2];          // g_vv
      }
      a(i, n) = 1.0;
      a(i, n + 1) = uv[i][0];
      a(i, n + 2) = uv[i][1];
      y[i] = w[i];
    }
    auto res = detail::morozov_fit(a, y, b, eps_b, morozov_iter);
    model.coeffs_ = res.coeffs;
    model.lambda_ = res.lambda;
    model.max_residual_ = res.max_residual;
    return model;
  }

  double value(const Eigen::Vector2d& p) const {
    const int n = n_centers();
    double r = coeffs_[n] + coeffs_[n + 1] * p[0] + coeffs_[n + 2] * p[1];
    for (int k = 0; k < n; ++k) r += coeffs_[k] * basis(p, k);
    return r;
  }

  Eigen::Matrix2d hessian(const Eigen::Vector2d& p) const {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (int k = 0; k < n_centers(); ++k) {
      const auto hk = basis_hessian(p, k);
      h(0, 0) += coeffs_[k] * hk[0];
      h(0, 1) += coeffs_[k] * hk[1];
      h(1, 1) += coeffs_[k] * hk[2];
    }
    h(1, 0) = h(0, 1);
    return h;
  }

  /// Spectral norm of the Hessian: the largest absolute second directional
  /// derivative.
  double hessian_norm(const Eigen::Vector2d& p) const {
    const Eigen::Matrix2d h = hessian(p);
    const double tr = 0.5 * (h(0, 0) + h(1, 1));
    const double det = std::sqrt(0.25 * (h(0, 0) - h(1, 1)) * (h(0, 0) - h(1, 1)) +
                                 h(0, 1) * h(0, 1));
    return std::max(std::abs(tr + det), std::abs(tr - det));
  }

  double max_residual() const { return max_residual_; }

 private:
  int n_centers() const { return static_cast<int>(centers_.size()); }

  double basis(const Eigen::Vector2d& p, int k) const {
    const double r2 = (p - centers_[k]).squaredNorm();
    return std::exp(-shape_ * shape_ * r2);
  }
  // returns {g_uu, g_uv, g_vv}
  std::array<double, 3> basis_hessian(const Eigen::Vector2d& p, int k) const {
    const Eigen::Vector2d d = p - centers_[k];
    const double e2 = shape_ * shape_;
    const double phi = std::exp(-e2 * d.squaredNorm());
    return {(-2.0 * e2 + 4.0 * e2 * e2 * d[0] * d[0]) * phi,
            4.0 * e2 * e2 * d[0] * d[1] * phi,
            (-2.0 * e2 + 4.0 * e2 * e2 * d[1] * d[1]) * phi};
  }

  std::vector<Eigen::Vector2d> centers_;
  double shape_ = 1.0;
  Eigen::VectorXd coeffs_;
  double lambda_ = 0.0;
  double max_residual_ = 0.0;
};

}  // namespace faultscout
