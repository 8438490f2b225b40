#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "faultscout/morozov.hpp"

namespace faultscout {

/// Least-squares polynomial with a second-derivative penalty, regularization
/// weight chosen by the discrepancy principle so the maximal residual is
/// approximately eps_b. Works internally on abscissae scaled to [-1, 1].
class RegularizedPolynomial {
 public:
  static RegularizedPolynomial fit(std::span<const double> s, std::span<const double> v,
                                   int degree, double eps_b, int morozov_iter = 60) {
    const int n = static_cast<int>(s.size());
    if (n < 2) throw std::invalid_argument("polyfit: need at least 2 points");
    if (v.size() != s.size()) throw std::invalid_argument("polyfit: size mismatch");
    if (degree != n - 1) throw std::invalid_argument("polyfit: degree must be n-1");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (s[i] == s[j]) throw std::invalid_argument("polyfit: duplicate abscissae");

    double lo = s[0], hi = s[0];
    for (double x : s) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }

    RegularizedPolynomial poly;
    poly.mid_ = 0.5 * (lo + hi);
    poly.half_ = 0.5 * (hi - lo);
    const int m = degree + 1;

    Eigen::MatrixXd a(n, m);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, m);
    Eigen::VectorXd y(n);
    const double h2 = poly.half_ * poly.half_;
    for (int i = 0; i < n; ++i) {
      const double t = (s[i] - poly.mid_) / poly.half_;
      double tp = 1.0;
      for (int j = 0; j < m; ++j) {
        a(i, j) = tp;
        if (j >= 2) b(i, j) = j * (j - 1) * std::pow(t, j - 2) / h2;
        tp *= t;
      }
      y[i] = v[i];
    }
    auto res = detail::morozov_fit(a, y, b, eps_b, morozov_iter);
    poly.coeffs_ = res.coeffs;
    poly.max_residual_ = res.max_residual;
    return poly;
  }

  double value(double s) const {
    const double t = (s - mid_) / half_;
    double r = 0.0;
    for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 0; --j) r = r * t + coeffs_[j];
    return r;
  }

  double deriv(double s) const {
    const double t = (s - mid_) / half_;
    double r = 0.0;
    for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 1; --j) r = r * t + j * coeffs_[j];
    return r / half_;
  }

  double second(double s) const {
    const double t = (s - mid_) / half_;
    double r = 0.0;
    for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 2; --j)
      r = r * t + j * (j - 1) * coeffs_[j];
    return r / (half_ * half_);
  }

  /// Coefficients of the polynomial in powers of the unscaled abscissa.
  std::vector<double> monomial_coefficients() const {
    const int m = static_cast<int>(coeffs_.size());
    // expand sum c_j ((s - mid)/half)^j by repeated multiplication
    std::vector<double> out(m, 0.0);
    std::vector<double> base{1.0};  // ((s - mid)/half)^j as monomials in s
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < static_cast<int>(base.size()); ++k) out[k] += coeffs_[j] * base[k];
      if (j + 1 < m) {
        std::vector<double> next(base.size() + 1, 0.0);
        for (int k = 0; k < static_cast<int>(base.size()); ++k) {
          next[k] += base[k] * (-mid_ / half_);
          next[k + 1] += base[k] / half_;
        }
        base = std::move(next);
      }
    }
    return out;
  }

  double max_residual() const { return max_residual_; }

 private:
  double mid_ = 0.0;
  double half_ = 1.0;
  Eigen::VectorXd coeffs_;
  double max_residual_ = 0.0;
};

}  // namespace faultscout
