#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace faultscout {

struct ComplexSvd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd singular_values;  // nonnegative, nonincreasing
  Eigen::MatrixXcd v;
};

/// Full SVD A = U diag(s) V* of a square complex matrix.
inline ComplexSvd complex_svd(const Eigen::MatrixXcd& a) {
  if (!a.allFinite()) throw std::invalid_argument("complex_svd: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace faultscout
