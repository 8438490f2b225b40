#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

/// Orthonormal local frame of a fitted line (2D) or plane (3D). Tangent
/// columns are ordered by decreasing variance of the input, so the first
/// local coordinate spans the elongated direction of the point set.
template <int Dim>
struct PlaneFrame {
  Vec<Dim> origin = Vec<Dim>::Zero();
  Eigen::Matrix<double, Dim, Dim - 1> tangent;
  Vec<Dim> normal = Vec<Dim>::Zero();

  Eigen::Matrix<double, Dim - 1, 1> local(const Vec<Dim>& p) const {
    return tangent.transpose() * (p - origin);
  }
  double height(const Vec<Dim>& p) const { return normal.dot(p - origin); }
  Vec<Dim> from_local(const Eigen::Matrix<double, Dim - 1, 1>& uv, double h = 0.0) const {
    return origin + tangent * uv + h * normal;
  }
};

namespace detail {

template <int Dim>
void canonical_sign(Eigen::Matrix<double, Dim, 1>& v) {
  int arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0) v = -v;
}

}  // namespace detail

/// Total-least-squares line (2D) or plane (3D) through a point set: origin is
/// the centroid, the normal the least-variance direction of the centered
/// covariance. Throws on coincident or (in 3D) collinear input.
template <int Dim>
PlaneFrame<Dim> fit_plane(std::span<const Vec<Dim>> points) {
  const int n = static_cast<int>(points.size());
  if (n < Dim) throw std::invalid_argument("fit_plane: not enough points");

  Vec<Dim> centroid = Vec<Dim>::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);

  Eigen::Matrix<double, Dim, Dim> cov = Eigen::Matrix<double, Dim, Dim>::Zero();
  for (const auto& p : points) {
    const Vec<Dim> d = p - centroid;
    cov += d * d.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_plane: eigensolver failed");
  const auto& evals = eig.eigenvalues();  // ascending
  const double scale = std::max(evals[Dim - 1], 0.0);
  if (scale <= 0.0) throw std::invalid_argument("fit_plane: points coincide");
  if (Dim == 3 && evals[1] <= 1e-24 * scale)
    throw std::invalid_argument("fit_plane: points are collinear");

  PlaneFrame<Dim> frame;
  frame.origin = centroid;
  for (int k = 0; k < Dim - 1; ++k) {
    Vec<Dim> t = eig.eigenvectors().col(Dim - 1 - k);
    detail::canonical_sign<Dim>(t);
    frame.tangent.col(k) = t;
  }
  Vec<Dim> nrm = eig.eigenvectors().col(0);
  detail::canonical_sign<Dim>(nrm);
  frame.normal = nrm;
  return frame;
}

template <int Dim>
PlaneFrame<Dim> fit_plane(const std::vector<Vec<Dim>>& points) {
  return fit_plane(std::span<const Vec<Dim>>(points.data(), points.size()));
}

}  // namespace faultscout
