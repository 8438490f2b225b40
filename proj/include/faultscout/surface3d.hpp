#pragma once

#include <array>
#include <vector>

#include "faultscout/delaunay.hpp"
#include "faultscout/knn.hpp"
#include "faultscout/plane_fit.hpp"
#include "faultscout/rbf.hpp"

namespace faultscout {

/// Local neighbourhood of a triplet, flattened into the best-fit plane and
/// triangulated there. The first tangent spans the elongated direction of
/// the patch, which gap detection relies on.
struct LocalPatch {
  std::size_t center = 0;                     // index into the fault set
  std::vector<std::size_t> members;           // center first, then neighbours
  PlaneFrame<3> frame;
  std::vector<Vec2> local;                    // per member (u, v)
  std::vector<double> height;                 // per member, offset along the normal
  std::vector<std::array<int, 3>> triangles;  // indices into members/local
};

template <int Dim>
std::vector<Vec<Dim>> fault_mids(const FaultSet<Dim>& fs) {
  std::vector<Vec<Dim>> mids(fs.triplets.size());
  for (std::size_t i = 0; i < mids.size(); ++i) mids[i] = fs.triplets[i].mid();
  return mids;
}

/// Builds the local patch of the triplet at `center` from its k_near nearest
/// neighbours. Throws when the neighbourhood is degenerate (coincident or
/// collinear midpoints).
inline LocalPatch build_patch(const FaultSet<3>& fs, std::size_t center, int k_near) {
  const std::size_t n = fs.triplets.size();
  if (n < static_cast<std::size_t>(k_near) + 1)
    throw std::invalid_argument("build_patch: not enough triplets for the neighbourhood");

  LocalPatch patch;
  patch.center = center;
  const Vec3 cmid = fs.triplets[center].mid();
  auto nn = k_nearest<3>(
      static_cast<int>(n), [&](int i) { return fs.triplets[i].mid(); }, cmid, k_near,
      static_cast<int>(center));
  patch.members.push_back(center);
  for (int i : nn) patch.members.push_back(static_cast<std::size_t>(i));

  std::vector<Vec3> pts;
  pts.reserve(patch.members.size());
  for (auto idx : patch.members) pts.push_back(fs.triplets[idx].mid());
  patch.frame = fit_plane<3>(pts);  // throws on collinear input

  patch.local.reserve(pts.size());
  patch.height.reserve(pts.size());
  for (const auto& p : pts) {
    const auto uv = patch.frame.local(p);
    patch.local.emplace_back(uv[0], uv[1]);
    patch.height.push_back(patch.frame.height(p));
  }
  patch.triangles = delaunay2d(patch.local);
  return patch;
}

/// Penalized RBF graph model of the patch heights over the patch plane.
inline RbfSurfaceModel patch_surface_model(const LocalPatch& patch, double eps_b,
                                           const Params& params) {
  std::vector<Eigen::Vector2d> uv(patch.local.begin(), patch.local.end());
  return RbfSurfaceModel::fit(uv, patch.height, eps_b, params.rbf_shape_scale,
                              params.morozov_max_iter);
}

inline double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
  if (la == 0 || lb == 0 || lc == 0) return 0.0;
  auto angle = [](double opp, double s1, double s2) {
    return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
  };
  return std::min({angle(la, lb, lc), angle(lb, la, lc), angle(lc, la, lb)});
}

inline double triangle_max_edge(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::max({(b - c).norm(), (a - c).norm(), (a - b).norm()});
}

/// Interpolation error bound for a linear triangle: half the squared
/// circumradius, corrected by the circumcenter's distance to the triangle,
/// times the largest second-derivative magnitude of the surface model over
/// the vertices and the centroid.
template <class SurfaceModel>
double est_error_triangle(const Vec2& a, const Vec2& b, const Vec2& c,
                          const SurfaceModel& model) {
  const auto [center, radius] = circumcircle(a, b, c);
  if (!std::isfinite(radius))
    throw std::invalid_argument("est_error_triangle: degenerate triangle");

  // distance of the circumcenter to the closed triangle
  double d = 0.0;
  const auto side = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p)[0] * (r - p)[1] - (q - p)[1] * (r - p)[0];
  };
  const double s1 = side(a, b, center), s2 = side(b, c, center), s3 = side(c, a, center);
  const bool inside = (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
  if (!inside) {
    d = std::min({point_segment_distance(center, a, b), point_segment_distance(center, b, c),
                  point_segment_distance(center, c, a)});
  }

  const Vec2 centroid = (a + b + c) / 3.0;
  const double phi = std::max({model.hessian_norm(a), model.hessian_norm(b),
                               model.hessian_norm(c), model.hessian_norm(centroid)});
  return 0.5 * (radius * radius - d * d) * phi;
}

/// Unit normal of the interface at a triplet, oriented from the class_i side
/// towards the class_j side.
inline Vec3 estimate_normal(const FaultSet<3>& fs, std::size_t center, int k_near) {
  auto patch = build_patch(fs, center, k_near);
  Vec3 n = patch.frame.normal;
  const auto& t = fs.triplets[center];
  if (n.dot(t.point_j - t.point_i) < 0) n = -n;
  return n;
}

}  // namespace faultscout
