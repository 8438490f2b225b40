#pragma once

#include "faultscout/classifier.hpp"
#include "faultscout/geometry.hpp"

namespace faultscout {

/// Classification environment in the native domain.
template <int Dim>
struct DirectEnv {
  static constexpr int dim = Dim;
  using Point = Vec<Dim>;

  ClassifierHandle<Dim>* handle = nullptr;

  int classify(const Point& p, Phase phase) const { return handle->evaluate(p, phase); }
  bool inside(const Point& p) const { return handle->domain().contains(p); }
  double boundary_distance(const Point& p) const {
    return handle->domain().boundary_distance(p);
  }
};

/// 2D classification environment living on a plane inside a 3D domain. Used
/// to run the curve algorithms on planar slices; the plane frame must be
/// orthonormal so distances carry over unchanged.
struct PlaneSliceEnv {
  static constexpr int dim = 2;
  using Point = Vec2;

  ClassifierHandle<3>* handle = nullptr;
  Vec3 origin = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();

  Vec3 embed(const Point& p) const { return origin + p[0] * u_axis + p[1] * v_axis; }

  int classify(const Point& p, Phase phase) const { return handle->evaluate(embed(p), phase); }
  bool inside(const Point& p) const { return handle->domain().contains(embed(p)); }
  double boundary_distance(const Point& p) const {
    return handle->domain().boundary_distance(embed(p));
  }
};

/// Like PlaneSliceEnv, but restricted to a rectangle in plane coordinates
/// (a facet of the 3D box). Boundary queries refer to the facet edges.
struct FacetEnv {
  static constexpr int dim = 2;
  using Point = Vec2;

  ClassifierHandle<3>* handle = nullptr;
  Vec3 origin = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  BoxDomain<2> rect;

  Vec3 embed(const Point& p) const { return origin + p[0] * u_axis + p[1] * v_axis; }
  Point project(const Vec3& q) const {
    return Point(u_axis.dot(q - origin), v_axis.dot(q - origin));
  }

  int classify(const Point& p, Phase phase) const { return handle->evaluate(embed(p), phase); }
  bool inside(const Point& p) const { return rect.contains(p); }
  double boundary_distance(const Point& p) const { return rect.boundary_distance(p); }
};

}  // namespace faultscout
