#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace faultscout {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

/// Pipeline stage that created a point or triplet. Used for evaluation
/// accounting and for provenance tags in exported point clouds.
enum class Phase : int { InitialSet = 0, IniApprox = 1, Fill = 2, Expand = 3, Adapt = 4 };

inline constexpr int kPhaseCount = 5;

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::InitialSet: return "initialset";
    case Phase::IniApprox: return "iniapprox";
    case Phase::Fill: return "fill";
    case Phase::Expand: return "expand";
    case Phase::Adapt: return "adapt";
  }
  return "?";
}

/// Axis-aligned box domain.
template <int Dim>
struct BoxDomain {
  Vec<Dim> lower;
  Vec<Dim> upper;

  BoxDomain() : lower(Vec<Dim>::Zero()), upper(Vec<Dim>::Ones()) {}
  BoxDomain(const Vec<Dim>& lo, const Vec<Dim>& hi) : lower(lo), upper(hi) {
    for (int d = 0; d < Dim; ++d) {
      if (!(lower[d] < upper[d]))
        throw std::invalid_argument("BoxDomain: lower must be below upper componentwise");
    }
  }

  bool contains(const Vec<Dim>& p) const {
    for (int d = 0; d < Dim; ++d) {
      if (!(p[d] >= lower[d] && p[d] <= upper[d])) return false;
    }
    return true;
  }

  /// Distance to the nearest boundary facet (0 on the boundary).
  double boundary_distance(const Vec<Dim>& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (int d = 0; d < Dim; ++d) {
      best = std::min(best, std::min(p[d] - lower[d], upper[d] - p[d]));
    }
    return best;
  }

  Vec<Dim> extent() const { return upper - lower; }
  double diameter() const { return extent().norm(); }
};

template <int Dim>
struct LabeledPoint {
  Vec<Dim> point;
  int label = 0;
};

/// One interface sample: a point on each side of the fault plus their
/// midpoint, which is guaranteed to lie within eps_b of the true interface.
template <int Dim>
struct Triplet {
  Vec<Dim> point_i;  // inside class_i
  Vec<Dim> point_j;  // inside class_j
  int class_i = 0;
  int class_j = 0;
  Phase origin = Phase::InitialSet;

  Vec<Dim> mid() const { return 0.5 * (point_i + point_j); }
  double straddle() const { return (point_i - point_j).norm(); }
};

/// Builds a triplet from two labeled points, normalising the class order so
/// that class_i < class_j.
template <int Dim>
Triplet<Dim> make_triplet(const LabeledPoint<Dim>& a, const LabeledPoint<Dim>& b, double eps_b,
                          Phase origin = Phase::InitialSet) {
  if (a.label == b.label)
    throw std::invalid_argument("make_triplet: points share one class");
  const double dist = (a.point - b.point).norm();
  if (dist > 2.0 * eps_b * (1.0 + 1e-12))
    throw std::invalid_argument("make_triplet: straddle distance exceeds 2*eps_b (" +
                                std::to_string(dist) + ")");
  Triplet<Dim> t;
  if (a.label < b.label) {
    t.point_i = a.point;
    t.point_j = b.point;
    t.class_i = a.label;
    t.class_j = b.label;
  } else {
    t.point_i = b.point;
    t.point_j = a.point;
    t.class_i = b.label;
    t.class_j = a.label;
  }
  t.origin = origin;
  return t;
}

using FaultKey = std::pair<int, int>;

/// Ordered collection of triplets approximating one interface between the
/// classes (class_i, class_j). Component breaks mark the starts of the second
/// and later connected components.
template <int Dim>
struct FaultSet {
  int class_i = 0;
  int class_j = 0;
  std::vector<Triplet<Dim>> triplets;
  std::vector<std::size_t> component_breaks;  // indices where components 2..k start
  std::vector<bool> component_closed;         // one flag per component
  bool sorted = false;

  FaultKey key() const { return {class_i, class_j}; }
  std::size_t size() const { return triplets.size(); }

  std::size_t component_count() const { return triplets.empty() ? 0 : component_breaks.size() + 1; }

  std::size_t component_begin(std::size_t c) const {
    return c == 0 ? 0 : component_breaks[c - 1];
  }
  std::size_t component_end(std::size_t c) const {
    return c + 1 < component_count() ? component_breaks[c] : triplets.size();
  }

  bool closed(std::size_t c) const {
    return c < component_closed.size() ? static_cast<bool>(component_closed[c]) : false;
  }

  void reset_components() {
    component_breaks.clear();
    component_closed.assign(triplets.empty() ? 0 : 1, false);
  }
};

template <int Dim>
using FaultMap = std::map<FaultKey, FaultSet<Dim>>;

/// All tolerances and counts steering the approximation. Values without an
/// entry in the configuration file fall back to these defaults.
struct Params {
  double eps_b = 1e-3;        // bisection tolerance: midpoint-to-interface bound
  double eps_gap = 0.05;      // maximal admissible spacing of neighbouring triplets
  double eps_err = 1e-3;      // refinement threshold on estimated deviation
  double eps_coarse = 1e-4;   // coarsening threshold (2D only)
  double eps_safemin = 0.95;  // lower safety factor for offset width
  double eps_safemax = 0.25;  // upper safety factor for offset width
  double eps_cluster = 0.01;  // thinning radius after the initial approximation

  int k_near = 10;   // neighbourhood size for enrichment and local patches
  int k_sort = 5;    // candidate neighbours considered while chaining
  int k_extra = 4;   // points used for extrapolation
  int k_rep = 3;     // reflection rounds when searching a valid starting pair
  int k_adap = 4;    // adaptive refinement sweeps

  double beta_angle = std::acos(-0.9);              // chain acceptance angle
  double beta_growth = 2.0;                         // step growth cap (x average spacing)
  double alpha_expand = std::numbers::pi / 4.0;     // partner search cone (3D expansion)
  double alpha_expbound = std::numbers::pi / 4.0;   // facet alignment threshold (3D)

  // plumbing knobs
  double rbf_shape_scale = 0.5;        // shape parameter = scale / mean spacing
  int morozov_max_iter = 60;           // bisection steps on log(lambda)
  double min_triangle_angle_deg = 10;  // anisotropy filter for patch triangles
  double gap_edge_fraction = 0.05;     // extremality band for gap detection (3D)
  int max_fill_passes = 50;

  void validate() const {
    if (!(eps_b > 0 && eps_gap > 0 && eps_err > 0 && eps_coarse > 0))
      throw std::invalid_argument("Params: tolerances must be positive");
    if (!(eps_coarse < eps_err))
      throw std::invalid_argument("Params: eps_coarse must be below eps_err");
    if (!(eps_b < eps_gap))
      throw std::invalid_argument("Params: eps_b must be well below eps_gap");
    if (!(eps_safemax < 1.0 && eps_safemax > 0 && eps_safemin > 0))
      throw std::invalid_argument("Params: safety factors out of range");
    if (k_near < 1 || k_sort < 1 || k_extra < 2 || k_rep < 1 || k_adap < 0)
      throw std::invalid_argument("Params: counts out of range");
    if (!(eps_cluster > 0))
      throw std::invalid_argument("Params: eps_cluster must be positive");
  }
};

inline double angle_between(const Vec2& a, const Vec2& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

inline double angle_between(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

/// 90 degree rotation, used for offsets perpendicular to a 2D direction.
inline Vec2 perpendicular(const Vec2& v) { return Vec2(-v[1], v[0]); }

/// Distance from p to the segment [a, b]; optionally reports the closest
/// point and its chord parameter in [0, 1].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                                     Vec2* closest = nullptr, double* param = nullptr) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  if (closest) *closest = q;
  if (param) *param = t;
  return (p - q).norm();
}

}  // namespace faultscout
