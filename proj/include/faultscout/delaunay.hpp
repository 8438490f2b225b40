#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

namespace detail {

inline long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b[0]) - a[0];
  const long double aby = static_cast<long double>(b[1]) - a[1];
  const long double acx = static_cast<long double>(c[0]) - a[0];
  const long double acy = static_cast<long double>(c[1]) - a[1];
  return abx * acy - aby * acx;
}

// positive if p lies strictly inside the circumcircle of the CCW triangle abc
inline long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double ax = static_cast<long double>(a[0]) - p[0];
  const long double ay = static_cast<long double>(a[1]) - p[1];
  const long double bx = static_cast<long double>(b[0]) - p[0];
  const long double by = static_cast<long double>(b[1]) - p[1];
  const long double cx = static_cast<long double>(c[0]) - p[0];
  const long double cy = static_cast<long double>(c[1]) - p[1];
  const long double a2 = ax * ax + ay * ay;
  const long double b2 = bx * bx + by * by;
  const long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

}  // namespace detail

/// Delaunay triangulation of a 2D point set by incremental insertion
/// (Bowyer-Watson). The bounding triangle is handled symbolically: its
/// vertices sit at infinity in three fixed directions, and circumcircle
/// tests against them degenerate to half-plane tests, so hull triangles
/// survive no matter how flat they are. Near-cocircular ties resolve in
/// favour of the triangle created first, which makes the result
/// deterministic for a fixed input order. Throws if all points are
/// collinear.
inline std::vector<std::array<int, 3>> delaunay2d(const std::vector<Vec2>& input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) throw std::invalid_argument("delaunay2d: need at least 3 points");

  // normalise into a unit-scale frame for predictable predicate magnitudes
  Vec2 lo = input[0], hi = input[0];
  for (const auto& p : input) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).maxCoeff(), 1e-300);
  const Vec2 center = 0.5 * (lo + hi);

  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = (input[i] - center) / scale;

  bool non_collinear = false;
  for (int i = 0; i < n && !non_collinear; ++i)
    for (int j = i + 1; j < n && !non_collinear; ++j)
      for (int k = j + 1; k < n; ++k)
        if (std::abs(static_cast<double>(detail::orient2d(pts[i], pts[j], pts[k]))) > 1e-14) {
          non_collinear = true;
          break;
        }
  if (!non_collinear) throw std::invalid_argument("delaunay2d: points are collinear");

  // directions of the three symbolic vertices; the offset angle keeps them
  // away from axis-aligned data edges
  std::array<Vec2, 3> inf_dir;
  for (int k = 0; k < 3; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 3.0 + 0.5672;
    inf_dir[k] = Vec2(std::cos(th), std::sin(th));
  }
  auto is_inf = [&](int v) { return v >= n; };

  struct Tri {
    std::array<int, 3> v;
    bool alive = true;
  };
  std::vector<Tri> tris;
  tris.push_back({{n, n + 1, n + 2}, true});

  constexpr long double kEps = 1e-20L;

  auto contains = [&](const Tri& t, const Vec2& p) -> bool {
    std::array<int, 3> real{}, inf{};
    int nr = 0, ni = 0;
    for (int v : t.v) (is_inf(v) ? inf[ni++] : real[nr++]) = v;
    if (nr == 3) {
      Vec2 a = pts[real[0]], b = pts[real[1]], c = pts[real[2]];
      if (detail::orient2d(a, b, c) < 0) std::swap(b, c);
      return detail::incircle(a, b, c, p) > kEps;
    }
    if (nr == 2) {
      // limit of the circumdisk through two real points and a vertex at
      // infinity: the open half-plane on the side of that direction
      const Vec2& a = pts[real[0]];
      const Vec2& b = pts[real[1]];
      const Vec2 d = inf_dir[inf[0] - n];
      const long double side_p = detail::orient2d(a, b, p);
      const long double side_s =
          static_cast<long double>((b - a)[0]) * d[1] - static_cast<long double>((b - a)[1]) * d[0];
      return (side_s > 0 ? side_p > kEps : side_p < -kEps);
    }
    if (nr == 1) {
      const Vec2& a = pts[real[0]];
      const Vec2 d = inf_dir[inf[0] - n] + inf_dir[inf[1] - n];
      return static_cast<long double>((p - a).dot(d)) > kEps;
    }
    return true;  // the initial all-symbolic triangle
  };

  for (int ip = 0; ip < n; ++ip) {
    const Vec2& p = pts[ip];
    std::vector<int> cavity;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (tris[t].alive && contains(tris[t], p)) cavity.push_back(t);
    }
    if (cavity.empty()) continue;  // duplicate point, nothing to add

    std::map<std::pair<int, int>, int> edge_count;
    for (int t : cavity) {
      for (int e = 0; e < 3; ++e) {
        int u = tris[t].v[e], w = tris[t].v[(e + 1) % 3];
        edge_count[{std::min(u, w), std::max(u, w)}]++;
      }
      tris[t].alive = false;
    }
    for (const auto& [edge, count] : edge_count) {
      if (count != 1) continue;  // interior edge of the cavity
      tris.push_back({{edge.first, edge.second, ip}, true});
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (is_inf(t.v[0]) || is_inf(t.v[1]) || is_inf(t.v[2])) continue;
    std::array<int, 3> v = t.v;
    // canonical form: smallest index first, counter-clockwise
    int mi = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
    std::rotate(v.begin(), v.begin() + mi, v.end());
    if (detail::orient2d(pts[v[0]], pts[v[1]], pts[v[2]]) < 0) std::swap(v[1], v[2]);
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Circumcircle of a 2D triangle: returns {center, radius}. Degenerate
/// triangles yield an infinite radius.
inline std::pair<Vec2, double> circumcircle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * (ab[0] * ac[1] - ab[1] * ac[0]);
  if (d == 0.0) return {Vec2(0, 0), std::numeric_limits<double>::infinity()};
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  const Vec2 rel((ac[1] * ab2 - ab[1] * ac2) / d, (ab[0] * ac2 - ac[0] * ab2) / d);
  return {a + rel, rel.norm()};
}

}  // namespace faultscout
