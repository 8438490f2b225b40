#pragma once

#include <limits>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

struct Polyline2 {
  std::vector<Vec2> vertices;
  bool closed = false;
};

/// Midpoint polylines of a sorted fault set, one per component. Closed
/// components yield closed polylines (the first vertex is not repeated).
inline std::vector<Polyline2> reconstruct_polyline(const FaultSet<2>& fs) {
  if (!fs.sorted) throw std::logic_error("reconstruct_polyline: fault set must be sorted");
  std::vector<Polyline2> out;
  for (std::size_t c = 0; c < fs.component_count(); ++c) {
    Polyline2 line;
    for (std::size_t k = fs.component_begin(c); k < fs.component_end(c); ++k)
      line.vertices.push_back(fs.triplets[k].mid());
    line.closed = fs.closed(c);
    out.push_back(std::move(line));
  }
  return out;
}

/// Everything needed to answer point-location queries without touching the
/// classifier again.
struct Reconstruction2 {
  FaultMap<2> faults;
  BoxDomain<2> domain;
  std::vector<int> dense_to_raw;  // empty: class ids are used as stored
};

/// Distance from a point to the nearest reconstructed polyline segment.
inline double distance_to_reconstruction(const Vec2& p, const Reconstruction2& rec) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [key, fs] : rec.faults) {
    for (std::size_t c = 0; c < fs.component_count(); ++c) {
      const std::size_t b = fs.component_begin(c), e = fs.component_end(c);
      const std::size_t m = e - b;
      if (m == 0) continue;
      const std::size_t segs = fs.closed(c) && m >= 3 ? m : m - 1;
      for (std::size_t l = 0; l < std::max<std::size_t>(segs, 1); ++l) {
        const Vec2 a = fs.triplets[b + l % m].mid();
        const Vec2 bb = fs.triplets[b + (l + 1) % m].mid();
        if (m == 1) {
          best = std::min(best, (p - a).norm());
          break;
        }
        best = std::min(best, point_segment_distance(p, a, bb, nullptr, nullptr));
      }
    }
  }
  return best;
}

/// Class of the region containing the point, read off the reconstruction:
/// the nearest interface segment decides, with the side disambiguated by the
/// straddle direction of the closest triplet. Points within eps_b of an
/// interface may come back with either adjacent class. Returns the
/// classifier's raw label when a class map is present.
inline int region_query(const Vec2& p, const Reconstruction2& rec) {
  if (!rec.domain.contains(p)) throw std::domain_error("region_query: point outside the domain");
  if (rec.faults.empty()) throw std::logic_error("region_query: empty reconstruction");

  double best = std::numeric_limits<double>::infinity();
  int side_class = 0;
  for (const auto& [key, fs] : rec.faults) {
    for (std::size_t c = 0; c < fs.component_count(); ++c) {
      const std::size_t b = fs.component_begin(c), e = fs.component_end(c);
      const std::size_t m = e - b;
      if (m == 0) continue;
      if (m == 1) {
        const auto& t = fs.triplets[b];
        const double d = (p - t.mid()).norm();
        if (d < best) {
          best = d;
          side_class = (p - t.mid()).dot(t.point_j - t.point_i) > 0 ? t.class_j : t.class_i;
        }
        continue;
      }
      const std::size_t segs = fs.closed(c) && m >= 3 ? m : m - 1;
      for (std::size_t l = 0; l < segs; ++l) {
        const auto& ta = fs.triplets[b + l % m];
        const auto& tb = fs.triplets[b + (l + 1) % m];
        Vec2 q;
        double t = 0.0;
        const double d = point_segment_distance(p, ta.mid(), tb.mid(), &q, &t);
        if (d >= best) continue;
        best = d;
        const auto& ref = t < 0.5 ? ta : tb;
        side_class =
            (p - q).dot(ref.point_j - ref.point_i) > 0 ? ref.class_j : ref.class_i;
      }
    }
  }
  if (side_class >= 1 && !rec.dense_to_raw.empty() &&
      side_class <= static_cast<int>(rec.dense_to_raw.size()))
    return rec.dense_to_raw[side_class - 1];
  return side_class;
}

}  // namespace faultscout
