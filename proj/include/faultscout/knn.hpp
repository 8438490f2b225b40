#pragma once

#include <algorithm>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

/// Indices of the k points nearest to the query, ties broken by index so the
/// result is deterministic. Linear scan: all call sites work on point sets
/// small enough that a spatial index would not pay off.
template <int Dim, class PointAccess>
std::vector<int> k_nearest(int count, const PointAccess& point_of, const Vec<Dim>& query, int k,
                           int exclude = -1) {
  std::vector<std::pair<double, int>> dist;
  dist.reserve(count);
  for (int i = 0; i < count; ++i) {
    if (i == exclude) continue;
    dist.emplace_back((point_of(i) - query).squaredNorm(), i);
  }
  const int take = std::min<int>(k, static_cast<int>(dist.size()));
  std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
  std::vector<int> out(take);
  for (int i = 0; i < take; ++i) out[i] = dist[i].second;
  return out;
}

}  // namespace faultscout
