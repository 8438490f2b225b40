#pragma once

#include <optional>
#include <unordered_set>
#include <vector>

#include "faultscout/env.hpp"
#include "faultscout/halton.hpp"
#include "faultscout/knn.hpp"

namespace faultscout {

template <int Dim>
struct BisectResult {
  std::optional<Triplet<Dim>> triplet;   // may belong to a different class pair
                                         // than requested if the fallback fired
  bool third_class = false;              // a midpoint landed in a third class
};

/// Repeated midpoint classification on the segment between two points of
/// different classes until the straddling pair is within 2 eps_b. If a
/// midpoint falls into a third class, one fallback bisection runs between
/// that midpoint and the first endpoint, now targeting the interface of
/// those two classes.
template <class Env>
BisectResult<Env::dim> bisect_segment(LabeledPoint<Env::dim> a, LabeledPoint<Env::dim> b,
                                      double eps_b, Env& env, Phase phase,
                                      bool allow_fallback = true) {
  constexpr int Dim = Env::dim;
  if (a.label == b.label) throw std::logic_error("bisect_segment: labels must differ");

  BisectResult<Dim> result;
  for (int it = 0; it < 200; ++it) {
    if ((a.point - b.point).norm() <= 2.0 * eps_b) {
      result.triplet = make_triplet(a, b, eps_b, phase);
      return result;
    }
    const Vec<Dim> mid = 0.5 * (a.point + b.point);
    if (mid == a.point || mid == b.point) break;  // floating point exhausted
    const int c = env.classify(mid, phase);
    if (c == a.label) {
      a.point = mid;
    } else if (c == b.label) {
      b.point = mid;
    } else {
      result.third_class = true;
      if (allow_fallback && c > 0) {
        auto retry = bisect_segment(a, LabeledPoint<Dim>{mid, c}, eps_b, env, phase,
                                    /*allow_fallback=*/false);
        result.triplet = retry.triplet;
      }
      return result;
    }
  }
  return result;
}

enum class PairStatus {
  Valid,      // one point in each target class
  Blocked,    // a probe hit a third class or left the domain
  Exhausted,  // still one-sided after k_rep reflections
};

template <int Dim>
struct StartPair {
  PairStatus status = PairStatus::Exhausted;
  LabeledPoint<Dim> first, second;  // defined when status == Valid
};

/// Turns a symmetric point pair around `center` into a valid starting pair
/// for the interface (class_i, class_j). If both points share one class,
/// probes are reflected across the center with doubling distances and
/// alternating sides, at most k_rep times.
template <class Env>
StartPair<Env::dim> start_pairs(const Vec<Env::dim>& plus, const Vec<Env::dim>& minus,
                                const Vec<Env::dim>& center, int class_i, int class_j, int k_rep,
                                Env& env, Phase phase) {
  constexpr int Dim = Env::dim;
  StartPair<Dim> out;
  const auto in_target = [&](int c) { return c == class_i || c == class_j; };

  if (!env.inside(plus) || !env.inside(minus)) {
    out.status = PairStatus::Blocked;
    return out;
  }
  const int cp = env.classify(plus, phase);
  const int cm = env.classify(minus, phase);
  if (!in_target(cp) || !in_target(cm)) {
    out.status = PairStatus::Blocked;
    return out;
  }
  if (cp != cm) {
    out.status = PairStatus::Valid;
    out.first = {plus, cp};
    out.second = {minus, cm};
    return out;
  }

  const int have = cp;
  const int want = (have == class_i) ? class_j : class_i;
  const Vec<Dim> offset = plus - center;
  if (offset.squaredNorm() == 0.0) throw std::invalid_argument("start_pairs: degenerate pair");

  std::vector<Vec<Dim>> same_side{plus, minus};
  double factor = 2.0;
  double side = -1.0;  // round 1 reflects the plus point beyond the minus side
  for (int round = 0; round < k_rep; ++round) {
    const Vec<Dim> probe = center + side * factor * offset;
    if (!env.inside(probe)) {
      out.status = PairStatus::Blocked;
      return out;
    }
    const int c = env.classify(probe, phase);
    if (c == want) {
      // pair the probe with the nearest point known to sit in the other class
      const Vec<Dim>* best = &same_side.front();
      for (const auto& q : same_side) {
        if ((q - probe).squaredNorm() < (*best - probe).squaredNorm()) best = &q;
      }
      out.status = PairStatus::Valid;
      out.first = {probe, c};
      out.second = {*best, have};
      return out;
    }
    if (!in_target(c)) {
      out.status = PairStatus::Blocked;
      return out;
    }
    same_side.push_back(probe);
    factor *= 2.0;
    side = -side;
  }
  out.status = PairStatus::Exhausted;
  return out;
}

/// Enrichment step: for every point whose k_near-neighbourhood mixes classes,
/// emits the midpoints of the per-class barycentres of that neighbourhood,
/// deduplicated and classified.
template <int Dim>
std::vector<LabeledPoint<Dim>> barycenter_means(const std::vector<LabeledPoint<Dim>>& points,
                                                int k_near, ClassifierHandle<Dim>& h,
                                                Phase phase = Phase::InitialSet) {
  std::vector<LabeledPoint<Dim>> result;
  if (points.empty()) return result;

  std::unordered_set<detail::PointKey<Dim>, detail::PointKeyHash<Dim>> seen;
  const auto point_of = [&](int i) -> const Vec<Dim>& { return points[i].point; };
  const int n = static_cast<int>(points.size());

  for (int idx = 0; idx < n; ++idx) {
    // the neighbourhood includes the point itself
    auto nn = k_nearest<Dim>(n, point_of, points[idx].point, std::min(k_near, n));

    std::map<int, std::pair<Vec<Dim>, int>> groups;  // label -> (sum, count)
    for (int j : nn) {
      if (points[j].label <= 0) continue;  // outside sentinel takes no part
      auto [it, fresh] = groups.try_emplace(points[j].label, Vec<Dim>::Zero(), 0);
      it->second.first += points[j].point;
      it->second.second += 1;
    }
    if (groups.size() < 2) continue;

    std::vector<Vec<Dim>> centres;
    centres.reserve(groups.size());
    for (const auto& [label, acc] : groups)
      centres.push_back(acc.first / static_cast<double>(acc.second));

    for (std::size_t aI = 0; aI < centres.size(); ++aI) {
      for (std::size_t bI = aI + 1; bI < centres.size(); ++bI) {
        const Vec<Dim> mean = 0.5 * (centres[aI] + centres[bI]);
        if (!seen.insert(detail::point_key<Dim>(mean)).second) continue;
        result.push_back({mean, h.evaluate(mean, phase)});
      }
    }
  }
  return result;
}

/// Pairs every enriched point with the nearest point of each higher class
/// and bisects the connecting segments, collecting the resulting triplets
/// per class pair. Failed bisections are dropped after the fallback.
template <int Dim>
FaultMap<Dim> initial_approximations(const std::vector<LabeledPoint<Dim>>& base,
                                     const std::vector<LabeledPoint<Dim>>& enriched,
                                     double eps_b, ClassifierHandle<Dim>& h) {
  std::vector<LabeledPoint<Dim>> all(base);
  all.insert(all.end(), enriched.begin(), enriched.end());
  int max_label = 0;
  for (const auto& p : all) max_label = std::max(max_label, p.label);

  DirectEnv<Dim> env{&h};
  FaultMap<Dim> map;
  for (const auto& x : enriched) {
    if (x.label <= 0) continue;
    for (int target = x.label + 1; target <= max_label; ++target) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < static_cast<int>(all.size()); ++j) {
        if (all[j].label != target) continue;
        const double d = (all[j].point - x.point).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best < 0) continue;
      auto res = bisect_segment(x, all[best], eps_b, env, Phase::IniApprox);
      if (!res.triplet) continue;
      const auto& t = *res.triplet;
      auto [it, fresh] = map.try_emplace(FaultKey{t.class_i, t.class_j});
      if (fresh) {
        it->second.class_i = t.class_i;
        it->second.class_j = t.class_j;
      }
      it->second.triplets.push_back(t);
    }
  }
  for (auto& [key, fs] : map) fs.reset_components();
  return map;
}

/// Greedy thinning: keeps a triplet iff its midpoint stays at least
/// eps_cluster away from every midpoint kept before it.
template <int Dim>
FaultSet<Dim> remove_clusters(const FaultSet<Dim>& fs, double eps_cluster) {
  FaultSet<Dim> out;
  out.class_i = fs.class_i;
  out.class_j = fs.class_j;
  for (const auto& t : fs.triplets) {
    bool keep = true;
    for (const auto& kept : out.triplets) {
      if ((kept.mid() - t.mid()).norm() < eps_cluster) {
        keep = false;
        break;
      }
    }
    if (keep) out.triplets.push_back(t);
  }
  out.reset_components();
  return out;
}

/// Full seeding stage: low-discrepancy sampling, two enrichment rounds,
/// pairwise bisection and cluster thinning. An empty map means no interface
/// was detected; the initial sample was then too coarse.
template <int Dim>
FaultMap<Dim> initialise(const BoxDomain<Dim>& box, std::size_t n_init, const Params& params,
                         ClassifierHandle<Dim>& h,
                         const std::function<bool(const Vec<Dim>&)>& keep = nullptr) {
  auto X = keep ? filtered_initial_set<Dim>(box, n_init, h, keep)
                : initial_set<Dim>(box, n_init, h);
  auto M = barycenter_means<Dim>(X, params.k_near, h);
  auto M2 = barycenter_means<Dim>(M, params.k_near, h);

  std::vector<LabeledPoint<Dim>> enriched(M);
  enriched.insert(enriched.end(), M2.begin(), M2.end());

  auto raw = initial_approximations<Dim>(X, enriched, params.eps_b, h);
  FaultMap<Dim> out;
  for (const auto& [key, fs] : raw) {
    auto thinned = remove_clusters(fs, params.eps_cluster);
    if (!thinned.triplets.empty()) out.emplace(key, std::move(thinned));
  }
  return out;
}

}  // namespace faultscout
