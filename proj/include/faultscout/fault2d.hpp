#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "faultscout/curve2d.hpp"
#include "faultscout/initial.hpp"

namespace faultscout {

namespace detail2d {

struct Component {
  std::vector<Triplet<2>> triplets;
  bool closed = false;
};

inline std::vector<Component> split_into_components(const FaultSet<2>& fs) {
  std::vector<Component> comps;
  for (std::size_t c = 0; c < fs.component_count(); ++c) {
    Component comp;
    comp.triplets.assign(fs.triplets.begin() + fs.component_begin(c),
                         fs.triplets.begin() + fs.component_end(c));
    comp.closed = fs.closed(c);
    comps.push_back(std::move(comp));
  }
  return comps;
}

inline void reassemble(FaultSet<2>& fs, std::vector<Component> comps) {
  fs.triplets.clear();
  fs.component_breaks.clear();
  fs.component_closed.clear();
  for (auto& comp : comps) {
    if (comp.triplets.empty()) continue;
    if (!fs.triplets.empty()) fs.component_breaks.push_back(fs.triplets.size());
    fs.triplets.insert(fs.triplets.end(), comp.triplets.begin(), comp.triplets.end());
    fs.component_closed.push_back(comp.closed);
  }
}

// window of up to 5 midpoints around the segment (l, l+1); ring indexing for
// closed components
inline std::vector<Vec2> segment_window(const Component& comp, std::size_t l,
                                        std::size_t* pos_l = nullptr) {
  const int m = static_cast<int>(comp.triplets.size());
  std::vector<Vec2> mids;
  int lo = static_cast<int>(l) - 2;
  int hi = static_cast<int>(l) + 2;
  if (comp.closed && m >= 5) {
    for (int k = lo; k <= hi; ++k)
      mids.push_back(comp.triplets[((k % m) + m) % m].mid());
    if (pos_l) *pos_l = 2;
  } else {
    lo = std::max(lo, 0);
    hi = std::min(hi, m - 1);
    for (int k = lo; k <= hi; ++k) mids.push_back(comp.triplets[k].mid());
    if (pos_l) *pos_l = l - lo;
  }
  return mids;
}

// curvature bound for the segment (l, l+1), zero when the window is too small
inline double segment_curvature(const Component& comp, std::size_t l, const Params& params) {
  std::size_t pos = 0;
  auto mids = segment_window(comp, l, &pos);
  if (mids.size() < 3) return 0.0;
  auto est = est_curvature(mids, params.eps_b, params);
  const std::size_t pos2 = std::min(pos + 1, mids.size() - 1);
  return std::max(est.curvature[pos], est.curvature[pos2]);
}

inline Vec2 oriented_normal(const Vec2& direction, const Triplet<2>& reference) {
  Vec2 n = perpendicular(direction).normalized();
  if (n.dot(reference.point_j - reference.point_i) < 0) n = -n;
  return n;
}

inline double offset_width(double deviation, double scale, const Params& params) {
  return std::min(params.eps_safemax * scale,
                  std::max(deviation, params.eps_safemin * params.eps_b));
}

inline bool near_existing(const Vec2& p, const std::vector<Triplet<2>>& triplets, double radius) {
  for (const auto& t : triplets)
    if ((t.mid() - p).norm() < radius) return true;
  return false;
}

}  // namespace detail2d

struct FillReport {
  int passes = 0;
  std::vector<std::size_t> unfillable;  // global indices l with gap (l, l+1) still open
};

/// Fills gaps between consecutive triplets with equidistant chord points,
/// offset along the estimated normal, validated and bisected. Iterates until
/// every same-component gap is within eps_gap or a pass makes no progress;
/// leftover gaps signal separate components.
template <class Env>
FillReport fill2d(FaultSet<2>& fs, const Params& params, Env& env) {
  if (!fs.sorted) throw std::logic_error("fill2d: fault set must be sorted");
  FillReport report;
  if (fs.triplets.size() < 2) return report;

  auto comps = detail2d::split_into_components(fs);
  for (int pass = 0; pass < params.max_fill_passes; ++pass) {
    bool inserted_any = false;
    report.passes = pass + 1;
    for (auto& comp : comps) {
      const std::size_t m = comp.triplets.size();
      if (m < 2) continue;
      std::vector<std::vector<Triplet<2>>> plan(m);  // insertions after index l
      const std::size_t seg_count = comp.closed ? m : m - 1;
      for (std::size_t l = 0; l < seg_count; ++l) {
        const std::size_t r_next = (l + 1) % m;
        const Vec2 a = comp.triplets[l].mid();
        const Vec2 b = comp.triplets[r_next].mid();
        const double d = (b - a).norm();
        if (d <= params.eps_gap * (1.0 + 1e-9)) continue;

        const double curv = detail2d::segment_curvature(comp, l, params);
        const double delta = est_error_segment(curv, d);
        const double alpha = detail2d::offset_width(delta, d, params);
        const Vec2 u = (b - a) / d;
        const Vec2 n = detail2d::oriented_normal(u, comp.triplets[l]);

        const int count =
            static_cast<int>(std::ceil((d / params.eps_gap) * (1.0 - 1e-12))) - 1;
        std::vector<Triplet<2>> fresh;
        for (int r = 1; r <= count; ++r) {
          const Vec2 z = a + (static_cast<double>(r) / (count + 1)) * (b - a);
          auto sp = start_pairs(Vec2(z + alpha * n), Vec2(z - alpha * n), z, fs.class_i,
                                fs.class_j, params.k_rep, env, Phase::Fill);
          if (sp.status != PairStatus::Valid) continue;
          auto bis = bisect_segment(sp.first, sp.second, params.eps_b, env, Phase::Fill);
          if (!bis.triplet) continue;
          if (bis.triplet->class_i != fs.class_i || bis.triplet->class_j != fs.class_j)
            continue;
          const Vec2 mid = bis.triplet->mid();
          bool dup = (mid - a).norm() < params.eps_b || (mid - b).norm() < params.eps_b;
          for (const auto& f : fresh)
            if ((f.mid() - mid).norm() < params.eps_b) dup = true;
          if (dup) continue;
          fresh.push_back(*bis.triplet);
        }
        if (fresh.empty()) continue;
        // order by position along the chord
        std::sort(fresh.begin(), fresh.end(), [&](const auto& x, const auto& y) {
          return u.dot(x.mid() - a) < u.dot(y.mid() - a);
        });
        plan[l] = std::move(fresh);
        inserted_any = true;
      }
      if (std::all_of(plan.begin(), plan.end(), [](const auto& v) { return v.empty(); }))
        continue;
      std::vector<Triplet<2>> rebuilt;
      for (std::size_t l = 0; l < m; ++l) {
        rebuilt.push_back(comp.triplets[l]);
        rebuilt.insert(rebuilt.end(), plan[l].begin(), plan[l].end());
      }
      comp.triplets = std::move(rebuilt);
    }
    if (!inserted_any) break;
  }

  detail2d::reassemble(fs, std::move(comps));

  for (std::size_t c = 0; c < fs.component_count(); ++c) {
    for (std::size_t l = fs.component_begin(c); l + 1 < fs.component_end(c); ++l) {
      const double d = (fs.triplets[l + 1].mid() - fs.triplets[l].mid()).norm();
      if (d > params.eps_gap * (1.0 + 1e-9)) report.unfillable.push_back(l);
    }
  }
  return report;
}

/// Breaks the chain at gaps the fill stage could not close; the pieces are
/// treated as separate components from here on.
inline void split_components(FaultSet<2>& fs, const std::vector<std::size_t>& unfillable) {
  if (unfillable.empty()) return;
  std::vector<std::size_t> breaks(fs.component_breaks);
  for (auto l : unfillable) breaks.push_back(l + 1);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  fs.component_breaks = std::move(breaks);
  fs.component_closed.assign(fs.component_count(), false);
}

namespace detail2d {

/// Expands one end of an open component until the interface leaves the
/// domain, meets another class, or closes onto the opposite end.
template <class Env>
void expand_component_end(Component& comp, bool front, int class_i, int class_j,
                          const Params& params, Env& env, bool allow_closure) {
  const int max_steps = 100000;
  for (int step = 0; step < max_steps; ++step) {
    const std::size_t m = comp.triplets.size();
    if (m == 0 || comp.closed) return;

    // window with the terminal point first
    std::vector<Vec2> window;
    const int k = std::min<int>(params.k_extra, static_cast<int>(m));
    for (int i = 0; i < k; ++i)
      window.push_back(front ? comp.triplets[i].mid() : comp.triplets[m - 1 - i].mid());
    const Triplet<2>& terminal = front ? comp.triplets.front() : comp.triplets.back();

    double d_avg = params.eps_gap;
    if (window.size() >= 2) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < window.size(); ++i) acc += (window[i] - window[i + 1]).norm();
      d_avg = acc / (window.size() - 1);
    }

    std::optional<ExtrapolationCurve> curve;
    if (m == 1) {
      // a single seed has no chain direction; walk along the straddle
      // perpendicular, one way per end
      Vec2 t = perpendicular((terminal.point_j - terminal.point_i).normalized());
      if (!front) t = -t;
      const std::vector<Vec2> synthetic{window[0], window[0] - params.eps_gap * t};
      curve = ExtrapolationCurve::fit(synthetic, params.eps_b, params.morozov_max_iter);
    } else {
      try {
        curve = ExtrapolationCurve::fit(window, params.eps_b, params.morozov_max_iter);
      } catch (const std::exception&) {
        return;  // degenerate terminal run
      }
    }

    double curv = 0.0;
    if (m >= 3) {
      auto est = est_curvature(window, params.eps_b, params);
      curv = est.curvature.front();
    }
    const double l_extra =
        step_size(curv, params.eps_err, params.eps_gap, d_avg, params.beta_growth);
    const double s1 = curve->terminal_param();
    const double s0 = curve->parameter_at_distance(window[0], l_extra);
    const double alpha =
        detail2d::offset_width(est_error_segment(curv, l_extra), l_extra, params);

    const auto attempt = [&](double s) -> std::pair<std::optional<StartPair<2>>, bool> {
      const Vec2 z = curve->point(s);
      if (!env.inside(z)) return {std::nullopt, true};
      const Vec2 n = curve->normal(s);
      auto sp = start_pairs(Vec2(z + alpha * n), Vec2(z - alpha * n), z, class_i, class_j,
                            params.k_rep, env, Phase::Expand);
      if (sp.status == PairStatus::Valid) return {sp, false};
      return {std::nullopt, sp.status == PairStatus::Blocked};
    };
    auto valid_at = [&](double s) { return attempt(s).first; };

    // offsets in a third class or outside the domain mean the interface ends
    // within this step; a same-class pair is a sideways overshoot and only
    // shortens the step
    bool terminal_step = false;
    auto [pair, blocked] = attempt(s0);
    if (!pair) {
      auto reduced = reduce_step(*curve, s1, s0, valid_at, params.eps_b);
      if (!reduced.found) return;  // interface ends right here
      pair = reduced.pair;
      terminal_step = blocked;
    }

    auto bis = bisect_segment(pair->first, pair->second, params.eps_b, env, Phase::Expand);
    if (!bis.triplet) return;
    if (bis.triplet->class_i != class_i || bis.triplet->class_j != class_j) return;
    if (detail2d::near_existing(bis.triplet->mid(), comp.triplets, params.eps_b)) return;

    if (front)
      comp.triplets.insert(comp.triplets.begin(), *bis.triplet);
    else
      comp.triplets.push_back(*bis.triplet);

    // closed-curve test: the fresh terminal approaches the opposite end
    // moving forward
    if (allow_closure && comp.triplets.size() >= 4) {
      const Vec2 fresh = bis.triplet->mid();
      const Vec2 opposite = front ? comp.triplets.back().mid() : comp.triplets.front().mid();
      const Vec2 prev = front ? comp.triplets[1].mid()
                              : comp.triplets[comp.triplets.size() - 2].mid();
      const Vec2 incoming = fresh - prev;
      const Vec2 linking = opposite - fresh;
      const double denom = incoming.norm() * linking.norm();
      if ((fresh - opposite).norm() <= params.eps_gap && denom > 0 &&
          incoming.dot(linking) / denom > std::cos(params.beta_angle)) {
        comp.closed = true;
        return;
      }
    }
    if (terminal_step) return;
  }
}

}  // namespace detail2d

/// Extends every open component beyond its first and last triplet until the
/// true ends of the interface are reached or the curve closes.
template <class Env>
void expand2d(FaultSet<2>& fs, const Params& params, Env& env) {
  if (!fs.sorted) throw std::logic_error("expand2d: fault set must be sorted");
  auto comps = detail2d::split_into_components(fs);
  for (auto& comp : comps) {
    if (comp.closed || comp.triplets.empty()) continue;
    detail2d::expand_component_end(comp, /*front=*/true, fs.class_i, fs.class_j, params, env,
                                   /*allow_closure=*/true);
    if (!comp.closed)
      detail2d::expand_component_end(comp, /*front=*/false, fs.class_i, fs.class_j, params, env,
                                     /*allow_closure=*/true);
    if (comp.closed) {
      // restore a clean cyclic order after wrapping around
      FaultSet<2> tmp;
      tmp.class_i = fs.class_i;
      tmp.class_j = fs.class_j;
      tmp.triplets = comp.triplets;
      sort_triplets(tmp, params, env);
      comp.triplets = std::move(tmp.triplets);
    }
  }
  detail2d::reassemble(fs, std::move(comps));
}

/// Adaptive refinement and coarsening: inserts a triplet near the local
/// curve midpoint of every segment whose estimated deviation exceeds
/// eps_err, removes triplets where both adjacent segments stay below
/// eps_coarse, never removing neighbours in one sweep and never opening a
/// gap beyond eps_gap.
template <class Env>
void adapt2d(FaultSet<2>& fs, const Params& params, Env& env) {
  if (!fs.sorted) throw std::logic_error("adapt2d: fault set must be sorted");
  auto comps = detail2d::split_into_components(fs);

  for (int sweep = 0; sweep < params.k_adap; ++sweep) {
    bool changed = false;
    for (auto& comp : comps) {
      const std::size_t m = comp.triplets.size();
      if (m < 2) continue;
      const std::size_t seg_count = comp.closed ? m : m - 1;

      struct SegInfo {
        double error = 0.0;
        double curv = 0.0;
      };
      std::vector<SegInfo> segs(seg_count);
      for (std::size_t l = 0; l < seg_count; ++l) {
        const Vec2 a = comp.triplets[l].mid();
        const Vec2 b = comp.triplets[(l + 1) % m].mid();
        segs[l].curv = detail2d::segment_curvature(comp, l, params);
        segs[l].error = est_error_segment(segs[l].curv, (b - a).norm());
      }

      // refinement: one insertion per overloaded segment
      std::vector<std::vector<Triplet<2>>> plan(m);
      for (std::size_t l = 0; l < seg_count; ++l) {
        if (segs[l].error <= params.eps_err) continue;
        const std::size_t nxt = (l + 1) % m;
        const Vec2 a = comp.triplets[l].mid();
        const Vec2 b = comp.triplets[nxt].mid();
        const double d = (b - a).norm();

        std::size_t pos = 0;
        auto window = detail2d::segment_window(comp, l, &pos);
        Vec2 z = 0.5 * (a + b);
        Vec2 n = detail2d::oriented_normal((b - a).normalized(), comp.triplets[l]);
        if (window.size() >= 3) {
          auto est = est_curvature(window, params.eps_b, params);
          const std::size_t pos2 = std::min(pos + 1, window.size() - 1);
          if (est.graph_fit && pos2 < est.abscissa.size()) {
            // place the seed on the fitted curve halfway between the nodes
            const double s_new = 0.5 * (est.abscissa[pos] + est.abscissa[pos2]);
            z = est.frame->from_local(Eigen::Matrix<double, 1, 1>(s_new),
                                      est.model->value(s_new));
            const Vec2 tangent =
                (est.frame->tangent.col(0) + est.model->deriv(s_new) * est.frame->normal)
                    .normalized();
            n = detail2d::oriented_normal(tangent, comp.triplets[l]);
          }
        }
        if (!env.inside(z)) continue;
        const double c3 = segs[l].curv * segs[l].curv * segs[l].curv;
        const double delta_rbf = (1.0 / 16.0) * c3 * d * d * d * d;
        const double alpha = detail2d::offset_width(delta_rbf, d, params);
        auto sp = start_pairs(Vec2(z + alpha * n), Vec2(z - alpha * n), z, fs.class_i,
                              fs.class_j, params.k_rep, env, Phase::Adapt);
        if (sp.status != PairStatus::Valid) continue;
        auto bis = bisect_segment(sp.first, sp.second, params.eps_b, env, Phase::Adapt);
        if (!bis.triplet) continue;
        if (bis.triplet->class_i != fs.class_i || bis.triplet->class_j != fs.class_j) continue;
        const Vec2 mid = bis.triplet->mid();
        if ((mid - a).norm() < params.eps_b || (mid - b).norm() < params.eps_b) continue;
        plan[l].push_back(*bis.triplet);
      }

      // coarsening: both neighbouring segments far below the error budget
      std::vector<bool> remove(m, false);
      const std::size_t first_removable = comp.closed ? 0 : 1;
      const std::size_t last_removable = comp.closed ? m : (m >= 1 ? m - 1 : 0);
      for (std::size_t i = first_removable; i < last_removable; ++i) {
        const std::size_t seg_in = (i + m - 1) % m;
        const std::size_t seg_out = i % m;
        if (!comp.closed && (i == 0 || i >= m - 1)) continue;
        if (seg_in >= seg_count || seg_out >= seg_count) continue;
        if (!plan[seg_in].empty() || !plan[seg_out].empty()) continue;
        if (segs[seg_in].error >= params.eps_coarse || segs[seg_out].error >= params.eps_coarse)
          continue;
        if (remove[(i + m - 1) % m]) continue;  // never drop neighbours together
        const Vec2 prev = comp.triplets[(i + m - 1) % m].mid();
        const Vec2 next = comp.triplets[(i + 1) % m].mid();
        if ((next - prev).norm() > params.eps_gap) continue;
        remove[i] = true;
      }
      if (comp.closed && m >= 2 && remove[0] && remove[m - 1]) remove[m - 1] = false;

      bool any = false;
      for (std::size_t l = 0; l < m; ++l)
        if (!plan[l].empty() || remove[l]) any = true;
      if (!any) continue;

      std::vector<Triplet<2>> rebuilt;
      for (std::size_t l = 0; l < m; ++l) {
        if (!remove[l]) rebuilt.push_back(comp.triplets[l]);
        rebuilt.insert(rebuilt.end(), plan[l].begin(), plan[l].end());
      }
      comp.triplets = std::move(rebuilt);
      changed = true;
    }
    if (!changed) break;
  }
  detail2d::reassemble(fs, std::move(comps));
}

struct PipelineResult2 {
  FaultMap<2> seeded;    // after initialise
  FaultMap<2> filled;    // after fill + component split
  FaultMap<2> expanded;  // after expand
  FaultMap<2> final;     // after adapt
  EvalLedger ledger;
};

/// Full 2D pipeline: seeding, then per interface sort, fill, split, expand
/// and adapt.
template <int Dim = 2>
PipelineResult2 run2d(ClassifierHandle<2>& h, const Params& params, std::size_t n_init,
                      const std::function<bool(const Vec2&)>& keep = nullptr) {
  params.validate();
  PipelineResult2 out;
  DirectEnv<2> env{&h};

  auto sets = initialise<2>(h.domain(), n_init, params, h, keep);
  out.seeded = sets;
  for (auto& [key, fs] : sets) {
    sort_triplets(fs, params, env);
    auto report = fill2d(fs, params, env);
    split_components(fs, report.unfillable);
    out.filled.emplace(key, fs);
    expand2d(fs, params, env);
    out.expanded.emplace(key, fs);
    adapt2d(fs, params, env);
    out.final.emplace(key, fs);
  }
  out.ledger = h.ledger();
  return out;
}

}  // namespace faultscout
