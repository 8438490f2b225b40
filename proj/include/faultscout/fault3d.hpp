#pragma once

#include <map>
#include <optional>
#include <vector>

#include "faultscout/fault2d.hpp"
#include "faultscout/parallel.hpp"
#include "faultscout/surface3d.hpp"

namespace faultscout {

namespace detail3d {

struct Seed3 {
  Vec3 z;            // starting point for the offset pair
  Vec3 normal;       // oriented interface normal estimate
  double scale;      // local length scale (triangle edge or gap step)
  double deviation;  // estimated distance of the interface to the seed plane
};

inline bool near_any_mid(const Vec3& p, const std::vector<Triplet<3>>& triplets, double radius) {
  for (const auto& t : triplets)
    if ((t.mid() - p).norm() < radius) return true;
  return false;
}

template <class Env>
std::optional<Triplet<3>> seed_to_triplet(const Seed3& seed, int class_i, int class_j,
                                          const Params& params, Env& env, Phase phase) {
  const double alpha = detail2d::offset_width(seed.deviation, seed.scale, params);
  auto sp = start_pairs(Vec3(seed.z + alpha * seed.normal), Vec3(seed.z - alpha * seed.normal),
                        seed.z, class_i, class_j, params.k_rep, env, phase);
  if (sp.status != PairStatus::Valid) return std::nullopt;
  auto bis = bisect_segment(sp.first, sp.second, params.eps_b, env, phase);
  if (!bis.triplet) return std::nullopt;
  if (bis.triplet->class_i != class_i || bis.triplet->class_j != class_j) return std::nullopt;
  return bis.triplet;
}

inline Vec3 oriented_patch_normal(const LocalPatch& patch, const Triplet<3>& center) {
  Vec3 n = patch.frame.normal;
  if (n.dot(center.point_j - center.point_i) < 0) n = -n;
  return n;
}

// synthetic plane triplet for seeding 2D chains inside a slice environment
inline Triplet<2> project_triplet(const Triplet<3>& t, const Vec3& origin, const Vec3& u,
                                  const Vec3& v) {
  Triplet<2> out;
  out.point_i = Vec2(u.dot(t.point_i - origin), v.dot(t.point_i - origin));
  out.point_j = Vec2(u.dot(t.point_j - origin), v.dot(t.point_j - origin));
  out.class_i = t.class_i;
  out.class_j = t.class_j;
  out.origin = t.origin;
  return out;
}

}  // namespace detail3d

struct Fill3Report {
  int passes = 0;
  std::size_t added = 0;
};

/// Gap filling on a surface: every triplet's local patch is triangulated in
/// its fitted plane; triangles with edges beyond eps_gap seed new starting
/// points at their centres, and patches elongated towards a large gap spawn
/// an extra seed stepping outward. Repeats until a pass adds nothing.
inline Fill3Report fill3d(FaultSet<3>& fs, const Params& params, ClassifierHandle<3>& h) {
  Fill3Report report;
  DirectEnv<3> env{&h};
  const double min_angle = params.min_triangle_angle_deg * std::numbers::pi / 180.0;

  for (int pass = 0; pass < params.max_fill_passes; ++pass) {
    const std::size_t n = fs.triplets.size();
    if (n < 4) return report;
    const int k_eff = std::min<int>(params.k_near, static_cast<int>(n) - 1);
    report.passes = pass + 1;

    std::vector<std::vector<detail3d::Seed3>> per_triplet(n);
    parallel_for(n, [&](std::size_t idx) {
      LocalPatch patch;
      try {
        patch = build_patch(fs, idx, k_eff);
      } catch (const std::exception&) {
        return;
      }
      double resid = 0.0;
      for (double w : patch.height) resid = std::max(resid, std::abs(w));
      const Vec3 normal = detail3d::oriented_patch_normal(patch, fs.triplets[idx]);

      for (const auto& tri : patch.triangles) {
        const Vec2 &a = patch.local[tri[0]], &b = patch.local[tri[1]], &c = patch.local[tri[2]];
        const double edge = triangle_max_edge(a, b, c);
        if (edge <= params.eps_gap * (1.0 + 1e-9)) continue;
        if (triangle_min_angle(a, b, c) < min_angle) continue;
        const Vec2 centroid = (a + b + c) / 3.0;
        per_triplet[idx].push_back({patch.frame.from_local(centroid), normal, edge, resid});
      }

      // gap detection: the centre sits at the rim of its own patch, i.e. it
      // is extremal in one of the local coordinates
      bool at_rim = false;
      for (int coord = 0; coord < 2 && !at_rim; ++coord) {
        double lo = patch.local[0][coord], hi = lo;
        for (const auto& uv : patch.local) {
          lo = std::min(lo, uv[coord]);
          hi = std::max(hi, uv[coord]);
        }
        const double band = params.gap_edge_fraction * (hi - lo);
        const double center = patch.local[0][coord];
        if (hi - lo > 0 && (center <= lo + band || center >= hi - band)) at_rim = true;
      }
      if (at_rim) {
        Vec3 gravity = Vec3::Zero();
        for (auto m : patch.members) gravity += fs.triplets[m].mid();
        gravity /= static_cast<double>(patch.members.size());
        const Vec3 dir = fs.triplets[idx].mid() - gravity;
        if (dir.norm() > 0) {
          const Vec3 z = fs.triplets[idx].mid() + params.eps_gap * dir.normalized();
          per_triplet[idx].push_back({z, normal, params.eps_gap, resid});
        }
      }
    });
    std::vector<detail3d::Seed3> seeds;
    for (auto& bucket : per_triplet)
      seeds.insert(seeds.end(), bucket.begin(), bucket.end());

    // deduplicate seeds (exact and within eps_b), drop out-of-domain ones
    std::vector<detail3d::Seed3> unique;
    for (const auto& s : seeds) {
      if (!h.domain().contains(s.z)) continue;
      bool dup = false;
      for (const auto& u : unique)
        if ((u.z - s.z).norm() < params.eps_b) dup = true;
      if (!dup) unique.push_back(s);
    }

    std::vector<Triplet<3>> batch;
    for (const auto& seed : unique) {
      auto t = detail3d::seed_to_triplet(seed, fs.class_i, fs.class_j, params, env, Phase::Fill);
      if (!t) continue;
      if (detail3d::near_any_mid(t->mid(), fs.triplets, params.eps_b)) continue;
      if (detail3d::near_any_mid(t->mid(), batch, params.eps_b)) continue;
      batch.push_back(*t);
    }
    if (batch.empty()) break;
    fs.triplets.insert(fs.triplets.end(), batch.begin(), batch.end());
    report.added += batch.size();
  }
  fs.reset_components();
  return report;
}

namespace detail3d {

/// Expands the interface from triplet `idx` along the tangential direction
/// `t_dir` by running the 2D expansion on the plane spanned by the partner
/// direction and the normal. Returns the new 3D triplets.
inline std::vector<Triplet<3>> expand_in_plane(const FaultSet<3>& fs, std::size_t idx,
                                               const Vec3& t_dir, const Vec3& normal,
                                               const Params& params, ClassifierHandle<3>& h) {
  const Vec3 x = fs.triplets[idx].mid();

  // partner: nearest triplet behind the expansion direction
  int partner = -1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < fs.triplets.size(); ++j) {
    if (j == idx) continue;
    const Vec3 w = fs.triplets[j].mid() - x;
    const double dist = w.norm();
    if (dist == 0.0 || dist >= best) continue;
    if (angle_between(Vec3(-t_dir), w) < params.alpha_expand) {
      best = dist;
      partner = static_cast<int>(j);
    }
  }
  if (partner < 0) return {};

  const Vec3 u0 = (x - fs.triplets[partner].mid()).normalized();
  Vec3 v0 = normal - normal.dot(u0) * u0;
  if (v0.norm() < 1e-12) return {};
  v0.normalize();

  PlaneSliceEnv env{&h, x, u0, v0};
  detail2d::Component comp;
  comp.triplets.push_back(project_triplet(fs.triplets[partner], x, u0, v0));
  comp.triplets.push_back(project_triplet(fs.triplets[idx], x, u0, v0));
  const std::size_t before = comp.triplets.size();
  detail2d::expand_component_end(comp, /*front=*/false, fs.class_i, fs.class_j, params, env,
                                 /*allow_closure=*/false);

  std::vector<Triplet<3>> out;
  for (std::size_t k = before; k < comp.triplets.size(); ++k) {
    const auto& t2 = comp.triplets[k];
    Triplet<3> t3;
    t3.point_i = env.embed(t2.point_i);
    t3.point_j = env.embed(t2.point_j);
    t3.class_i = t2.class_i;
    t3.class_j = t2.class_j;
    t3.origin = Phase::Expand;
    out.push_back(t3);
  }
  return out;
}

struct FacetId {
  int axis = 0;
  bool upper = false;
  auto operator<=>(const FacetId&) const = default;
};

/// Solves the 2D subproblem on one box facet: the collected triplets seed
/// in-facet starting pairs, then the usual curve pipeline (sort, fill,
/// expand) traces the interface curve inside the facet.
inline std::vector<Triplet<3>> trace_facet_curve(const FaultSet<3>& fs, FacetId facet,
                                                 const std::vector<Triplet<3>>& near_facet,
                                                 const Params& params, ClassifierHandle<3>& h) {
  const auto& box = h.domain();
  const int a = facet.axis;
  const int ua = (a + 1) % 3, va = (a + 2) % 3;

  Vec3 origin = Vec3::Zero();
  origin[a] = facet.upper ? box.upper[a] : box.lower[a];
  origin[ua] = box.lower[ua];
  origin[va] = box.lower[va];
  Vec3 u_axis = Vec3::Zero(), v_axis = Vec3::Zero();
  u_axis[ua] = 1.0;
  v_axis[va] = 1.0;
  FacetEnv env{&h, origin, u_axis, v_axis,
               BoxDomain<2>(Vec2(0, 0), Vec2(box.upper[ua] - box.lower[ua],
                                             box.upper[va] - box.lower[va]))};

  FaultSet<2> curve;
  curve.class_i = fs.class_i;
  curve.class_j = fs.class_j;
  for (const auto& t : near_facet) {
    // project the straddle into the facet and rebuild a valid pair there
    const Vec2 pi = env.project(t.point_i), pj = env.project(t.point_j);
    const Vec2 z = 0.5 * (pi + pj);
    if (!env.inside(z)) continue;
    const Vec2 off = pi - z;
    if (off.norm() == 0.0) continue;
    auto sp = start_pairs(pi, pj, z, fs.class_i, fs.class_j, params.k_rep, env, Phase::Expand);
    if (sp.status != PairStatus::Valid) continue;
    auto bis = bisect_segment(sp.first, sp.second, params.eps_b, env, Phase::Expand);
    if (!bis.triplet) continue;
    if (bis.triplet->class_i != fs.class_i || bis.triplet->class_j != fs.class_j) continue;
    bool dup = false;
    for (const auto& existing : curve.triplets)
      if ((existing.mid() - bis.triplet->mid()).norm() < params.eps_b) dup = true;
    if (!dup) curve.triplets.push_back(*bis.triplet);
  }
  if (curve.triplets.empty()) return {};
  curve.reset_components();
  sort_triplets(curve, params, env);
  auto report = fill2d(curve, params, env);
  split_components(curve, report.unfillable);
  expand2d(curve, params, env);

  std::vector<Triplet<3>> out;
  for (const auto& t2 : curve.triplets) {
    Triplet<3> t3;
    t3.point_i = env.embed(t2.point_i);
    t3.point_j = env.embed(t2.point_j);
    t3.class_i = t2.class_i;
    t3.class_j = t2.class_j;
    t3.origin = Phase::Expand;
    out.push_back(t3);
  }
  return out;
}

}  // namespace detail3d

/// Expansion towards inner boundaries (junction curves with other
/// interfaces) and outer boundaries (box facets). Inner: triplets close to a
/// foreign interface continue the surface towards it on a normal plane
/// slice. Outer: extremal triplets aligned with a facet expand onto it, and
/// the triplets collected on each facet are completed by the 2D pipeline.
/// Ends with one more fill pass over the enlarged set.
inline void expand3d(FaultSet<3>& fs, const FaultMap<3>& all_faults, const Params& params,
                     ClassifierHandle<3>& h) {
  const std::size_t n = fs.triplets.size();
  if (n == 0) return;
  const auto& box = h.domain();
  const int k_eff = std::min<int>(params.k_near, static_cast<int>(n) - 1);

  // inner set: triplets close to a triplet of another interface
  std::vector<std::pair<std::size_t, Vec3>> inner;  // (index, nearest foreign mid)
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = fs.triplets[i].mid();
    double best = 0.75 * params.eps_gap;
    std::optional<Vec3> target;
    for (const auto& [key, other] : all_faults) {
      if (key == FaultKey{fs.class_i, fs.class_j}) continue;
      for (const auto& t : other.triplets) {
        const double d = (t.mid() - p).norm();
        if (d < best) {
          best = d;
          target = t.mid();
        }
      }
    }
    if (target) inner.emplace_back(i, *target);
  }

  std::vector<Triplet<3>> batch;
  auto absorb = [&](std::vector<Triplet<3>>&& fresh) {
    for (auto& t : fresh) {
      if (detail3d::near_any_mid(t.mid(), fs.triplets, params.eps_b)) continue;
      if (detail3d::near_any_mid(t.mid(), batch, params.eps_b)) continue;
      batch.push_back(t);
    }
  };

  for (const auto& [idx, foreign] : inner) {
    Vec3 normal;
    try {
      normal = detail3d::oriented_patch_normal(build_patch(fs, idx, k_eff), fs.triplets[idx]);
    } catch (const std::exception&) {
      continue;
    }
    const Vec3 w = foreign - fs.triplets[idx].mid();
    Vec3 t_dir = w - w.dot(normal) * normal;
    if (t_dir.norm() < 1e-12) continue;
    t_dir.normalize();
    absorb(detail3d::expand_in_plane(fs, idx, t_dir, normal, params, h));
  }

  // outer set: extremal triplets per coordinate, minus the inner set
  std::vector<bool> is_inner(n, false);
  for (const auto& [idx, foreign] : inner) is_inner[idx] = true;

  Vec3 lo = fs.triplets[0].mid(), hi = lo;
  for (const auto& t : fs.triplets) {
    lo = lo.cwiseMin(t.mid());
    hi = hi.cwiseMax(t.mid());
  }
  const Vec3 extent = hi - lo;

  std::map<detail3d::FacetId, std::vector<Triplet<3>>> facet_sets;
  for (int axis = 0; axis < 3; ++axis) {
    const double other = std::max(extent[(axis + 1) % 3], extent[(axis + 2) % 3]);
    const int n_expand = std::max(1, static_cast<int>(std::ceil(other / params.eps_gap)));

    std::vector<std::pair<double, std::size_t>> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = {fs.triplets[i].mid()[axis], i};
    std::sort(coords.begin(), coords.end());

    for (int side = 0; side < 2; ++side) {
      const bool upper = side == 1;
      const detail3d::FacetId facet{axis, upper};
      const double facet_coord = upper ? box.upper[axis] : box.lower[axis];
      Vec3 n_outer = Vec3::Zero();
      n_outer[axis] = upper ? 1.0 : -1.0;

      const int take = std::min<int>(n_expand, static_cast<int>(n));
      for (int k = 0; k < take; ++k) {
        const std::size_t idx = upper ? coords[n - 1 - k].second : coords[k].second;
        if (is_inner[idx]) continue;
        const Vec3 x = fs.triplets[idx].mid();

        Vec3 normal;
        try {
          normal =
              detail3d::oriented_patch_normal(build_patch(fs, idx, k_eff), fs.triplets[idx]);
        } catch (const std::exception&) {
          continue;
        }
        const bool near_facet = std::abs(x[axis] - facet_coord) <= params.eps_gap;
        // unoriented angle between the surface normal and the facet normal:
        // surfaces running into the facet qualify, surfaces parallel to it
        // do not
        const double align = std::acos(std::clamp(std::abs(normal[axis]), 0.0, 1.0));
        if (!near_facet && !(align > params.alpha_expbound)) continue;

        auto fresh = detail3d::expand_in_plane(fs, idx, n_outer, normal, params, h);
        for (const auto& t : fresh) {
          if (std::abs(t.mid()[axis] - facet_coord) <= params.eps_gap)
            facet_sets[facet].push_back(t);
        }
        absorb(std::move(fresh));
      }
    }
  }

  fs.triplets.insert(fs.triplets.end(), batch.begin(), batch.end());

  // each facet's triplets define a 2D curve problem on that facet
  std::vector<Triplet<3>> facet_batch;
  for (const auto& [facet, near_facet] : facet_sets) {
    auto traced = detail3d::trace_facet_curve(fs, facet, near_facet, params, h);
    for (auto& t : traced) {
      if (detail3d::near_any_mid(t.mid(), fs.triplets, params.eps_b)) continue;
      if (detail3d::near_any_mid(t.mid(), facet_batch, params.eps_b)) continue;
      facet_batch.push_back(t);
    }
  }
  fs.triplets.insert(fs.triplets.end(), facet_batch.begin(), facet_batch.end());
  fs.reset_components();

  fill3d(fs, params, h);
}

/// Adaptive refinement (no coarsening in 3D): every patch triangle whose
/// interpolation-error bound exceeds eps_err seeds a new triplet at its
/// centre.
inline void adapt3d(FaultSet<3>& fs, const Params& params, ClassifierHandle<3>& h) {
  DirectEnv<3> env{&h};
  const double min_angle = params.min_triangle_angle_deg * std::numbers::pi / 180.0;

  for (int sweep = 0; sweep < params.k_adap; ++sweep) {
    const std::size_t n = fs.triplets.size();
    if (n < 4) return;
    const int k_eff = std::min<int>(params.k_near, static_cast<int>(n) - 1);

    std::vector<std::vector<detail3d::Seed3>> per_triplet(n);
    parallel_for(n, [&](std::size_t idx) {
      LocalPatch patch;
      try {
        patch = build_patch(fs, idx, k_eff);
      } catch (const std::exception&) {
        return;
      }
      RbfSurfaceModel model = patch_surface_model(patch, params.eps_b, params);
      const Vec3 normal = detail3d::oriented_patch_normal(patch, fs.triplets[idx]);

      for (const auto& tri : patch.triangles) {
        const Vec2 &a = patch.local[tri[0]], &b = patch.local[tri[1]], &c = patch.local[tri[2]];
        if (triangle_min_angle(a, b, c) < min_angle) continue;
        double err = 0.0;
        try {
          err = est_error_triangle(a, b, c, model);
        } catch (const std::exception&) {
          continue;
        }
        if (err <= params.eps_err) continue;
        const Vec2 centroid = (a + b + c) / 3.0;
        per_triplet[idx].push_back(
            {patch.frame.from_local(centroid), normal, triangle_max_edge(a, b, c), err});
      }
    });
    std::vector<detail3d::Seed3> seeds;
    for (auto& bucket : per_triplet)
      seeds.insert(seeds.end(), bucket.begin(), bucket.end());

    std::vector<detail3d::Seed3> unique;
    for (const auto& s : seeds) {
      if (!h.domain().contains(s.z)) continue;
      bool dup = false;
      for (const auto& u : unique)
        if ((u.z - s.z).norm() < params.eps_b) dup = true;
      if (!dup) unique.push_back(s);
    }

    std::vector<Triplet<3>> batch;
    for (const auto& seed : unique) {
      auto t = detail3d::seed_to_triplet(seed, fs.class_i, fs.class_j, params, env, Phase::Adapt);
      if (!t) continue;
      if (detail3d::near_any_mid(t->mid(), fs.triplets, params.eps_b)) continue;
      if (detail3d::near_any_mid(t->mid(), batch, params.eps_b)) continue;
      batch.push_back(*t);
    }
    if (batch.empty()) break;
    fs.triplets.insert(fs.triplets.end(), batch.begin(), batch.end());
  }
  fs.reset_components();
}

struct PipelineResult3 {
  FaultMap<3> seeded;
  FaultMap<3> filled;
  FaultMap<3> expanded;
  FaultMap<3> final;
  EvalLedger ledger;
};

/// Full 3D pipeline: seeding, then phase by phase across all interfaces so
/// the inner-boundary expansion can see every filled set.
inline PipelineResult3 run3d(ClassifierHandle<3>& h, const Params& params, std::size_t n_init,
                             const std::function<bool(const Vec3&)>& keep = nullptr) {
  params.validate();
  PipelineResult3 out;
  auto sets = initialise<3>(h.domain(), n_init, params, h, keep);
  out.seeded = sets;
  for (auto& [key, fs] : sets) fill3d(fs, params, h);
  out.filled = sets;
  for (auto& [key, fs] : sets) expand3d(fs, sets, params, h);
  out.expanded = sets;
  for (auto& [key, fs] : sets) adapt3d(fs, params, h);
  out.final = sets;
  out.ledger = h.ledger();
  return out;
}

}  // namespace faultscout
