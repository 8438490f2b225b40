#pragma once

#include <optional>
#include <span>
#include <vector>

#include "faultscout/delaunay.hpp"
#include "faultscout/geometry.hpp"
#include "faultscout/plane_fit.hpp"
#include "faultscout/polyfit.hpp"
#include "faultscout/rbf.hpp"

namespace faultscout {

struct SortOutcome {
  std::vector<int> order;                  // permutation of the input indices
  std::vector<std::vector<int>> subsets;   // chains before combination
  std::vector<bool> reversed;              // per subset, flipped while combining
};

/// Orders scattered interface points into a chain. Chains grow from the
/// point closest to the domain boundary, accepting the nearest unvisited
/// neighbour whose step direction stays within beta_angle of the incoming
/// direction; leftovers start new chains which are finally combined by
/// endpoint proximity.
template <class BoundaryDist>
SortOutcome sort_order(const std::vector<Vec2>& mids, int k_sort, double beta_angle,
                       BoundaryDist&& boundary_distance) {
  const int n = static_cast<int>(mids.size());
  SortOutcome out;
  if (n == 0) return out;

  const double cos_limit = std::cos(beta_angle);
  std::vector<bool> used(n, false);
  int remaining = n;

  while (remaining > 0) {
    int start = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = boundary_distance(mids[i]);
      if (d < best) {
        best = d;
        start = i;
      }
    }
    std::vector<int> chain{start};
    used[start] = true;
    --remaining;

    while (remaining > 0) {
      const int last = chain.back();
      std::vector<std::pair<double, int>> cand;
      for (int i = 0; i < n; ++i) {
        if (!used[i]) cand.emplace_back((mids[i] - mids[last]).squaredNorm(), i);
      }
      const int take = std::min<int>(k_sort, static_cast<int>(cand.size()));
      std::partial_sort(cand.begin(), cand.begin() + take, cand.end());

      int next = -1;
      if (chain.size() == 1) {
        next = cand[0].second;
      } else {
        const Vec2 incoming = mids[last] - mids[chain[chain.size() - 2]];
        for (int s = 0; s < take; ++s) {
          const Vec2 step = mids[cand[s].second] - mids[last];
          const double denom = incoming.norm() * step.norm();
          if (denom == 0.0 || incoming.dot(step) / denom > cos_limit) {
            next = cand[s].second;
            break;
          }
        }
      }
      if (next < 0) break;
      chain.push_back(next);
      used[next] = true;
      --remaining;
    }
    out.subsets.push_back(std::move(chain));
  }

  // combine chains by the distance between their endpoints, reversing where
  // needed
  std::vector<std::vector<int>> parts = out.subsets;
  out.reversed.assign(parts.size(), false);
  while (parts.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    int mode = 0;  // 0: a.back-b.front  1: a.back-b.back  2: a.front-b.front  3: a.front-b.back
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (std::size_t j = i + 1; j < parts.size(); ++j) {
        const Vec2& af = mids[parts[i].front()];
        const Vec2& ab = mids[parts[i].back()];
        const Vec2& bf = mids[parts[j].front()];
        const Vec2& bb = mids[parts[j].back()];
        const double d[4] = {(ab - bf).norm(), (ab - bb).norm(), (af - bf).norm(),
                             (af - bb).norm()};
        for (int m = 0; m < 4; ++m) {
          if (d[m] < best) {
            best = d[m];
            bi = i;
            bj = j;
            mode = m;
          }
        }
      }
    }
    auto& a = parts[bi];
    auto b = parts[bj];
    if (mode == 1 || mode == 2) std::reverse(b.begin(), b.end());
    if (mode == 2 || mode == 3) {
      b.insert(b.end(), a.begin(), a.end());
      a = std::move(b);
    } else {
      a.insert(a.end(), b.begin(), b.end());
    }
    parts.erase(parts.begin() + bj);
  }
  out.order = parts.front();
  return out;
}

/// Sorts the triplets of a fault set in place.
template <class Env>
SortOutcome sort_triplets(FaultSet<2>& fs, const Params& params, const Env& env) {
  if (fs.triplets.size() < 2) {
    fs.sorted = true;
    fs.reset_components();
    SortOutcome out;
    if (!fs.triplets.empty()) {
      out.order = {0};
      out.subsets = {{0}};
    }
    return out;
  }
  std::vector<Vec2> mids(fs.triplets.size());
  for (std::size_t i = 0; i < mids.size(); ++i) mids[i] = fs.triplets[i].mid();
  auto outcome = sort_order(mids, params.k_sort, params.beta_angle,
                            [&](const Vec2& p) { return env.boundary_distance(p); });
  std::vector<Triplet<2>> sorted;
  sorted.reserve(fs.triplets.size());
  for (int idx : outcome.order) sorted.push_back(fs.triplets[idx]);
  fs.triplets = std::move(sorted);
  fs.sorted = true;
  fs.reset_components();
  return outcome;
}

/// Curvature estimates for an ordered run of interface points. Interior
/// points use the curvature of a penalized RBF graph fit in the local line
/// frame; endpoints, and every point when the run cannot be read as a graph,
/// fall back to the circumcircle through three consecutive points.
struct CurvatureEstimate {
  std::vector<double> curvature;           // one value per input point
  bool graph_fit = false;
  std::optional<PlaneFrame<2>> frame;      // set when graph_fit
  std::optional<RbfCurveModel> model;      // set when graph_fit
  std::vector<double> abscissa;            // set when graph_fit
};

inline double circumcircle_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double r = circumcircle(a, b, c).second;
  return std::isfinite(r) && r > 0 ? 1.0 / r : 0.0;
}

inline CurvatureEstimate est_curvature(std::span<const Vec2> mids, double eps_b,
                                       const Params& params) {
  const int n = static_cast<int>(mids.size());
  if (n < 3) throw std::invalid_argument("est_curvature: need at least 3 points");

  CurvatureEstimate out;
  out.curvature.assign(n, 0.0);

  auto circle_all = [&]() {
    for (int i = 0; i < n; ++i) {
      const int m = std::clamp(i, 1, n - 2);
      out.curvature[i] = circumcircle_curvature(mids[m - 1], mids[m], mids[m + 1]);
    }
  };

  std::optional<PlaneFrame<2>> frame;
  try {
    std::vector<Vec2> pts(mids.begin(), mids.end());
    frame = fit_plane<2>(pts);
  } catch (const std::exception&) {
    circle_all();
    return out;
  }

  std::vector<double> s(n), v(n);
  double v_lo = std::numeric_limits<double>::infinity(), v_hi = -v_lo;
  for (int i = 0; i < n; ++i) {
    const auto loc = frame->local(mids[i]);
    s[i] = loc[0];
    v[i] = frame->height(mids[i]);
    v_lo = std::min(v_lo, v[i]);
    v_hi = std::max(v_hi, v[i]);
  }
  bool monotone = true;
  for (int i = 1; i < n && monotone; ++i) {
    if ((s[i] - s[i - 1]) * (s[1] - s[0]) <= 0.0) monotone = false;
  }
  const double span = std::abs(s[n - 1] - s[0]);
  // deep windows (sagitta above a quarter of the span) and three-point runs
  // are served better by exact circumcircles than by a graph fit
  if (!monotone || s[1] == s[0] || n == 3 || (v_hi - v_lo) > 0.25 * span) {
    circle_all();
    return out;
  }

  auto model = RbfCurveModel::fit(s, v, eps_b, params.rbf_shape_scale, params.morozov_max_iter);
  for (int i = 1; i + 1 < n; ++i) out.curvature[i] = model.curvature(s[i]);
  out.curvature[0] = circumcircle_curvature(mids[0], mids[1], mids[2]);
  out.curvature[n - 1] = circumcircle_curvature(mids[n - 3], mids[n - 2], mids[n - 1]);
  out.graph_fit = true;
  out.frame = frame;
  out.model = std::move(model);
  out.abscissa = std::move(s);
  return out;
}

/// Maximal deviation of a curve of curvature c from the chord between two of
/// its points at distance d, truncated after the fourth-order term.
inline double est_error_segment(double c, double d) {
  if (c < 0) throw std::invalid_argument("est_error_segment: curvature must be >= 0");
  const double cd2 = c * d * d;
  return 0.25 * cd2 + (1.0 / 16.0) * c * c * cd2 * d * d;
}

/// Largest step d with est_error_segment(c, d) <= eps_err, evaluated in the
/// numerically stable root form. Direct use of the naive closed form loses
/// all digits for small c * eps_err.
inline double max_step_length(double c, double eps_err) {
  if (c <= 0.0) return std::numeric_limits<double>::infinity();
  const double v_min = -(2.0 + std::sqrt(4.0 + 16.0 * c * eps_err));
  return 4.0 * std::sqrt(eps_err / (-c * v_min));
}

/// Extrapolation step: curvature-limited, capped by the admissible gap and
/// by a growth factor on the local average spacing.
inline double step_size(double c, double eps_err, double eps_gap, double d_avg,
                        double beta_growth) {
  return std::min({eps_gap, beta_growth * d_avg, max_step_length(c, eps_err)});
}

/// Polynomial extrapolation of an ordered run of interface points in the
/// frame of their least-squares line. The first input point is the terminal
/// one; evaluation beyond it is the whole purpose.
class ExtrapolationCurve {
 public:
  /// mids[0] is the terminal point of the chain.
  static ExtrapolationCurve fit(std::span<const Vec2> mids, double eps_b,
                                int morozov_iter = 60) {
    if (mids.size() < 2) throw std::invalid_argument("extrapolate: need at least 2 points");

    std::vector<Vec2> pts(mids.begin(), mids.end());
    for (int attempt = 0; attempt < 2; ++attempt) {
      PlaneFrame<2> frame = fit_plane<2>(pts);
      std::vector<double> s(pts.size()), v(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        s[i] = frame.local(pts[i])[0];
        v[i] = frame.height(pts[i]);
      }
      // maximal strictly monotone prefix keeps the run a graph over the line
      std::size_t keep = 1;
      while (keep < s.size() && (s[keep] - s[keep - 1]) * (s[1] - s[0]) > 0.0) ++keep;
      if (keep == s.size()) {
        ExtrapolationCurve out;
        out.frame_ = frame;
        // fit tighter than eps_b: extrapolation beyond the data amplifies
        // whatever residual the fit is allowed to leave
        out.poly_ = RegularizedPolynomial::fit(s, v, static_cast<int>(s.size()) - 1,
                                               0.5 * eps_b, morozov_iter);
        out.s_terminal_ = s[0];
        out.direction_ = (s[0] > s[1]) ? 1.0 : -1.0;
        out.s_lo_ = *std::min_element(s.begin(), s.end());
        out.s_hi_ = *std::max_element(s.begin(), s.end());
        return out;
      }
      if (keep < 2) throw std::invalid_argument("extrapolate: coincident leading points");
      pts.resize(keep);  // refit the frame on the graph-like prefix
    }
    throw std::invalid_argument("extrapolate: points do not form a graph over their line");
  }

  Vec2 point(double s) const { return frame_.from_local(Eigen::Matrix<double, 1, 1>(s), poly_.value(s)); }

  Vec2 tangent(double s) const {
    const Vec2 g = frame_.tangent.col(0) + poly_.deriv(s) * frame_.normal;
    return g.normalized();
  }

  Vec2 normal(double s) const { return perpendicular(tangent(s)); }

  double terminal_param() const { return s_terminal_; }
  double direction() const { return direction_; }

  /// Parameter s beyond the terminal point with |point(s) - anchor| close to
  /// the requested distance.
  double parameter_at_distance(const Vec2& anchor, double dist) const {
    double hi = 1.5 * dist;
    for (int k = 0; k < 8; ++k) {
      if ((point(s_terminal_ + direction_ * hi) - anchor).norm() >= dist) break;
      hi *= 2.0;
    }
    double lo = 0.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      if ((point(s_terminal_ + direction_ * mid) - anchor).norm() < dist)
        lo = mid;
      else
        hi = mid;
    }
    return s_terminal_ + direction_ * 0.5 * (lo + hi);
  }

 private:
  PlaneFrame<2> frame_;
  RegularizedPolynomial poly_ = RegularizedPolynomial::fit(
      std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 0.0}, 1, 1.0);
  double s_terminal_ = 0.0;
  double direction_ = 1.0;
  double s_lo_ = 0.0, s_hi_ = 0.0;
};

template <class Pair>
struct ReduceOutcome {
  bool found = false;
  double s_hat = 0.0;
  Pair pair{};
};

/// Bisection on the curve parameter between a valid side s1 and a violating
/// side s0 until a valid starting pair sits within eps_b (along the curve)
/// of the first invalid parameter. `valid_at` returns the pair when the
/// offsets at that parameter straddle the interface.
template <class ValidityTest>
auto reduce_step(const ExtrapolationCurve& curve, double s1, double s0, ValidityTest&& valid_at,
                 double eps_b) -> ReduceOutcome<std::decay_t<decltype(*valid_at(s0))>> {
  using Pair = std::decay_t<decltype(*valid_at(s0))>;
  ReduceOutcome<Pair> out;

  if (auto direct = valid_at(s0)) {  // nothing to reduce
    out.found = true;
    out.s_hat = s0;
    out.pair = *direct;
    return out;
  }

  double lo = s1, hi = s0;
  std::optional<Pair> best;
  for (int it = 0; it < 60; ++it) {
    if ((curve.point(lo) - curve.point(hi)).norm() < eps_b) break;
    const double mid = 0.5 * (lo + hi);
    if (auto r = valid_at(mid)) {
      lo = mid;
      best = *r;
    } else {
      hi = mid;
    }
  }
  if (!best) {
    if (auto r = valid_at(s1)) {
      best = *r;
      lo = s1;
    }
  }
  if (best) {
    out.found = true;
    out.s_hat = lo;
    out.pair = *best;
  }
  return out;  // not found: the interface ends right at the chain terminal
}

}  // namespace faultscout
