#pragma once

#include <Eigen/Dense>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "faultscout/region.hpp"

namespace faultscout {

struct PerformanceMatrix {
  std::vector<std::string> alternatives;
  std::vector<std::string> criteria;
  Eigen::MatrixXd scores;          // alternatives x criteria
  std::vector<bool> benefit;       // per criterion; false = cost

  void validate() const {
    if (scores.rows() < 2) throw std::invalid_argument("performance matrix: need >= 2 alternatives");
    if (!scores.allFinite()) throw std::invalid_argument("performance matrix: non-finite entries");
    if (static_cast<int>(benefit.size()) != scores.cols())
      throw std::invalid_argument("performance matrix: orientation count mismatch");
  }
};

/// CSV layout: header row with criterion names, optional second row of
/// benefit|cost orientations, then one row per alternative. All criteria
/// default to benefit.
inline PerformanceMatrix load_performance_matrix(std::istream& in) {
  PerformanceMatrix pm;
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      cells.push_back(cell);
    }
    rows.push_back(std::move(cells));
  }
  if (rows.size() < 3) throw std::runtime_error("performance matrix: too few rows");
  pm.criteria.assign(rows[0].begin() + 1, rows[0].end());
  const int c = static_cast<int>(pm.criteria.size());

  std::size_t first_data = 1;
  pm.benefit.assign(c, true);
  if (rows.size() > 1 && rows[1].size() == rows[0].size() &&
      (rows[1][1] == "benefit" || rows[1][1] == "cost")) {
    for (int j = 0; j < c; ++j) {
      const auto& v = rows[1][j + 1];
      if (v != "benefit" && v != "cost")
        throw std::runtime_error("performance matrix: orientation must be benefit or cost");
      pm.benefit[j] = v == "benefit";
    }
    first_data = 2;
  }

  const int n = static_cast<int>(rows.size() - first_data);
  pm.scores.resize(n, c);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[first_data + i];
    if (static_cast<int>(row.size()) != c + 1)
      throw std::runtime_error("performance matrix: ragged row");
    pm.alternatives.push_back(row[0]);
    for (int j = 0; j < c; ++j) pm.scores(i, j) = std::stod(row[j + 1]);
  }
  pm.validate();
  return pm;
}

inline PerformanceMatrix load_performance_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("performance matrix: cannot open " + path);
  return load_performance_matrix(in);
}

/// Classic TOPSIS: vector normalization, weighted distances to the ideal and
/// anti-ideal alternative, argmax of the closeness coefficient. Ties resolve
/// to the lowest index. Returns a 1-based alternative index.
inline int topsis_decide(const PerformanceMatrix& pm, const Eigen::VectorXd& weights) {
  pm.validate();
  const int n = static_cast<int>(pm.scores.rows());
  const int c = static_cast<int>(pm.scores.cols());
  if (weights.size() != c) throw std::invalid_argument("topsis: weight count mismatch");
  if (weights.minCoeff() < -1e-12) throw std::invalid_argument("topsis: negative weight");

  Eigen::MatrixXd v(n, c);
  for (int j = 0; j < c; ++j) {
    const double norm = pm.scores.col(j).norm();
    if (norm == 0.0) throw std::invalid_argument("topsis: zero criterion column");
    v.col(j) = pm.scores.col(j) * (weights[j] / norm);
  }
  Eigen::VectorXd ideal(c), anti(c);
  for (int j = 0; j < c; ++j) {
    const double hi = v.col(j).maxCoeff(), lo = v.col(j).minCoeff();
    ideal[j] = pm.benefit[j] ? hi : lo;
    anti[j] = pm.benefit[j] ? lo : hi;
  }
  int best = 0;
  double best_closeness = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d_plus = (v.row(i).transpose() - ideal).norm();
    const double d_minus = (v.row(i).transpose() - anti).norm();
    const double denom = d_plus + d_minus;
    const double closeness = denom > 0 ? d_minus / denom : 0.0;
    if (closeness > best_closeness + 1e-15) {
      best_closeness = closeness;
      best = i;
    }
  }
  return best + 1;
}

/// Isometric chart of the downscaled weight simplex: the variable weights
/// (scaled to sum c_f = 1 - sum of the fixed ones) live on a hyperplane in
/// R^m, which an orthonormal basis of 1-perp maps to R^{m-1}. For m = 3 the
/// image is the equilateral triangle with vertices c_f (0.4082, -0.7071),
/// c_f (0.4082, 0.7071), c_f (-0.8165, 0).
class SimplexEmbedding {
 public:
  SimplexEmbedding(int m_variable, std::vector<int> variable_index,
                   Eigen::VectorXd full_fixed_weights)
      : m_(m_variable),
        variable_index_(std::move(variable_index)),
        fixed_(std::move(full_fixed_weights)) {
    if (m_ < 2 || m_ > 4) throw std::invalid_argument("simplex embedding: m must be 2..4");
    if (static_cast<int>(variable_index_.size()) != m_)
      throw std::invalid_argument("simplex embedding: index count mismatch");
    double fixed_sum = 0.0;
    for (int i = 0; i < fixed_.size(); ++i) fixed_sum += fixed_[i];
    c_f_ = 1.0 - fixed_sum;
    if (!(c_f_ > 0)) throw std::invalid_argument("simplex embedding: no weight mass left");

    basis_ = Eigen::MatrixXd::Zero(m_, m_ - 1);
    if (m_ == 2) {
      basis_ << -1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    } else if (m_ == 3) {
      basis_.col(0) = Eigen::Vector3d(1, 1, -2) / std::sqrt(6.0);
      basis_.col(1) = Eigen::Vector3d(-1, 1, 0) / std::numbers::sqrt2;
    } else {
      basis_.col(0) = Eigen::Vector4d(1, 1, 1, -3) / std::sqrt(12.0);
      basis_.col(1) = Eigen::Vector4d(1, 1, -2, 0) / std::sqrt(6.0);
      basis_.col(2) = Eigen::Vector4d(-1, 1, 0, 0) / std::numbers::sqrt2;
    }
  }

  int variable_count() const { return m_; }
  double scale() const { return c_f_; }
  const std::vector<int>& variable_index() const { return variable_index_; }

  /// Variable part of a full weight vector mapped to R^{m-1}.
  Eigen::VectorXd embed(const Eigen::VectorXd& full_weights) const {
    Eigen::VectorXd wv(m_);
    for (int k = 0; k < m_; ++k) wv[k] = full_weights[variable_index_[k]];
    return basis_.transpose() * (wv - barycenter());
  }

  /// Full weight vector from a chart point: variable part plus the fixed
  /// weights.
  Eigen::VectorXd invert(const Eigen::VectorXd& chart_point) const {
    const Eigen::VectorXd wv = barycenter() + basis_ * chart_point;
    Eigen::VectorXd full = fixed_;
    for (int k = 0; k < m_; ++k) full[variable_index_[k]] = wv[k];
    return full;
  }

  Eigen::VectorXd barycenter() const {
    return Eigen::VectorXd::Constant(m_, c_f_ / m_);
  }

 private:
  int m_;
  std::vector<int> variable_index_;
  Eigen::VectorXd fixed_;  // full length, zeros at variable slots
  double c_f_ = 1.0;
  Eigen::MatrixXd basis_;
};

/// Decision rule over chart coordinates: invert the embedding, clamp float
/// dust, classify with TOPSIS. Points outside the simplex map to the
/// reserved class 0, which the pipeline treats as outside the domain.
inline std::function<int(const Vec2&)> mcda_classifier(const PerformanceMatrix& pm,
                                                       const SimplexEmbedding& embedding) {
  if (embedding.variable_count() != 3)
    throw std::invalid_argument("mcda_classifier: 2D charts need 3 variable weights");
  return [pm, embedding](const Vec2& p) {
    Eigen::VectorXd chart(2);
    chart << p[0], p[1];
    Eigen::VectorXd w = embedding.invert(chart);
    for (int k : embedding.variable_index()) {
      if (w[k] < -1e-12) return 0;
      if (w[k] < 0) w[k] = 0.0;
    }
    return topsis_decide(pm, w);
  };
}

/// Radius of the largest 256-gon around the center that avoids every
/// boundary polyline, found by bisection on the radius. A center on or
/// outside its region yields zero.
inline double robustness_radius(const std::vector<Polyline2>& boundaries, const Vec2& center,
                                double r_max) {
  std::vector<std::pair<Vec2, Vec2>> segments;
  for (const auto& line : boundaries) {
    const std::size_t n = line.vertices.size();
    if (n < 2) continue;
    const std::size_t count = line.closed ? n : n - 1;
    for (std::size_t k = 0; k < count; ++k)
      segments.emplace_back(line.vertices[k], line.vertices[(k + 1) % n]);
  }
  if (segments.empty()) return r_max;

  constexpr int kSides = 256;
  std::vector<Vec2> unit(kSides);
  for (int k = 0; k < kSides; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kSides;
    unit[k] = Vec2(std::cos(th), std::sin(th));
  }

  auto segments_intersect = [](const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
      const double v = (q - p)[0] * (r - p)[1] - (q - p)[1] * (r - p)[0];
      return v > 0 ? 1 : (v < 0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
      return std::min(p[0], q[0]) <= r[0] && r[0] <= std::max(p[0], q[0]) &&
             std::min(p[1], q[1]) <= r[1] && r[1] <= std::max(p[1], q[1]);
    };
    if (o1 == 0 && on(a, b, c)) return true;
    if (o2 == 0 && on(a, b, d)) return true;
    if (o3 == 0 && on(c, d, a)) return true;
    if (o4 == 0 && on(c, d, b)) return true;
    return false;
  };

  auto collides = [&](double r) {
    // a vertex of some boundary inside the polygon counts as a collision
    // even without an edge crossing
    const double inradius = r * std::cos(std::numbers::pi / kSides);
    for (const auto& [a, b] : segments) {
      if ((a - center).norm() <= inradius || (b - center).norm() <= inradius) return true;
    }
    for (int k = 0; k < kSides; ++k) {
      const Vec2 pa = center + r * unit[k];
      const Vec2 pb = center + r * unit[(k + 1) % kSides];
      for (const auto& [a, b] : segments) {
        if (segments_intersect(pa, pb, a, b)) return true;
      }
    }
    return false;
  };

  if (collides(0.0) || collides(1e-12)) return 0.0;
  if (!collides(r_max)) return r_max;
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (collides(mid))
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

}  // namespace faultscout
