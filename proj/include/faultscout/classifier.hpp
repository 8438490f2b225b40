#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "faultscout/geometry.hpp"

namespace faultscout {

/// Per-phase counters of classifier evaluations. The total always equals the
/// number of distinct points classified so far.
struct EvalLedger {
  std::array<std::uint64_t, kPhaseCount> counts{};

  std::uint64_t operator[](Phase p) const { return counts[static_cast<int>(p)]; }
  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

namespace detail {

template <int Dim>
struct PointKey {
  std::array<std::uint64_t, Dim> bits;

  bool operator==(const PointKey&) const = default;
};

template <int Dim>
PointKey<Dim> point_key(const Vec<Dim>& p) {
  PointKey<Dim> k;
  for (int d = 0; d < Dim; ++d) k.bits[d] = std::bit_cast<std::uint64_t>(p[d]);
  return k;
}

template <int Dim>
struct PointKeyHash {
  std::size_t operator()(const PointKey<Dim>& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : k.bits) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Wraps a black-box point classifier with exact evaluation accounting and a
/// memo cache keyed on the coordinate bit patterns. Raw labels are mapped to
/// dense class ids 1..n in first-seen order; an optional raw sentinel is
/// passed through as 0 and marks points outside the effective domain.
template <int Dim>
class ClassifierHandle {
 public:
  using RawFn = std::function<int(const Vec<Dim>&)>;

  static constexpr int kOutside = 0;

  ClassifierHandle(RawFn fn, BoxDomain<Dim> box)
      : fn_(std::move(fn)), box_(box), has_outside_(false), outside_raw_(0) {}

  ClassifierHandle(RawFn fn, BoxDomain<Dim> box, int outside_raw)
      : fn_(std::move(fn)), box_(box), has_outside_(true), outside_raw_(outside_raw) {}

  const BoxDomain<Dim>& domain() const { return box_; }

  /// Classifies p, charging the given phase only if the point has not been
  /// evaluated before. Returns a dense class id (>= 1) or 0 for the outside
  /// sentinel.
  int evaluate(const Vec<Dim>& p, Phase phase) {
    if (!box_.contains(p)) {
      std::ostringstream os;
      os << "classifier evaluated outside the domain at (" << p.transpose() << ")";
      throw std::domain_error(os.str());
    }
    const auto key = detail::point_key<Dim>(p);
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    int raw = 0;
    try {
      raw = fn_(p);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "classifier failed at (" << p.transpose() << "): " << e.what();
      throw std::runtime_error(os.str());
    }
    int dense;
    if (has_outside_ && raw == outside_raw_) {
      dense = kOutside;
    } else if (auto it = raw_to_dense_.find(raw); it != raw_to_dense_.end()) {
      dense = it->second;
    } else {
      dense = static_cast<int>(dense_to_raw_.size()) + 1;
      raw_to_dense_.emplace(raw, dense);
      dense_to_raw_.push_back(raw);
    }
    cache_.emplace(key, dense);
    ledger_.counts[static_cast<int>(phase)]++;
    return dense;
  }

  /// Class of an already evaluated point; throws if it was never classified.
  /// Used by invariant checks that must not disturb the ledger.
  int cached(const Vec<Dim>& p) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(detail::point_key<Dim>(p));
    if (it == cache_.end()) throw std::logic_error("cached: point was never evaluated");
    return it->second;
  }

  bool is_cached(const Vec<Dim>& p) const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.count(detail::point_key<Dim>(p)) > 0;
  }

  EvalLedger ledger() const {
    std::lock_guard<std::mutex> lock(mu_);
    return ledger_;
  }

  std::uint64_t distinct_points() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
  }

  int class_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<int>(dense_to_raw_.size());
  }

  /// Raw label behind a dense id.
  int raw_label(int dense) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (dense < 1 || dense > static_cast<int>(dense_to_raw_.size()))
      throw std::out_of_range("raw_label: unknown dense class id");
    return dense_to_raw_[dense - 1];
  }

  std::vector<int> class_map() const {
    std::lock_guard<std::mutex> lock(mu_);
    return dense_to_raw_;
  }

 private:
  RawFn fn_;
  BoxDomain<Dim> box_;
  bool has_outside_;
  int outside_raw_;

  mutable std::mutex mu_;
  std::unordered_map<detail::PointKey<Dim>, int, detail::PointKeyHash<Dim>> cache_;
  std::unordered_map<int, int> raw_to_dense_;
  std::vector<int> dense_to_raw_;
  EvalLedger ledger_;
};

}  // namespace faultscout
