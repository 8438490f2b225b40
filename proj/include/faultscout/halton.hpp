#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "faultscout/classifier.hpp"
#include "faultscout/geometry.hpp"

namespace faultscout {

/// Radical inverse of index in the given base. Indexing starts at 1; index 0
/// would map to the corner of the domain.
inline double halton(std::uint64_t index, unsigned base) {
  if (index < 1) throw std::invalid_argument("halton: index must be >= 1");
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

template <int Dim>
Vec<Dim> halton_point(std::uint64_t index) {
  static constexpr std::array<unsigned, 3> bases{2, 3, 5};
  Vec<Dim> u;
  for (int d = 0; d < Dim; ++d) u[d] = halton(index, bases[d]);
  return u;
}

/// First n Halton points mapped affinely into the box and classified.
template <int Dim>
std::vector<LabeledPoint<Dim>> initial_set(const BoxDomain<Dim>& box, std::size_t n,
                                           ClassifierHandle<Dim>& h) {
  std::vector<LabeledPoint<Dim>> out;
  out.reserve(n);
  const Vec<Dim> span = box.extent();
  for (std::uint64_t i = 1; i <= n; ++i) {
    const Vec<Dim> u = halton_point<Dim>(i);
    const Vec<Dim> p = box.lower + u.cwiseProduct(span);
    out.push_back({p, h.evaluate(p, Phase::InitialSet)});
  }
  return out;
}

/// Like initial_set, but points failing the predicate are dropped before
/// classification and therefore never touch the ledger.
template <int Dim>
std::vector<LabeledPoint<Dim>> filtered_initial_set(
    const BoxDomain<Dim>& box, std::size_t n, ClassifierHandle<Dim>& h,
    const std::function<bool(const Vec<Dim>&)>& keep) {
  std::vector<LabeledPoint<Dim>> out;
  const Vec<Dim> span = box.extent();
  for (std::uint64_t i = 1; i <= n; ++i) {
    const Vec<Dim> p = box.lower + halton_point<Dim>(i).cwiseProduct(span);
    if (!keep(p)) continue;
    out.push_back({p, h.evaluate(p, Phase::InitialSet)});
  }
  return out;
}

}  // namespace faultscout
