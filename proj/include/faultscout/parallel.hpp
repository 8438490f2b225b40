#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace faultscout {

/// Worker cap from FAULTSCOUT_THREADS; 0 or unset means automatic.
inline unsigned thread_cap() {
  static const unsigned cap = [] {
    const char* env = std::getenv("FAULTSCOUT_THREADS");
    if (env) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1u;
  }();
  return cap;
}

/// Index-parallel loop over pure work items. Results must be written to
/// per-index slots so the outcome is independent of the schedule; classifier
/// evaluations stay out of here to keep their order deterministic.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace faultscout
