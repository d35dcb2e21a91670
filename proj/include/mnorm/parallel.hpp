#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#ifdef MNORM_HAVE_OPENMP
#include <omp.h>
#endif

namespace mn {

// Worker count used by the parallel loops below. 0 = library default
// (hardware threads as OpenMP sees them), 1 = serial reference path.
// The two paths must produce byte-identical results; tests compare them.
inline int& parallel_workers_slot() {
  static int w = 1;
  return w;
}

inline int parallel_workers() { return parallel_workers_slot(); }

inline void set_parallel_workers(int workers) {
#ifdef MNORM_HAVE_OPENMP
  parallel_workers_slot() = workers < 0 ? 0 : workers;
#else
  (void)workers;
  parallel_workers_slot() = 1;
#endif
}

// Runs body(i) for i in [0, count). Iterations must be independent; any
// shared accumulation happens after the loop, indexed by i.
template <class Body>
void par_for(std::int64_t count, Body&& body) {
#ifdef MNORM_HAVE_OPENMP
  if (parallel_workers() != 1 && count > 1) {
    const int w = parallel_workers();
    const int threads = w > 0 ? w : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

// Returns the smallest i in [0, count) with pred(i) true, or nullopt. The
// winner is the minimal such index regardless of thread timing, which keeps
// parallel runs byte-identical to serial ones. In parallel mode pred may be
// evaluated past the eventual winner, so callers that produce a value inside
// pred must stash it per index and read back the winner's slot.
template <class Pred>
std::optional<std::int64_t> par_first_success(std::int64_t count, Pred&& pred) {
#ifdef MNORM_HAVE_OPENMP
  if (parallel_workers() != 1 && count > 1) {
    std::atomic<std::int64_t> best{count};
    const int w = parallel_workers();
    const int threads = w > 0 ? w : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i) {
      if (i >= best.load(std::memory_order_relaxed)) continue;
      if (pred(i)) {
        std::int64_t cur = best.load(std::memory_order_relaxed);
        while (i < cur && !best.compare_exchange_weak(
                              cur, i, std::memory_order_relaxed)) {
        }
      }
    }
    std::int64_t r = best.load();
    return r == count ? std::nullopt : std::optional<std::int64_t>(r);
  }
#endif
  for (std::int64_t i = 0; i < count; ++i)
    if (pred(i)) return i;
  return std::nullopt;
}

}  // namespace mn
