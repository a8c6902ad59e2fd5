#pragma once
// Deterministic data-parallel helpers. Work is partitioned by index into
// fixed chunks; chunk results are combined sequentially in index order, so
// every reduction is bit-identical for every thread count. Thread count
// resolution: explicit argument > thread_override() > SKEWSHIFT_THREADS env
// variable > hardware concurrency.

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "skewshift/base.hpp"

namespace skewshift {

// Process-wide override, used by tests that compare thread counts.
inline int& thread_override() {
  static int v = 0;
  return v;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (thread_override() > 0) return thread_override();
  if (const char* env = std::getenv("SKEWSHIFT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// fn(i) for i in [0,n); each index independent of all others.
template <class Fn>
void parallel_for(i64 n, Fn&& fn, int threads = 0) {
  int nt = resolve_threads(threads);
  if (nt <= 1 || n < 2) {
    for (i64 i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<i64> next{0};
  const i64 block = std::max<i64>(1, n / (8 * nt));
  auto work = [&] {
    for (;;) {
      i64 b = next.fetch_add(block);
      if (b >= n) return;
      i64 e = std::min(n, b + block);
      for (i64 i = b; i < e; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

// Partial results per fixed-size chunk, folded in chunk order. The chunk
// grid depends only on (n, chunk), so the folded value is reproducible.
template <class Partial, class Worker, class Combine>
Partial chunked_reduce(i64 n, i64 chunk, Partial init, Worker&& worker,
                       Combine&& combine, int threads = 0) {
  if (n <= 0) return init;
  chunk = std::max<i64>(1, chunk);
  const i64 nchunks = (n + chunk - 1) / chunk;
  std::vector<Partial> parts(nchunks, init);
  parallel_for(
      nchunks,
      [&](i64 c) {
        i64 b = c * chunk;
        parts[c] = worker(b, std::min(n, b + chunk));
      },
      threads);
  Partial acc = init;
  for (i64 c = 0; c < nchunks; ++c) combine(acc, parts[c]);
  return acc;
}

// out[i] = fn(i), computed in parallel.
template <class Fn>
void parallel_fill(std::vector<double>& out, Fn&& fn, int threads = 0) {
  parallel_for(
      i64(out.size()), [&](i64 i) { out[std::size_t(i)] = fn(i); }, threads);
}

}  // namespace skewshift
