#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace graphpde::detail {

/// Runs fn(i) for i in [0, count) over at most `threads` workers.  Work is
/// split into contiguous chunks; fn must be safe to call concurrently.
template <typename Fn>
void parallel_for(long count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads < 1) threads = 1;
  long workers = std::min<long>(threads, count);
  if (workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (count + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    long begin = w * chunk;
    long end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (long i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Stateless seed mixer for per-trial generators.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace graphpde::detail
