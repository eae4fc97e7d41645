#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace wiretap {

// Splits [0, count) into `workers` contiguous chunks and runs
// fn(chunk_index, begin, end) on each, one thread per chunk. Callers merge
// per-chunk results in chunk order, which makes reductions independent of
// the worker count.
template <class Fn>
void parallel_chunks(std::uint64_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  if (workers < 1) workers = 1;
  const std::uint64_t w = std::min<std::uint64_t>(workers, count);
  if (w <= 1) {
    fn(0, std::uint64_t{0}, count);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(w));
  const std::uint64_t base = count / w, extra = count % w;
  std::uint64_t begin = 0;
  for (std::uint64_t c = 0; c < w; ++c) {
    const std::uint64_t len = base + (c < extra ? 1 : 0);
    const std::uint64_t end = begin + len;
    threads.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    begin = end;
  }
  for (auto& t : threads) t.join();
}

}  // namespace wiretap
