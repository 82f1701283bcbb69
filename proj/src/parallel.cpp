#include "jmdm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace jmdm {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int cap = g_max_threads.load();
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  return cap == 0 ? hw : std::min(cap, hw);
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& fn) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::min(max_threads(), n);
  if (workers <= 1 || n < 2) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  fn(begin, std::min(end, begin + chunk));
  for (auto& t : pool) t.join();
}

}  // namespace jmdm
