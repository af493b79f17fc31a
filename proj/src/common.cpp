#include "dedi/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace dedi {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int64_t Rng::below(int64_t n) {
  if (n <= 0) throw std::invalid_argument("Rng::below: n must be positive");
  uint64_t un = static_cast<uint64_t>(n);
  uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = u64();
  } while (x >= limit);
  return static_cast<int64_t>(x % un);
}

uint64_t fnv1a(const void* bytes, size_t n) {
  Fnv1a h;
  h.update(bytes, n);
  return h.digest();
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

int thread_count() {
  static int n = [] {
    if (const char* env = std::getenv("DEDI_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return std::min(v, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
  }();
  return n;
}

void parallel_for(int64_t n, int64_t grain,
                  const std::function<void(int64_t, int64_t)>& body) {
  if (n <= 0) return;
  int workers = thread_count();
  if (grain < 1) grain = 1;
  if (workers <= 1 || n < 2 * grain) {
    body(0, n);
    return;
  }
  int64_t chunks = std::min<int64_t>(workers, (n + grain - 1) / grain);
  int64_t per = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(chunks - 1));
  for (int64_t c = 1; c < chunks; ++c) {
    int64_t lo = c * per;
    int64_t hi = std::min(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(0, std::min(n, per));
  for (auto& t : pool) t.join();
}

}  // namespace dedi
