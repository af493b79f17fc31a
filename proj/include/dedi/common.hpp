#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dedi {

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 has a bit-exact output sequence by the
// standard; the uniform/normal mappings are our own so results do not depend
// on libstdc++'s distribution internals.
// ---------------------------------------------------------------------------

uint64_t splitmix64(uint64_t x);

// Derives an independent stream seed from (seed, salt).
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  return splitmix64(seed ^ (salt * 0x9E3779B97F4A7C15ULL));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1), safe as a log argument.
  double uniform_pos() {
    return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (no cached spare, one value per pair).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  float normalf() { return static_cast<float>(normal()); }

  // Uniform integer in [0, n), unbiased.
  int64_t below(int64_t n);

  // Standard Gumbel: -log(-log U).
  double gumbel() { return -std::log(-std::log(uniform_pos())); }

  Rng fork(uint64_t salt) { return Rng(derive_seed(u64(), salt)); }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit, used for checkpoint checksums and component weight hashes.
// ---------------------------------------------------------------------------

struct Fnv1a {
  uint64_t state = 0xCBF29CE484222325ULL;
  void update(const void* bytes, size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x00000100000001B3ULL;
    }
  }
  uint64_t digest() const { return state; }
};

uint64_t fnv1a(const void* bytes, size_t n);
std::string hex64(uint64_t v);

// ---------------------------------------------------------------------------
// Deterministic parallel helper. Each index is processed by exactly one
// worker with the same per-index code path, so results do not depend on the
// worker count. Grain keeps tiny loops on the calling thread.
// ---------------------------------------------------------------------------

int thread_count();
void parallel_for(int64_t n, int64_t grain,
                  const std::function<void(int64_t, int64_t)>& body);
inline void parallel_for(int64_t n,
                         const std::function<void(int64_t, int64_t)>& body) {
  parallel_for(n, 1024, body);
}

}  // namespace dedi
