#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

// Deterministic randomness helpers. std::mt19937_64 has a fully specified
// output sequence, and every draw below is built from raw engine words, so
// identical seeds give identical results on every platform. (The std::
// distributions are implementation-defined and are deliberately avoided.)
namespace jmdm::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a salt into a seed; chain calls to derive independent streams
// (fold index, method name, restart number, ...) from one master seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (salt + 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view salt) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : salt) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive(seed, h);
}

// Unbiased integer in [0, n) by rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - n + 1;
  const std::uint64_t threshold = limit % n;
  for (;;) {
    std::uint64_t x = gen();
    if (x >= threshold) return x % n;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[uniform_below(gen, i)]);
}

// k distinct indices from [0, n), in random order.
inline std::vector<int> sample_without_replacement(int n, int k,
                                                   std::mt19937_64& gen) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + uniform_below(gen, n - i)]);
  pool.resize(k);
  return pool;
}

}  // namespace jmdm::rng
