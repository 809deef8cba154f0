#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vanet {

// splitmix64; used to derive independent seeds from a root seed plus tags.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x6a09e667f3bcc908ULL;
  for (uint64_t p : parts) h = mix64(h ^ p);
  return h;
}

// Thin wrapper over mt19937_64. std::uniform_*_distribution is
// implementation-defined, so all draws go through these helpers to keep
// traces byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // [0, n); n > 0. Modulo bias is < 2^-53 for the ranges used here.
  uint64_t below(uint64_t n) { return next() % n; }

  // [0, 1) with 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices out of [0, n), ascending.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  std::mt19937_64 eng_;
};

inline std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  if (k > n) k = n;
  std::vector<size_t> all(n);
  for (size_t i = 0; i < n; ++i) all[i] = i;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace vanet
