#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gridlang {

// splitmix64 step; used to derive independent stream seeds.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. std::mt19937_64 is fully specified by the
// standard; the bounded draws below avoid std::uniform_int_distribution,
// whose output is implementation-defined and so not reproducible across
// toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  size_t index(size_t n) { return static_cast<size_t>(below(n)); }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), in draw order. Requires k <= n.
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + index(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  // Derived stream; stable in (seed, salt), independent of draw position.
  Rng child(uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace gridlang
