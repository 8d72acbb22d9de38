#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace scsparc {

// splitmix64 finalizer, used to derive independent streams from
// (master_seed, purpose tag, indices).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = mix64(master);
  for (char ch : tag) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(ch)));
  for (std::uint64_t idx : indices) h = mix64(h ^ idx);
  return h;
}

// Seeded stream with a fixed Gaussian sampler (Box-Muller), so sequences do
// not depend on the standard library's normal_distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng stream(std::uint64_t master, std::string_view tag,
                    std::initializer_list<std::uint64_t> indices = {}) {
    return Rng(derive_seed(master, tag, indices));
  }

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // k distinct values from {lo, lo+1, ..., hi-1}, partial Fisher-Yates.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t lo, std::uint32_t hi,
                                                        std::size_t k) {
    std::vector<std::uint32_t> pool(hi - lo);
    for (std::uint32_t i = 0; i < hi - lo; ++i) pool[i] = lo + i;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace scsparc
