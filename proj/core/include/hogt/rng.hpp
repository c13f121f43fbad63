#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hogt {

std::uint64_t splitmix64(std::uint64_t& state);
// Single-step mix of x (does not advance anything).
std::uint64_t splitmix64_mix(std::uint64_t x);
// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound);
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hogt
