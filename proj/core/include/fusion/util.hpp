// util.hpp - Deterministic RNG with a platform-independent uniform mapping,
// plus FNV hashing for instance fingerprints. Certificates record seeds, so
// draws must replay bit-identically everywhere; std::uniform_real_distribution
// is implementation-defined and is deliberately avoided.
#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace fusion {

class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with exactly 53 random bits: (x >> 11) * 2^-53.
  double next_unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1, 1).
  double next_sym() { return 2.0 * next_unit() - 1.0; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace fusion
