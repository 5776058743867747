#ifndef DYADIC_RNG_HPP
#define DYADIC_RNG_HPP

#include <cstdint>

namespace dyadic {

// splitmix64 step, used for seeding and for deriving independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. Small, fast, and fully deterministic:
// every draw is plain integer arithmetic, so sequences are reproducible
// across compilers (unlike the std:: distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  // Derives the substream `counter` of a master seed. Substreams with
  // distinct counters are statistically independent for our purposes.
  static Rng substream(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t sm = master ^ (0x9e3779b97f4a7c15ULL * (counter + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // +1 or -1 with equal probability.
  int sign() { return (next() >> 63) ? 1 : -1; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Multiply-shift rejection-free mapping; bias is negligible for n << 2^64.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace dyadic

#endif
