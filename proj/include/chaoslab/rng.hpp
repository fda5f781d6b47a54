#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace chaoslab {

// Name recorded in output metadata for the Gaussian generator in use.
inline constexpr std::string_view kGaussianMethod = "xoshiro256** + boost ziggurat";

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Derives a stream id from a master seed and a path of integers. Distinct
// paths give statistically independent streams.
inline std::uint64_t derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  SplitMix64 sm(master ^ 0x6A09E667F3BCC909ULL);
  std::uint64_t h = sm.next();
  for (std::uint64_t p : path) {
    SplitMix64 step(h ^ (p * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
    h = step.next();
  }
  return h;
}

// Identifies one reproducible random stream: the user-facing master seed
// plus the derived stream id.
struct SeedRecord {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  SeedRecord child(std::initializer_list<std::uint64_t> path) const {
    SeedRecord out{master, stream};
    SplitMix64 sm(stream);
    std::uint64_t h = sm.next();
    for (std::uint64_t p : path) {
      SplitMix64 step(h ^ (p * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
      h = step.next();
    }
    out.stream = h;
    return out;
  }

  static SeedRecord from_master(std::uint64_t master) { return SeedRecord{master, derive_stream(master, {})}; }

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

// xoshiro256** satisfying UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5ULL, 7) * 9ULL;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

class Rng {
 public:
  explicit Rng(const SeedRecord& seed) : engine_(seed.stream) {}

  double gaussian() { return normal_(engine_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  Xoshiro256& engine() { return engine_; }

 private:
  Xoshiro256 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace chaoslab
