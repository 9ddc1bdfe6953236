#pragma once

#include <cstdint>

namespace mcvrr {

// SplitMix64: Weyl-sequence state with a murmur-style finalizer. Fast,
// platform-independent, and trivially splittable into substreams, which is
// what replication-level parallel sampling needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Seed for the i-th independent replication stream: the (i+1)-th output of a
// SplitMix64 seeded with `seed`, computed by direct skip-ahead. Every
// replication gets the same seed no matter how work is split across threads.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t i) {
  SplitMix64 g(seed + i * 0x9E3779B97F4A7C15ULL);
  return g.next();
}

}  // namespace mcvrr
