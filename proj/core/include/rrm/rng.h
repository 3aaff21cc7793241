#pragma once

#include <cstdint>
#include <limits>

namespace rrm {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based, splittable 64-bit stream. The i-th output is a pure
/// function of (key, i), so streams can be replayed from a copy and child
/// streams derived from (key, tag) are independent of the order in which
/// they are requested. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    return mix64(key_ + 0x9E3779B97F4A7C15ULL * (++counter_));
  }

  /// Child stream keyed by `tag`; does not advance this stream.
  RngStream split(std::uint64_t tag) const {
    return RngStream(mix64(key_ ^ mix64(tag + 0xD1B54A32D192ED03ULL)));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rrm
