#pragma once

#include <cstdint>
#include <random>

namespace toruslab {

/// SplitMix64 finalizer; used only to derive well-separated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Random stream keyed by (master seed, trial index). The same key always
/// reproduces the same draws, independent of how trials are scheduled.
class ShuffleStream {
 public:
  ShuffleStream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0)
      : seed_(seed), index_(index), tag_(tag) {
    const std::uint64_t a = mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
    const std::uint64_t b = mix64(a ^ mix64(tag + 0x85157af5ULL));
    engine_.seed(mix64(a ^ (b << 1 | b >> 63)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  /// Independent child stream sharing this stream's key.
  ShuffleStream substream(std::uint64_t tag) const {
    return ShuffleStream(seed_, index_, mix64(tag_ * 0x9e3779b97f4a7c15ULL + tag + 1));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t tag_;
  std::mt19937_64 engine_;
};

}  // namespace toruslab
