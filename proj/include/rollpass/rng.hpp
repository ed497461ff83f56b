#pragma once

#include <cstdint>

namespace rollpass {

// Counter-based random stream built on the splitmix64 finalizer.
// Draw i of stream (seed, stream_id) is mix(base + (i+1)*GOLDEN) where
// base itself is a mix of seed and stream_id, so a stream is a pure
// function of (seed, stream_id, counter) and reproduces identically on
// every platform. state_key() is a resume token: a stream built with
// from_key(k) continues the draw sequence of the stream that reported k.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id), counter_(0) {
    base_ = mix(mix(seed + kGolden) ^ mix(stream_id + kSalt));
  }

  static RngStream from_key(std::uint64_t key) {
    RngStream r(0, 0);
    r.base_ = key;
    r.counter_ = 0;
    return r;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  // Token that replays the remaining draw sequence from the current position.
  std::uint64_t state_key() const { return base_ + counter_ * kGolden; }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(base_ + counter_ * kGolden);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Uniform integer on [0, n), n >= 1. Multiply-shift bounding.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSalt = 0xbf58476d1ce4e5b9ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
  std::uint64_t base_;
};

}  // namespace rollpass
