#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace recmle {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256++ generator. State is seeded through splitmix64 so that nearby
/// seeds give unrelated streams.
///
/// Replication k of a run with master seed s must draw from substream(s, k):
/// the stream is a pure function of (s, k), never of thread or schedule, which
/// is what makes simulation output identical across parallelism widths.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = detail::splitmix64_next(s);
  }

  /// Deterministic per-replication stream: mixes the stream index into the
  /// seeding path so substream(s, 0), substream(s, 1), ... are decorrelated.
  static Xoshiro256pp substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    const std::uint64_t seed_mix = detail::splitmix64_next(s);
    s = seed_mix ^ (stream * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL);
    Xoshiro256pp g;
    for (auto& w : g.state_) w = detail::splitmix64_next(s);
    return g;
  }

  std::uint64_t next() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  std::uint64_t operator()() { return next(); }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform draw in the open interval (0, 1): top 53 bits, offset by half a
  /// step. Never returns 0 or 1, so log() of a draw is always finite.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate (inverse CDF on a (0,1) uniform).
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  Xoshiro256pp() = default;

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace recmle
