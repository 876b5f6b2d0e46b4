#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace asga {

/// Seedable, splittable random stream.
///
/// A stream is identified by a 64-bit id obtained by mixing the seed words
/// passed to derive(); the generator itself is a std::mt19937_64 (fixed by
/// the C++ standard), so identical (seed, derivation path) pairs reproduce
/// the same draws on every run of the same build. Uniform and normal
/// variates are produced by explicit transforms instead of the standard
/// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : stream_(mix(0x9e3779b97f4a7c15ull, seed)), engine_(stream_) {}

  /// Independent child stream; depends only on this stream's id and the
  /// given words, never on how many draws were consumed.
  Rng derive(std::uint64_t a) const { return Rng(mix(stream_, a), tag{}); }
  Rng derive(std::uint64_t a, std::uint64_t b) const { return Rng(mix(mix(stream_, a), b), tag{}); }
  Rng derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return Rng(mix(mix(mix(stream_, a), b), c), tag{});
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Multiplicative range mapping; the bias for
  /// the population sizes used here is far below anything observable.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  /// Normal via Box-Muller on two uniforms.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t stream_id() const { return stream_; }

 private:
  struct tag {};
  Rng(std::uint64_t stream, tag) : stream_(stream), engine_(stream) {}

  // SplitMix64 finalizer over a running state; used both to whiten user
  // seeds and to combine derivation words.
  static std::uint64_t mix(std::uint64_t state, std::uint64_t word = 0x9e3779b97f4a7c15ull) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ull + word * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace asga
