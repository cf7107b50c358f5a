#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace cfsim {

// Counter-based pseudo-random streams built on the SplitMix64 finalizer.
//
// The simulator draws randomness from many logically independent streams
// (RRH positions, UE positions, association shuffles, per-link fading,
// pilot noise, ...).  Instead of one global generator whose consumption
// order would couple unrelated parts of the simulation, every stream is
// identified by a small integer path hashed into a 64-bit key.  Streams
// can be created in any order, on any thread, at O(1) cost, and the value
// sequence of a stream depends only on (master seed, path) -- never on
// how many values other streams have consumed.  This is what makes runs
// reproducible under --threads N for any N.

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Finalizer from the SplitMix64 generator (Steele, Lea, Flood 2014).
// Bijective on 64-bit values with good avalanche behaviour.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// A single pseudo-random stream: SplitMix64 with a per-stream key folded
// into the state increment.  Cheap to construct and to copy.
class RngStream {
 public:
  RngStream() : state_(0) {}
  explicit RngStream(std::uint64_t key) : state_(detail::mix64(key)) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform double in [0, 1).  Uses the top 53 bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).  Lemire's multiply-shift rejection method.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller.  Two independent N(0,1) values per
  // call pair; the spare is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // Circularly-symmetric complex normal CN(0, 1): real and imaginary
  // parts are independent N(0, 1/2).
  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  // Uniformly random permutation of {0, ..., n-1} via Fisher-Yates.
  // Hand-rolled rather than std::shuffle, whose value sequence is
  // implementation-defined and would break cross-platform reproducibility.
  std::vector<int> permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(bounded(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Derives the key of a sub-stream from a master seed and an integer path.
// Hash chain: each path element is absorbed with mix64, so
// derive_stream(s, {a, b}) != derive_stream(s, {b, a}) and extending a
// path never collides with its prefix.
inline std::uint64_t derive_stream(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix64(master ^ detail::kGolden);
  for (std::uint64_t p : path) {
    h = detail::mix64(h ^ (p + detail::kGolden));
  }
  return h;
}

// Stream tags: the first path element names the purpose of the stream.
namespace stream_tag {
inline constexpr std::uint64_t kRrhPositions = 1;
inline constexpr std::uint64_t kUePositions = 2;
inline constexpr std::uint64_t kAssociation = 3;
inline constexpr std::uint64_t kFading = 4;
inline constexpr std::uint64_t kPilotNoise = 5;
}  // namespace stream_tag

}  // namespace cfsim
