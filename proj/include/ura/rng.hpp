#pragma once

#include <cmath>
#include <cstdint>

// Deterministic RNG utilities. Everything here is seeded explicitly and
// produces the same stream on every platform: simulation results must be a
// pure function of the configured seeds, including under multithreading.

namespace ura {

// Finalizer from the splitmix64 generator; also used as a one-shot hash.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for an independent substream (e.g. one dictionary section).
inline uint64_t substream_seed(uint64_t seed, uint64_t stream_id) {
  return mix64(seed ^ mix64(stream_id + 0x517cc1b727220a95ull));
}

// Per-trial seed chain: hash(master_seed, cell_index, trial_index).
inline uint64_t chain_seed(uint64_t master, uint64_t a, uint64_t b) {
  return mix64(substream_seed(master, a) ^ mix64(b + 0xd1b54a32d192ed03ull));
}

// splitmix64 stream with Box-Muller normals layered on top.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  // Unbiased integer in [0, bound) by rejection.
  uint32_t next_below(uint32_t bound) {
    const uint64_t lim = uint64_t(-1) - uint64_t(-1) % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= lim);
    return static_cast<uint32_t>(x % bound);
  }

  // Standard normal via Box-Muller; generates pairs, caches the second one.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace ura
