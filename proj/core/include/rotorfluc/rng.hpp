#pragma once

#include <cstdint>

namespace rotorfluc {

// Counter-based stream RNG: stream i of seed s is splitmix64 iterated
// from s + (i+1)*golden, so any trajectory's draws are reproducible in
// isolation and independent of evaluation order or thread count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    state_ = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): 53 significant bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]: safe as a log() argument.
  double next_double_open_zero() { return 1.0 - next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace rotorfluc
