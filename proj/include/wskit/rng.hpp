#pragma once

#include <cmath>
#include <cstdint>

// Deterministic RNG for every stochastic stage. Algorithm: SplitMix64
// (Steele, Lea & Flood 2014), a counter-based 64-bit mixer. Chosen over the
// std engines+distributions because libstdc++ distribution output is
// implementation-defined; this keeps seeded runs byte-identical everywhere.
//
// Stream derivation: a single user seed governs a whole pipeline run; each
// stochastic stage draws from derive_seed(seed, stage_id), so rerunning one
// stage in isolation reproduces exactly what the pipeline did.
namespace wskit {

namespace stage {
inline constexpr std::uint64_t mmpp_generate = 1;
inline constexpr std::uint64_t pareto_generate = 2;
inline constexpr std::uint64_t random_access = 3;
inline constexpr std::uint64_t calibrate_x_base = 0x100;  // + grid index
}  // namespace stage

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed + stream * 0x9E3779B97F4A7C15ull;
  (void)splitmix64_next(s);
  return s;
}

class rng {
 public:
  explicit rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform on (0,1), both endpoints excluded so log() below is safe
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // strictly positive exponential draw
  double exponential(double rate) { return -std::log(next_double()) / rate; }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace wskit
