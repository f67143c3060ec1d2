#ifndef PHYLOSMC_RNG_HPP
#define PHYLOSMC_RNG_HPP

#include <cstdint>
#include <random>

namespace phylosmc {

// splitmix64 finalizer (Steele, Lea & Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives the seed for run `run` of a batch from the master seed. This mapping
// is part of the reproducibility contract: independent streams are obtained by
// advancing a splitmix64 state by (run + 1) increments and finalizing.
inline std::uint64_t run_seed(std::uint64_t master, std::uint64_t run) {
  return mix64(master + (run + 1) * 0x9e3779b97f4a7c15ULL);
}

// Random stream owned by a single caller at a time.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1).
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as input to log().
  double uniform_pos() { return ((gen_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace phylosmc

#endif
