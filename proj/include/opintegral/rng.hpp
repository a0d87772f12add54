#pragma once

#include <cstdint>

#include "opintegral/types.hpp"

namespace opintegral {

// xorshift64* (Vigna 2014): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
// The state is seeded through one splitmix64 step so that seed 0 is usable.
// Every random quantity in the library is drawn from this generator so that
// seeded runs reproduce across platforms and implementations.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; the second variate is cached.
  double normal();
  Complex complex_normal();
  int uniform_int(int lo, int hi_inclusive);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derive an independent per-trial seed from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

CMatrix random_complex_gaussian(int rows, int cols, Xorshift64Star& rng);
// (G + G*)/2 with G complex Gaussian.
CMatrix random_hermitian(int n, Xorshift64Star& rng);
// Q factor of a complex Gaussian matrix, phases fixed so the result is Haar.
CMatrix random_unitary(int n, Xorshift64Star& rng);

}  // namespace opintegral
