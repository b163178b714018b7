#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace fedbench {

// Deterministic big-integer RNG (GMP Mersenne twister). Every randomized
// operation in the library takes an explicit seed so runs are replayable.
class BigRng {
 public:
  explicit BigRng(uint64_t seed) : state_(gmp_randinit_mt) {
    state_.seed(static_cast<unsigned long>(seed));
  }

  // Uniform in [0, bound).
  mpz_class below(const mpz_class& bound) { return state_.get_z_range(bound); }

  // Uniform with exactly `bits` random bits.
  mpz_class bits(unsigned long n) { return state_.get_z_bits(n); }

 private:
  gmp_randclass state_;
};

// splitmix64; used to derive independent sub-seeds from one run seed.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream));
}

}  // namespace fedbench
