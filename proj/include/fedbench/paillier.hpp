#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>

#include "fedbench/bytes.hpp"
#include "fedbench/rng.hpp"

namespace fedbench::he {

// Fixed-point encoding base. A value x is stored as mantissa * 16^exponent
// with the mantissa reduced into [0, modulus). Mantissas below modulus/3
// are positive, above 2*modulus/3 negative, and the middle third is
// reserved so overflow is detected instead of silently wrapping.
inline constexpr int kEncodingBase = 16;

struct EncodedNumber {
  mpz_class mantissa;
  int32_t exponent = 0;
};

struct PublicKey {
  mpz_class modulus;    // n = p * q
  mpz_class generator;  // fixed to n + 1
  int key_bits = 0;

  // Derived values, filled by create().
  mpz_class modulus_squared;
  mpz_class max_mantissa;  // largest magnitude outside the reserved third
  Fingerprint fingerprint{};

  static PublicKey create(const mpz_class& modulus, int key_bits);
};

struct PrivateKey {
  mpz_class prime_p;
  mpz_class prime_q;
  mpz_class decrypt_exponent;  // lcm(p-1, q-1)
  mpz_class decrypt_scaler;    // decrypt_exponent^-1 mod n, valid for g = n+1
  PublicKey public_key;
};

struct KeyPair {
  PublicKey pk;
  PrivateKey sk;
};

struct Ciphertext {
  mpz_class raw;  // element of [0, n^2)
  int32_t exponent = 0;
  Fingerprint key_fingerprint{};
};

// Deterministic keypair of the requested size. key_bits must be >= 64;
// primes get key_bits/2 bits each.
KeyPair keygen(int key_bits, uint64_t rng_seed);

// Test hook: build a keypair from caller-chosen primes (any size).
KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q);

// Fixed-exponent encoding of a real. The representation error is at most
// half of 16^exponent; doubles of ordinary magnitude encode exactly once
// 16^exponent is below their last bit.
EncodedNumber encode(const PublicKey& pk, double value, int32_t exponent);
// Integers encode exactly at exponent 0.
EncodedNumber encode_integer(const PublicKey& pk, long value);
double decode(const PublicKey& pk, const EncodedNumber& e);

// Mantissa interpreted as a signed integer. Throws OverflowError if it
// falls in the reserved middle third.
mpz_class signed_mantissa(const PublicKey& pk, const mpz_class& mantissa);

// Exact mantissa-level arithmetic on plaintexts (used for mask removal;
// going through doubles would lose the low bits).
EncodedNumber add_encoded(const PublicKey& pk, const EncodedNumber& a, const EncodedNumber& b);
EncodedNumber sub_encoded(const PublicKey& pk, const EncodedNumber& a, const EncodedNumber& b);

Ciphertext encrypt(const PublicKey& pk, const EncodedNumber& value, BigRng& rng);
Ciphertext encrypt(const PublicKey& pk, const EncodedNumber& value, uint64_t rng_seed);
// Test hook: encryption with explicit randomness r in (0, n).
Ciphertext encrypt_with_randomness(const PublicKey& pk, const EncodedNumber& value,
                                   const mpz_class& r);

EncodedNumber decrypt(const PrivateKey& sk, const Ciphertext& c);

// Homomorphic sum. Exponents are aligned downward first, so the result
// carries the smaller of the two exponents.
Ciphertext add_cipher(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);

// Plaintext-by-ciphertext product; result exponent is the sum of the two.
Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, const EncodedNumber& k);

// Rescale so both ciphertexts share the minimum exponent. Decoded values
// are unchanged.
std::pair<Ciphertext, Ciphertext> align_exponents(const PublicKey& pk, const Ciphertext& a,
                                                  const Ciphertext& b);
Ciphertext decrease_exponent(const PublicKey& pk, const Ciphertext& c, int32_t new_exponent);

// Canonical wire formats: big-endian magnitudes with 4-byte length
// prefixes, signed 4-byte big-endian exponents, 32-byte key fingerprints.
void put_mpz(Bytes& out, const mpz_class& v);
mpz_class read_mpz(ByteReader& in);

Bytes serialize(const PublicKey& pk);
PublicKey deserialize_public_key(const Bytes& data);
Bytes serialize(const PrivateKey& sk);
PrivateKey deserialize_private_key(const Bytes& data);
Bytes serialize(const Ciphertext& c);
Ciphertext deserialize_ciphertext(const Bytes& data);
void put_ciphertext(Bytes& out, const Ciphertext& c);
Ciphertext read_ciphertext(ByteReader& in);
void put_encoded(Bytes& out, const EncodedNumber& e);
EncodedNumber read_encoded(ByteReader& in);

}  // namespace fedbench::he
