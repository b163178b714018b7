#include "fedbench/paillier.hpp"

#include <cmath>
#include <cstring>

#include "fedbench/errors.hpp"

namespace fedbench::he {

namespace {

bool fingerprints_equal(const Fingerprint& a, const Fingerprint& b) {
  return std::memcmp(a.data(), b.data(), a.size()) == 0;
}

void check_key(const PublicKey& pk, const Ciphertext& c) {
  if (!fingerprints_equal(pk.fingerprint, c.key_fingerprint))
    throw WrongKeyError("ciphertext does not belong to this key");
}

// True when the mantissa sits in the reserved middle third.
bool overflowed(const PublicKey& pk, const mpz_class& mantissa) {
  return mantissa > pk.max_mantissa && mantissa < pk.modulus - pk.max_mantissa;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

// Random prime with exactly `bits` bits.
mpz_class random_prime(BigRng& rng, int bits) {
  while (true) {
    mpz_class candidate = rng.bits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_nextprime(candidate.get_mpz_t(), candidate.get_mpz_t());
    if (mpz_sizeinbase(candidate.get_mpz_t(), 2) == static_cast<size_t>(bits))
      return candidate;
  }
}

}  // namespace

PublicKey PublicKey::create(const mpz_class& modulus, int key_bits) {
  PublicKey pk;
  pk.modulus = modulus;
  pk.generator = modulus + 1;
  pk.key_bits = key_bits;
  pk.modulus_squared = modulus * modulus;
  pk.max_mantissa = (modulus - 1) / 3;
  pk.fingerprint = sha256(serialize(pk));
  return pk;
}

KeyPair keygen(int key_bits, uint64_t rng_seed) {
  if (key_bits < 64)
    throw InvalidParameterError("key_bits must be at least 64, got " + std::to_string(key_bits));
  BigRng rng(rng_seed);
  const int half = key_bits / 2;
  while (true) {
    mpz_class p = random_prime(rng, half);
    mpz_class q = random_prime(rng, half);
    if (p == q) continue;
    // decryption needs lcm(p-1, q-1) invertible mod n
    mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), phi.get_mpz_t(), mpz_class(p * q).get_mpz_t());
    if (g != 1) continue;
    KeyPair kp = keygen_from_primes(p, q);
    kp.pk.key_bits = kp.sk.public_key.key_bits = key_bits;
    return kp;
  }
}

KeyPair keygen_from_primes(const mpz_class& p, const mpz_class& q) {
  if (p == q) throw InvalidParameterError("primes must be distinct");
  if (!mpz_probab_prime_p(p.get_mpz_t(), 30) || !mpz_probab_prime_p(q.get_mpz_t(), 30))
    throw InvalidParameterError("keygen_from_primes requires two primes");

  mpz_class n = p * q;
  int bits = static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2));
  PublicKey pk = PublicKey::create(n, bits);

  PrivateKey sk;
  sk.prime_p = p;
  sk.prime_q = q;
  mpz_lcm(sk.decrypt_exponent.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
          mpz_class(q - 1).get_mpz_t());
  // g = n+1 makes L(g^lambda mod n^2) = lambda mod n, so the scaler is
  // just the inverse of lambda.
  if (mpz_invert(sk.decrypt_scaler.get_mpz_t(), mpz_class(sk.decrypt_exponent % n).get_mpz_t(),
                 n.get_mpz_t()) == 0)
    throw InvalidParameterError("degenerate primes: lambda not invertible mod n");
  sk.public_key = pk;
  return KeyPair{pk, sk};
}

EncodedNumber encode(const PublicKey& pk, double value, int32_t exponent) {
  if (!std::isfinite(value))
    throw InvalidParameterError("cannot encode a non-finite value");

  // mantissa = round(value * 16^-exponent), computed exactly from the
  // binary representation so ordinary doubles never lose bits here.
  int bin_exp = 0;
  double frac = std::frexp(value, &bin_exp);  // value = frac * 2^bin_exp
  auto m53 = static_cast<long>(std::llround(std::ldexp(frac, 53)));
  mpz_class mant(m53);
  long shift = static_cast<long>(bin_exp) - 53 - 4L * exponent;
  if (shift >= 0) {
    mant <<= shift;
  } else {
    mpz_class half = mpz_class(1) << (-shift - 1);
    bool negative = mant < 0;
    mpz_class mag = abs(mant) + half;
    mant = mag >> (-shift);
    if (negative) mant = -mant;
  }

  if (abs(mant) > pk.max_mantissa)
    throw OverflowError("magnitude too large to encode at exponent " + std::to_string(exponent));
  if (mant < 0) mant += pk.modulus;
  return EncodedNumber{mant, exponent};
}

EncodedNumber encode_integer(const PublicKey& pk, long value) {
  mpz_class mant(value);
  if (abs(mant) > pk.max_mantissa) throw OverflowError("integer too large to encode");
  if (mant < 0) mant += pk.modulus;
  return EncodedNumber{mant, 0};
}

mpz_class signed_mantissa(const PublicKey& pk, const mpz_class& mantissa) {
  if (mantissa < 0 || mantissa >= pk.modulus)
    throw InvalidParameterError("mantissa outside [0, modulus)");
  if (mantissa <= pk.max_mantissa) return mantissa;
  if (mantissa >= pk.modulus - pk.max_mantissa) return mantissa - pk.modulus;
  throw OverflowError("mantissa in the reserved overflow third");
}

double decode(const PublicKey& pk, const EncodedNumber& e) {
  mpz_class s = signed_mantissa(pk, e.mantissa);
  signed long bin_exp = 0;
  double frac = mpz_get_d_2exp(&bin_exp, s.get_mpz_t());
  return std::ldexp(frac, static_cast<int>(bin_exp) + 4 * e.exponent);
}

EncodedNumber add_encoded(const PublicKey& pk, const EncodedNumber& a, const EncodedNumber& b) {
  if (a.exponent != b.exponent)
    throw InvalidParameterError("encoded addition requires matching exponents");
  return EncodedNumber{(a.mantissa + b.mantissa) % pk.modulus, a.exponent};
}

EncodedNumber sub_encoded(const PublicKey& pk, const EncodedNumber& a, const EncodedNumber& b) {
  if (a.exponent != b.exponent)
    throw InvalidParameterError("encoded subtraction requires matching exponents");
  mpz_class m = (a.mantissa - b.mantissa) % pk.modulus;
  if (m < 0) m += pk.modulus;
  return EncodedNumber{m, a.exponent};
}

Ciphertext encrypt(const PublicKey& pk, const EncodedNumber& value, BigRng& rng) {
  mpz_class r;
  mpz_class g;
  do {
    r = rng.below(pk.modulus);
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.modulus.get_mpz_t());
  } while (r == 0 || g != 1);
  return encrypt_with_randomness(pk, value, r);
}

Ciphertext encrypt(const PublicKey& pk, const EncodedNumber& value, uint64_t rng_seed) {
  BigRng rng(rng_seed);
  return encrypt(pk, value, rng);
}

Ciphertext encrypt_with_randomness(const PublicKey& pk, const EncodedNumber& value,
                                   const mpz_class& r) {
  if (value.mantissa < 0 || value.mantissa >= pk.modulus)
    throw OverflowError("mantissa exceeds modulus");
  if (r <= 0 || r >= pk.modulus)
    throw InvalidParameterError("encryption randomness must lie in (0, n)");
  // (n+1)^m = 1 + m*n (mod n^2)
  mpz_class gm = (1 + value.mantissa * pk.modulus) % pk.modulus_squared;
  mpz_class rn = powm(r, pk.modulus, pk.modulus_squared);
  return Ciphertext{gm * rn % pk.modulus_squared, value.exponent, pk.fingerprint};
}

EncodedNumber decrypt(const PrivateKey& sk, const Ciphertext& c) {
  const PublicKey& pk = sk.public_key;
  check_key(pk, c);
  mpz_class x = powm(c.raw, sk.decrypt_exponent, pk.modulus_squared);
  mpz_class l = (x - 1) / pk.modulus;
  mpz_class m = l * sk.decrypt_scaler % pk.modulus;
  if (overflowed(pk, m))
    throw OverflowError("decrypted mantissa landed in the overflow third");
  return EncodedNumber{m, c.exponent};
}

Ciphertext add_cipher(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  if (!fingerprints_equal(a.key_fingerprint, b.key_fingerprint))
    throw WrongKeyError("ciphertexts under different keys");
  auto [x, y] = align_exponents(pk, a, b);
  return Ciphertext{x.raw * y.raw % pk.modulus_squared, x.exponent, pk.fingerprint};
}

Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, const EncodedNumber& k) {
  check_key(pk, c);
  if (k.mantissa < 0 || k.mantissa >= pk.modulus)
    throw OverflowError("scalar mantissa exceeds modulus");
  mpz_class raw;
  if (k.mantissa > pk.max_mantissa) {
    if (overflowed(pk, k.mantissa)) throw OverflowError("scalar in the overflow third");
    // negative scalar: exponentiate the ciphertext inverse by |k|
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), c.raw.get_mpz_t(), pk.modulus_squared.get_mpz_t()) == 0)
      throw OverflowError("ciphertext not invertible mod n^2");
    raw = powm(inv, pk.modulus - k.mantissa, pk.modulus_squared);
  } else {
    raw = powm(c.raw, k.mantissa, pk.modulus_squared);
  }
  return Ciphertext{raw, c.exponent + k.exponent, pk.fingerprint};
}

Ciphertext decrease_exponent(const PublicKey& pk, const Ciphertext& c, int32_t new_exponent) {
  if (new_exponent > c.exponent)
    throw InvalidParameterError("exponent can only be aligned downward");
  if (new_exponent == c.exponent) return c;
  mpz_class factor;
  mpz_ui_pow_ui(factor.get_mpz_t(), kEncodingBase,
                static_cast<unsigned long>(c.exponent - new_exponent));
  Ciphertext out = mul_plain(pk, c, EncodedNumber{factor, 0});
  out.exponent = new_exponent;
  return out;
}

std::pair<Ciphertext, Ciphertext> align_exponents(const PublicKey& pk, const Ciphertext& a,
                                                  const Ciphertext& b) {
  int32_t target = std::min(a.exponent, b.exponent);
  return {decrease_exponent(pk, a, target), decrease_exponent(pk, b, target)};
}

void put_mpz(Bytes& out, const mpz_class& v) {
  if (v < 0) throw InvalidParameterError("negative big integer has no canonical form");
  size_t count = 0;
  size_t bytes = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (v == 0) bytes = 0;
  put_u32(out, static_cast<uint32_t>(bytes));
  size_t start = out.size();
  out.resize(out.size() + bytes);
  if (bytes > 0) mpz_export(out.data() + start, &count, 1, 1, 1, 0, v.get_mpz_t());
}

mpz_class read_mpz(ByteReader& in) {
  Bytes magnitude = in.blob();
  mpz_class v;
  if (!magnitude.empty())
    mpz_import(v.get_mpz_t(), magnitude.size(), 1, 1, 1, 0, magnitude.data());
  return v;
}

Bytes serialize(const PublicKey& pk) {
  Bytes out;
  put_mpz(out, pk.modulus);
  put_mpz(out, pk.generator);
  put_u32(out, static_cast<uint32_t>(pk.key_bits));
  return out;
}

PublicKey deserialize_public_key(const Bytes& data) {
  ByteReader in(data);
  mpz_class modulus = read_mpz(in);
  mpz_class generator = read_mpz(in);
  auto key_bits = static_cast<int>(in.u32());
  in.expect_done();
  if (generator != modulus + 1)
    throw DecodeError("public key generator must equal modulus + 1", 0);
  return PublicKey::create(modulus, key_bits);
}

Bytes serialize(const PrivateKey& sk) {
  Bytes out;
  put_blob(out, serialize(sk.public_key));
  put_mpz(out, sk.prime_p);
  put_mpz(out, sk.prime_q);
  put_mpz(out, sk.decrypt_exponent);
  put_mpz(out, sk.decrypt_scaler);
  return out;
}

PrivateKey deserialize_private_key(const Bytes& data) {
  ByteReader in(data);
  PublicKey pk = deserialize_public_key(in.blob());
  PrivateKey sk;
  sk.prime_p = read_mpz(in);
  sk.prime_q = read_mpz(in);
  sk.decrypt_exponent = read_mpz(in);
  sk.decrypt_scaler = read_mpz(in);
  sk.public_key = pk;
  in.expect_done();
  if (sk.prime_p * sk.prime_q != pk.modulus)
    throw DecodeError("private key primes do not match the public modulus", 0);
  return sk;
}

void put_ciphertext(Bytes& out, const Ciphertext& c) {
  put_mpz(out, c.raw);
  put_i32(out, c.exponent);
  out.insert(out.end(), c.key_fingerprint.begin(), c.key_fingerprint.end());
}

Ciphertext read_ciphertext(ByteReader& in) {
  Ciphertext c;
  c.raw = read_mpz(in);
  c.exponent = in.i32();
  Bytes fp = in.raw(32);
  std::memcpy(c.key_fingerprint.data(), fp.data(), 32);
  return c;
}

Bytes serialize(const Ciphertext& c) {
  Bytes out;
  put_ciphertext(out, c);
  return out;
}

Ciphertext deserialize_ciphertext(const Bytes& data) {
  ByteReader in(data);
  Ciphertext c = read_ciphertext(in);
  in.expect_done();
  return c;
}

void put_encoded(Bytes& out, const EncodedNumber& e) {
  put_mpz(out, e.mantissa);
  put_i32(out, e.exponent);
}

EncodedNumber read_encoded(ByteReader& in) {
  EncodedNumber e;
  e.mantissa = read_mpz(in);
  e.exponent = in.i32();
  return e;
}

}  // namespace fedbench::he
