#include "fedbench/bytes.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

namespace fedbench {

void put_u8(Bytes& out, uint8_t v) { out.push_back(v); }

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(Bytes& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out.push_back(static_cast<uint8_t>(v >> shift));
}

void put_i32(Bytes& out, int32_t v) { put_u32(out, static_cast<uint32_t>(v)); }

void put_u64(Bytes& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<uint8_t>(v >> shift));
}

void put_f64(Bytes& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

void put_blob(Bytes& out, const Bytes& blob) {
  put_u32(out, static_cast<uint32_t>(blob.size()));
  out.insert(out.end(), blob.begin(), blob.end());
}

void ByteReader::need(size_t n) const {
  if (pos_ + n > data_.size())
    throw DecodeError("truncated buffer, need " + std::to_string(n) + " more bytes", pos_);
}

uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = static_cast<uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

int32_t ByteReader::i32() { return static_cast<int32_t>(u32()); }

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

Bytes ByteReader::blob() {
  uint32_t len = u32();
  return raw(len);
}

Bytes ByteReader::raw(size_t n) {
  need(n);
  Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

void ByteReader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes after payload", pos_);
}

std::string to_hex(const Bytes& data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

static int hex_nibble(char c, size_t offset) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw DecodeError("invalid hex digit", offset);
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd hex length", hex.size());
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>((hex_nibble(hex[2 * i], 2 * i) << 4) |
                                  hex_nibble(hex[2 * i + 1], 2 * i + 1));
  }
  return out;
}

Fingerprint sha256(const Bytes& data) {
  Fingerprint digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
  return digest;
}

}  // namespace fedbench
