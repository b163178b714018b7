#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedbench/errors.hpp"

namespace fedbench {

using Bytes = std::vector<uint8_t>;
using Fingerprint = std::array<uint8_t, 32>;

// Big-endian writers. All wire formats in this project are big-endian.
void put_u8(Bytes& out, uint8_t v);
void put_u16(Bytes& out, uint16_t v);
void put_u32(Bytes& out, uint32_t v);
void put_i32(Bytes& out, int32_t v);
void put_u64(Bytes& out, uint64_t v);
void put_f64(Bytes& out, double v);
// 4-byte length prefix followed by the raw bytes.
void put_blob(Bytes& out, const Bytes& blob);

// Cursor-style reader that throws DecodeError with the byte offset of the
// first field that cannot be read.
class ByteReader {
 public:
  explicit ByteReader(const Bytes& data) : data_(data) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  int32_t i32();
  uint64_t u64();
  double f64();
  Bytes blob();
  Bytes raw(size_t n);

  size_t offset() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;

 private:
  void need(size_t n) const;
  const Bytes& data_;
  size_t pos_ = 0;
};

std::string to_hex(const Bytes& data);
Bytes from_hex(const std::string& hex);

Fingerprint sha256(const Bytes& data);

}  // namespace fedbench
