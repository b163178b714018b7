#pragma once

#include <stdexcept>
#include <string>

namespace fedbench {

// Base class for everything this library throws. The CLI maps subclasses
// to exit codes, so new error kinds should extend one of the types below
// rather than std::runtime_error directly.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument or configuration supplied by the caller.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

// A fixed-point value left the representable range (the reserved middle
// third of the modulus, or a magnitude check before encoding).
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Ciphertext operated on under a key it does not belong to.
class WrongKeyError : public Error {
 public:
  using Error::Error;
};

// A party received a message it cannot handle in its current phase, or a
// round/mask bookkeeping mismatch.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Malformed bytes on the wire. Carries the offset of the first bad byte.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& msg, size_t offset)
      : Error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Dataset violates a structural precondition (duplicate ids, ragged rows).
class InvalidDatasetError : public Error {
 public:
  using Error::Error;
};

// Training refused because the data would let a party solve for the
// other side's inputs (too few samples, or a degenerate one-hot column).
class SafetyRefusalError : public Error {
 public:
  using Error::Error;
};

// Prediction asked for an id a party does not hold.
class MissingEntityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedbench
