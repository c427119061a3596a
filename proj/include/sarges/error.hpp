#pragma once

#include <stdexcept>
#include <string>

namespace sarges {

/// Base of every error raised by the toolkit. Domain errors map to CLI exit
/// status 1; IoError maps to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  EncodingError(const std::string& what, std::size_t byte_offset)
      : Error(what + " at byte " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace sarges
