#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rtflow {

/// Invalid parameters, shapes or run descriptions. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file. Carries the byte offset where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_ = 0;
};

/// Non-finite values during time stepping, or an iterative solver that did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rtflow
