#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpmsim {

/// Precondition on caller-supplied values failed.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index or position outside the modeled region.
class OutOfRegion : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Geometry the measurement model cannot represent (target below the array plane).
class UnsupportedGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coordinate singularity in the measurement Jacobian (zero range or zenith).
class SingularGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed file contents; carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnsupportedVersion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invariant violation in a configuration document; message starts with the JSON path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lpmsim
