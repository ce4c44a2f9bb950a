#pragma once

#include <stdexcept>
#include <string>

namespace mme {

// Base of every error raised by the library. Each subclass maps to a distinct
// CLI exit code (see tools/mmewm.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Scheme parameters violate a feasibility constraint (alpha bounds, rate caps).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A write would lose information needed for exact restoration.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// Sidecar metadata does not match the file it is supposed to describe.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace mme
