#pragma once

#include <stdexcept>
#include <string>

namespace aerogrid {

// Base class for all library errors so callers can catch one type at the CLI
// boundary and map it to a nonzero exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-contract input data (bad CSV row, NaN in a field, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Structurally valid data that violates a precondition (dimension mismatch,
// out-of-bounds index, unknown enum value).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numeric failure during computation (non-finite loss or gradient).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Action distribution collapsed: every action is masked out.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

// Filesystem/serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A metric that has no defined value for the given inputs (zero denominator,
// too few booths). Reports surface these as null fields with a reason.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Bad configuration file or CLI usage. CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aerogrid
