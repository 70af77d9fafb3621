#pragma once

#include <stdexcept>
#include <string>

namespace sccl {

/// Input files or records that violate their format.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent model or pipeline configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor extents handed to a primitive.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sccl
