#pragma once

#include <stdexcept>
#include <string>

namespace sboi {

/// Invalid user configuration (bad field values, missing keys, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not deliver a result to the required accuracy,
/// e.g. eigensolver non-convergence or a truncation window that outgrew its cap.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sboi
