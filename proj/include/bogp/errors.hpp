#pragma once

#include <stdexcept>
#include <string>

namespace bogp {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cholesky of the observation covariance failed even after the maximum jitter.
class IllConditionedCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FittingFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFeasibleSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObjectiveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bogp
