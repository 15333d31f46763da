#pragma once

#include <stdexcept>
#include <string>

namespace hchain {

/// Invalid parameters, malformed descriptors or inconsistent inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Singular systems, non-finite states, unstable time steps.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hchain
