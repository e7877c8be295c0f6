#pragma once

#include <stdexcept>
#include <string>

namespace ckdv {

// Invalid parameters, configurations or inputs. Maps to CLI exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two computational routes that must agree did not.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ckdv
