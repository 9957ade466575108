#pragma once

#include <stdexcept>

namespace ulrrm {

// Invalid scenario or experiment configuration. The CLI maps this to exit
// code 2; anything else that escapes run() maps to 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ulrrm
