#pragma once

#include <stdexcept>
#include <string>

namespace crowdkg {

// Bad inputs: out-of-domain parameters, malformed configs, unparseable files.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to converge or produced a non-finite result.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// A replay pool (or the whole action set) has run dry.
class exhausted_error : public std::runtime_error {
 public:
  explicit exhausted_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crowdkg
