#pragma once

#include <stdexcept>
#include <string>

namespace moebius {

/// Invalid arguments or data supplied by the caller. Maps to CLI exit code 2.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation did not meet its accuracy or convergence contract. Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// The truncated Galerkin basis cannot represent a requested state.
class capacity_error : public numerical_error {
 public:
  explicit capacity_error(const std::string& what) : numerical_error(what) {}
};

}  // namespace moebius
