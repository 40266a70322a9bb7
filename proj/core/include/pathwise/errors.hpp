#pragma once

#include <stdexcept>
#include <string>

namespace pathwise {

// Invalid inputs are reported with std::invalid_argument and std::out_of_range.
// The two types below cover the remaining failure classes.

/// A functional lacks a derivative that the operation needs and finite
/// differences were disabled.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called on data that breaks one of its preconditions,
/// e.g. a partition level that does not contain a jump time of the path.
class PreconditionViolation : public std::logic_error {
 public:
  explicit PreconditionViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace pathwise
