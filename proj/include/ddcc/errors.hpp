#pragma once

#include <stdexcept>
#include <string>

namespace ddcc {

/// Bad shapes, out-of-range parameters, non-finite data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moments were requested from a state that has not seen a sample.
class EmptyState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A coefficient schedule (or a confidence-bound condition) is not yet
/// satisfied by the current sample count.
class NotEnoughSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddcc
