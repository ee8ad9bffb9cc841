#pragma once

#include <stdexcept>
#include <string>

namespace rested {

/// Bad user input: malformed configs, out-of-range parameters, unknown names.
/// The CLI maps this to exit status 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bound or estimator was asked for outside the range where it is defined
/// (e.g. a slack parameter too large for the concentration argument to hold).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rested
