#ifndef HYPTEST_ERRORS_HPP
#define HYPTEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hyptest {

// Invalid arguments: out-of-range parameters, malformed specs, shape mismatches.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not defined for the given distribution family (e.g. KL between
// a Gaussian and a categorical, exact enumeration of a continuous law).
class unsupported_error : public domain_error {
 public:
  using domain_error::domain_error;
};

// Exact enumeration would exceed the state cap.
class size_error : public domain_error {
 public:
  using domain_error::domain_error;
};

// An observation has zero mass under every hypothesis.
class support_error : public domain_error {
 public:
  using domain_error::domain_error;
};

// Numerical routine failed to converge or bracket.
class solver_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyptest

#endif  // HYPTEST_ERRORS_HPP
