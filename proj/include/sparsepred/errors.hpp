#pragma once

#include <stdexcept>
#include <string>

namespace sparsepred {

// Out-of-range model or function argument (eta, r, v_x, theta, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A routine was called on inputs that violate its stated requirements.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_estimate(previous), last_estimate(last) {}

  double previous_estimate;
  double last_estimate;
};

// Raised in strict mode when the located supremum sits on the search boundary.
class BoundarySupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparsepred
