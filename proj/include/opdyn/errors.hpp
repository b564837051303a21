#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

/// Argument outside the domain of a sequence or function (e.g. LogLog at n < 3).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A magnitude left the range where float materialization is allowed.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Vectors or operators over different index sets were combined.
class SideMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query outside the range a table was built for.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A documented precondition of a checker or builder does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace opdyn
