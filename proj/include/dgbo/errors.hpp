#pragma once

#include <stdexcept>
#include <string>

namespace dgbo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid, NaN samples, s < 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point iteration collapsed onto the trivial solution.
class CollapseError : public Error {
 public:
  using Error::Error;
};

/// A diagnostic refused to evaluate on degenerate input (0/0 ratios, non-localized states).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace dgbo
