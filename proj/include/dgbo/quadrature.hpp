#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "dgbo/errors.hpp"

namespace dgbo::quad {

struct Result {
  double value;
  double error;
};

/// Adaptive 31-point Gauss-Kronrod on [a, b]; either limit may be infinite.
/// Throws ConvergenceError when the error estimate exceeds max(rel_tol * |value|, abs_tol).
template <typename F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0, unsigned max_depth = 20) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol * 0.1, &error, &l1);
  if (!std::isfinite(value) || error > std::max(rel_tol * std::abs(value), abs_tol)) {
    throw ConvergenceError("quadrature did not converge: value=" + std::to_string(value) +
                           " error=" + std::to_string(error));
  }
  return {value, error};
}

inline constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace dgbo::quad
