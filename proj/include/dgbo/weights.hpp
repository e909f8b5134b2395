#pragma once

// Weight family <x>^{-(alpha+2)}, its antiderivative, its Fourier transform and the moving
// window lambda(t). Fourier transforms in this file use the e^{-2 pi i x xi} convention; the
// angular solver convention k = 2 pi xi is converted at the call sites in functionals.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "dgbo/errors.hpp"
#include "dgbo/grid.hpp"

namespace dgbo::weights {

namespace detail {

inline void check_alpha(double alpha, const char* who) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, std::string(who) + ": alpha must lie in [0, 1]");
}

// Boost 1.74 declares integrate() non-const, so each thread keeps its own integrator.
inline boost::math::quadrature::exp_sinh<double>& half_line() {
  thread_local boost::math::quadrature::exp_sinh<double> q;
  return q;
}

inline boost::math::quadrature::tanh_sinh<double>& finite() {
  thread_local boost::math::quadrature::tanh_sinh<double> q;
  return q;
}

}  // namespace detail

/// phi_alpha'(x) = <x>^{-(alpha+2)} with <x> = sqrt(1 + x^2).
inline double phi_prime(double x, double alpha) { return std::pow(1.0 + x * x, -0.5 * (alpha + 2.0)); }

/// Total mass of phi_alpha' (= sup of phi_alpha): sqrt(pi) Gamma((alpha+1)/2) / Gamma((alpha+2)/2).
inline double phi_sup(double alpha) {
  detail::check_alpha(alpha, "phi_sup");
  return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (alpha + 1.0)) / std::tgamma(0.5 * (alpha + 2.0));
}

/// phi_alpha(x) = int_{-inf}^x <s>^{-(alpha+2)} ds. With s = tan(theta) the integrand becomes
/// cos^alpha(theta) on (-pi/2, atan x], written as sin^alpha(psi) on (0, pi/2 + atan x].
inline double phi(double x, double alpha) {
  detail::check_alpha(alpha, "phi");
  require(!std::isnan(x), "phi: x is NaN");
  const double upper = 0.5 * std::numbers::pi + std::atan(x);
  if (upper <= 0.0) return 0.0;
  auto f = [alpha](double psi) { return std::pow(std::sin(psi), alpha); };
  double error = 0.0;
  const double value = detail::finite().integrate(f, 0.0, upper, 1e-14, &error);
  if (!std::isfinite(value) || error > 1e-11) throw ConvergenceError("phi: quadrature failed at x=" + std::to_string(x));
  return value;
}

/// Fourier transform of phi_alpha' in the e^{-2 pi i x xi} convention:
///   sqrt(pi)/Gamma((alpha+2)/2) int_0^inf e^{-s} s^{(alpha-1)/2} e^{-pi^2 xi^2/s} ds,
/// evaluated after s = r^2, i.e. 2 int_0^inf r^alpha e^{-r^2 - pi^2 xi^2 / r^2} dr.
inline double phi_prime_hat(double xi, double alpha) {
  detail::check_alpha(alpha, "phi_prime_hat");
  require(std::isfinite(xi), "phi_prime_hat: xi must be finite");
  const double q = std::numbers::pi * std::numbers::pi * xi * xi;
  auto f = [alpha, q](double r) {
    if (!(r > 0.0) || r > 1e150) return 0.0;
    const double r2 = r * r;
    const double e = r2 + (q == 0.0 ? 0.0 : q / r2);
    if (e > 745.0) return 0.0;
    return 2.0 * std::pow(r, alpha) * std::exp(-e);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double integral = detail::half_line().integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &error, &l1);
  if (!std::isfinite(integral) || error > 1e-10 * std::abs(integral))
    throw ConvergenceError("phi_prime_hat: quadrature failed at xi=" + std::to_string(xi));
  return std::sqrt(std::numbers::pi) / std::tgamma(0.5 * (alpha + 2.0)) * integral;
}

/// int_R |xi|^{alpha+1} phi_alpha'^(xi) dxi by nested quadrature. Under x -> x/lambda the
/// same integral scales by lambda^{-(alpha+1)}.
inline double moment_integral(double alpha) {
  detail::check_alpha(alpha, "moment_integral");
  auto f = [alpha](double xi) {
    if (!(xi > 0.0) || xi > 200.0) return 0.0;
    return std::pow(xi, alpha + 1.0) * phi_prime_hat(xi, alpha);
  };
  double error = 0.0;
  const double half = detail::half_line().integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-11, &error);
  if (!std::isfinite(half) || error > 1e-8 * std::abs(half)) throw ConvergenceError("moment_integral: quadrature failed");
  return 2.0 * half;
}

/// Closed form of moment_integral: Gamma((2 alpha+3)/2) / pi^{(2 alpha+3)/2}.
inline double moment_closed_form(double alpha) {
  const double p = 0.5 * (2.0 * alpha + 3.0);
  return std::tgamma(p) / std::pow(std::numbers::pi, p);
}

/// phi_alpha' dilated by a positive scale: x -> phi_alpha'(x / scale).
struct WeightSpec {
  double alpha;
  double scale;

  WeightSpec(double alpha_, double scale_) : alpha(alpha_), scale(scale_) {
    detail::check_alpha(alpha, "WeightSpec");
    require(std::isfinite(scale) && scale > 0.0, "WeightSpec: scale must be positive");
  }

  double density(double x) const { return phi_prime(x / scale, alpha); }
  double antiderivative(double x) const { return phi(x / scale, alpha); }

  RealField sample_density(const Grid& g) const {
    return RealField::from_function(g, [this](double x) { return density(x); });
  }
  RealField sample_antiderivative(const Grid& g) const {
    return RealField::from_function(g, [this](double x) { return antiderivative(x); });
  }
};

/// lambda(t) = c t^b / log t, the raw formula (t > 1).
inline double window_lambda(double t, double b, double c) {
  require(std::isfinite(t) && t > 1.0, "window_lambda: t must exceed 1 (log t > 0)");
  return c * std::pow(t, b) / std::log(t);
}

/// The (a, b, c) window law with a + b = 1 and a < 1/(alpha+2).
class WindowLaw {
 public:
  WindowLaw(double a, double c, double alpha) : a_(a), b_(1.0 - a), c_(c), alpha_(alpha) {
    detail::check_alpha(alpha, "WindowLaw");
    require(std::isfinite(a) && a >= 0.0, "window.a: must be >= 0");
    require(std::isfinite(c) && c > 0.0, "window.c: must be > 0");
    require(a < 1.0 / (alpha + 2.0),
            "window.a: require a < 1/(alpha+2), equivalently b = 1-a > (alpha+1)/(alpha+2); got a=" +
                std::to_string(a) + " for alpha=" + std::to_string(alpha));
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double alpha() const { return alpha_; }

  /// lambda is increasing exactly for t > e^{1/b}.
  double t_min() const { return std::exp(1.0 / b_); }

  double lambda(double t) const { return window_lambda(t, b_, c_); }

  /// lambda'(t) / lambda(t) = (b log t - 1) / (t log t).
  double lambda_log_derivative(double t) const {
    const double lt = std::log(t);
    return (b_ * lt - 1.0) / (t * lt);
  }

  /// Time prefactor 1 / (t^a log^2 t).
  double prefactor(double t) const {
    const double lt = std::log(t);
    return 1.0 / (std::pow(t, a_) * lt * lt);
  }

  /// d/dt of prefactor(t): -(a log t + 2) / (t^{a+1} log^3 t).
  double prefactor_derivative(double t) const {
    const double lt = std::log(t);
    return -(a_ * lt + 2.0) / (std::pow(t, a_ + 1.0) * lt * lt * lt);
  }

  WeightSpec weight_at(double t) const { return WeightSpec(alpha_, lambda(t)); }

 private:
  double a_, b_, c_, alpha_;
};

}  // namespace dgbo::weights
