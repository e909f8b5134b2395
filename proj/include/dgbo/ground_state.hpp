#pragma once

// Solitary waves Q of c Q + D^{alpha+1} Q = Q^2 / 2 (travelling to the right with speed c).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dgbo/errors.hpp"
#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"
#include "dgbo/spectral.hpp"

namespace dgbo {

struct SolitaryWave {
  double alpha = 0.0;
  double speed = 1.0;
  RealField profile;
  std::size_t peak_index = 0;
  int iterations = 0;
  double gamma = 1.0;     // last Petviashvili stabilizing factor
  double residual = 0.0;  // relative profile-equation residual
};

/// || c Q + D^{alpha+1} Q - Q^2/2 ||_inf / ||Q||_inf (0 for Q = 0).
inline double profile_equation_residual(const RealField& q, double alpha, double c) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "profile_equation_residual: alpha must lie in [0, 1]");
  const double scale = q.max_abs();
  if (scale == 0.0) return 0.0;
  RealField r = q * c + fractional_derivative(q, alpha + 1.0);
  r -= q * q * 0.5;
  return r.max_abs() / scale;
}

/// Closed forms: 3c sech^2(sqrt(c) x / 2) at alpha = 1 and 4c / (1 + c^2 x^2) at alpha = 0.
inline RealField kdv_soliton(const Grid& g, double c, double x0 = 0.0) {
  return RealField::from_function(g, [c, x0](double x) {
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * (x - x0));
    return 3.0 * c * s * s;
  });
}

inline RealField bo_soliton(const Grid& g, double c, double x0 = 0.0) {
  return RealField::from_function(g, [c, x0](double x) { return 4.0 * c / (1.0 + c * c * (x - x0) * (x - x0)); });
}

/// Default starting guess 3c exp(-(sqrt(c) (x - x0))^2 / 4).
inline RealField petviashvili_guess(const Grid& g, double c, double x0 = 0.0) {
  return RealField::from_function(g, [c, x0](double x) {
    const double y = std::sqrt(c) * (x - x0);
    return 3.0 * c * std::exp(-0.25 * y * y);
  });
}

struct PetviashviliOptions {
  double tol = 1e-12;
  int max_iterations = 10000;
  std::optional<RealField> initial;  // defaults to petviashvili_guess centred at 0
};

namespace detail {

inline std::size_t argmax(const RealField& u) {
  return static_cast<std::size_t>(std::max_element(u.values().begin(), u.values().end()) - u.values().begin());
}

inline RealField roll(const RealField& u, long by) {
  const long n = static_cast<long>(u.size());
  RealField out(u.grid());
  for (long j = 0; j < n; ++j) out[static_cast<std::size_t>(((j + by) % n + n) % n)] = u[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace detail

/// Petviashvili iteration Q <- gamma^2 (c + D^{alpha+1})^{-1} (Q^2/2). After every step the
/// profile is rolled so that its maximum sits on the peak index of the initial guess.
inline SolitaryWave solve_petviashvili(double alpha, double c, const Grid& grid, const PetviashviliOptions& opt = {}) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "solve_petviashvili: alpha must lie in [0, 1]");
  require(std::isfinite(c) && c > 0.0, "solve_petviashvili: speed must be positive");
  require(opt.tol > 0.0 && opt.max_iterations > 0, "solve_petviashvili: bad tolerance or iteration cap");

  RealField q = opt.initial ? *opt.initial : petviashvili_guess(grid, c);
  require(q.grid() == grid, "solve_petviashvili: initial guess on a different grid");
  require(q.all_finite(), "solve_petviashvili: initial guess has non-finite samples");
  const std::size_t anchor = detail::argmax(q);

  const std::size_t nh = fft::half_size(grid.size());
  std::vector<double> symbol(nh);
  for (std::size_t m = 0; m < nh; ++m) symbol[m] = c + std::pow(grid.wavenumber(static_cast<long>(m)), alpha + 1.0);
  std::vector<Complex> qh(nh), nh_hat(nh);

  SolitaryWave w{alpha, c, q};
  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (q.max_abs() < 1e-8) throw CollapseError("solve_petviashvili: iterate collapsed to zero after " + std::to_string(it - 1) + " iterations");
    const RealField nl = q * q * 0.5;
    fft::forward(q.samples(), qh);
    fft::forward(nl.samples(), nh_hat);
    qh[nh - 1] = nh_hat[nh - 1] = Complex{};
    // <Q, (c + D) Q> and <Q, Q^2/2> in coefficient space (real Hermitian sums).
    double lin = 0.0, non = 0.0;
    for (std::size_t m = 0; m < nh; ++m) {
      const double mult = (m == 0) ? 1.0 : 2.0;
      lin += mult * symbol[m] * std::norm(qh[m]);
      non += mult * (qh[m] * std::conj(nh_hat[m])).real();
    }
    if (!(std::abs(non) > 0.0)) throw CollapseError("solve_petviashvili: nonlinear pairing vanished");
    const double gamma = lin / non;
    for (std::size_t m = 0; m < nh; ++m) nh_hat[m] *= gamma * gamma / symbol[m];
    RealField next(grid);
    fft::inverse(nh_hat, next.samples());
    if (!next.all_finite()) throw ConvergenceError("solve_petviashvili: iterate became non-finite");
    next = detail::roll(next, static_cast<long>(anchor) - static_cast<long>(detail::argmax(next)));

    const double change = max_abs_diff(next, q);
    const double size = q.max_abs();
    q = std::move(next);
    w.iterations = it;
    w.gamma = gamma;
    if (change <= opt.tol * size) {
      if (q.max_abs() < 1e-8) throw CollapseError("solve_petviashvili: converged to the zero solution");
      w.profile = q;
      w.peak_index = anchor;
      w.residual = profile_equation_residual(q, alpha, c);
      if (w.residual > 10.0 * opt.tol)
        throw ConvergenceError("solve_petviashvili: fixed point reached but residual " + std::to_string(w.residual) +
                               " exceeds 10 tol");
      return w;
    }
  }
  throw ConvergenceError("solve_petviashvili: no convergence in " + std::to_string(opt.max_iterations) + " iterations");
}

/// Profile rescaled to speed c: c Q_1(c^{1/(1+alpha)} x).
inline double speed_scaling_exponent(double alpha) { return 1.0 / (1.0 + alpha); }

struct DecayBoundReport {
  double c_alpha = 0.0;        // smallest constant with Q(x) <= c_alpha (1+x^2)^{-(1+alpha/2)} on the grid
  std::vector<double> offset;  // distance from the peak, 0 .. L/2
  std::vector<double> ratio;   // Q(x) (1+x^2)^{1+alpha/2} along offset (right half)

  /// True when the ratio curve is monotone (either direction) on offsets in [from, to].
  bool monotone_between(double from, double to) const {
    int sign = 0;
    for (std::size_t i = 1; i < offset.size(); ++i) {
      if (offset[i - 1] < from || offset[i] > to) continue;
      const double d = ratio[i] - ratio[i - 1];
      const int s = (d > 0) - (d < 0);
      if (s == 0) continue;
      if (sign == 0) sign = s;
      else if (s != sign) return false;
    }
    return true;
  }
};

/// Measures the profile against (1+x^2)^{-(1+alpha/2)}, x taken from the peak.
inline DecayBoundReport decay_bound_check(const SolitaryWave& w) {
  const RealField& q = w.profile;
  const Grid& g = q.grid();
  const long n = static_cast<long>(g.size());
  const double p = 1.0 + 0.5 * w.alpha;
  DecayBoundReport r;
  for (long j = 0; j < n; ++j) {
    const long d = std::min(std::labs(j - static_cast<long>(w.peak_index)), n - std::labs(j - static_cast<long>(w.peak_index)));
    const double x = static_cast<double>(d) * g.spacing();
    r.c_alpha = std::max(r.c_alpha, q[static_cast<std::size_t>(j)] * std::pow(1.0 + x * x, p));
  }
  for (long d = 0; d <= n / 2; ++d) {
    const double x = static_cast<double>(d) * g.spacing();
    r.offset.push_back(x);
    r.ratio.push_back(q[static_cast<std::size_t>((static_cast<long>(w.peak_index) + d) % n)] * std::pow(1.0 + x * x, p));
  }
  return r;
}

}  // namespace dgbo
