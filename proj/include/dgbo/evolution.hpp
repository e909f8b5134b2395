#pragma once

// u_t - D^{alpha+1} u_x + u u_x = 0 by integrating-factor RK4. In Fourier variables
// u_hat' = i w u_hat - (i k / 2) (u^2)^ with w = k |k|^{alpha+1}; the linear factor e^{i w t}
// is applied exactly and only the conservative nonlinearity is stepped.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dgbo/errors.hpp"
#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"
#include "dgbo/spectral.hpp"

namespace dgbo {

struct EquationParams {
  double alpha = 0.5;
  bool dealias = true;
  double dt = 1e-3;
  double t_end = 1.0;
  bool nonlinear = true;
  bool reverse = false;  // integrate the time-reversed system (negated dispersion and nonlinearity)

  void validate() const {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "EquationParams: alpha must lie in [0, 1]");
    require(std::isfinite(dt) && dt > 0.0, "EquationParams: dt must be positive");
    require(std::isfinite(t_end) && t_end > 0.0, "EquationParams: t_end must be positive");
  }

  /// Transport heuristic dt <= 0.5 h / max(1, max|u0|).
  static double max_stable_dt(const RealField& u0) { return 0.5 * u0.grid().spacing() / std::max(1.0, u0.max_abs()); }
};

struct ConservedTriple {
  double mass = 0.0;    // I = int u
  double l2 = 0.0;      // M = int u^2
  double energy = 0.0;  // E = 1/2 int |D^{(1+alpha)/2} u|^2 - 1/6 int u^3
};

inline ConservedTriple conserved(const RealField& u, double alpha) {
  ConservedTriple c;
  c.mass = integrate(u);
  c.l2 = inner(u, u);
  const RealField d = fractional_derivative(u, 0.5 * (1.0 + alpha));
  c.energy = 0.5 * inner(d, d) - inner(u * u, u) / 6.0;
  return c;
}

struct Trajectory {
  double alpha = 0.0;
  bool nonlinear = true;
  std::vector<double> times;
  std::vector<RealField> states;
  std::vector<ConservedTriple> conserved;
  std::vector<double> l1_norms;

  std::size_t size() const { return times.size(); }
};

/// Raised when the state stops being finite; carries the last finite state.
class EvolutionAborted : public Error {
 public:
  EvolutionAborted(const std::string& what, RealField last, double t_last)
      : Error(what), last_state(std::move(last)), last_time(t_last) {}
  RealField last_state;
  double last_time;
};

namespace detail {

class IfRk4 {
 public:
  IfRk4(const Grid& g, const EquationParams& p) : g_(g), p_(p), nh_(fft::half_size(g.size())) {
    k_.resize(nh_);
    w_.resize(nh_);
    for (std::size_t m = 0; m < nh_; ++m) {
      k_[m] = g.wavenumber(static_cast<long>(m));
      w_[m] = k_[m] * std::pow(std::abs(k_[m]), p.alpha + 1.0);
    }
    cut_ = static_cast<std::size_t>(dealias_cutoff(g.size()));
    phys_.resize(g.size());
    a_.resize(nh_), b_.resize(nh_), c_.resize(nh_), d_.resize(nh_), tmp_.resize(nh_), e1_.resize(nh_), e2_.resize(nh_);
  }

  // Projection applied to initial data and to every quadratic product.
  void project(std::vector<Complex>& v) const {
    v[nh_ - 1] = Complex{};
    if (!p_.dealias) return;
    for (std::size_t m = cut_ + 1; m < nh_; ++m) v[m] = Complex{};
  }

  // out = h * (-(i k / 2) P (u^2)^)
  void nonlinear(const std::vector<Complex>& uh, double h, std::vector<Complex>& out) {
    if (!p_.nonlinear) {
      std::fill(out.begin(), out.end(), Complex{});
      return;
    }
    fft::inverse(uh, phys_);
    for (auto& x : phys_) x *= x;
    fft::forward(phys_, out);
    project(out);
    for (std::size_t m = 0; m < nh_; ++m) out[m] *= Complex(0.0, -0.5 * k_[m] * h);
  }

  void step(std::vector<Complex>& uh, double dt) {
    const double h = p_.reverse ? -dt : dt;
    if (h != cached_h_) {
      for (std::size_t m = 0; m < nh_; ++m) {
        e1_[m] = std::exp(Complex(0.0, 0.5 * w_[m] * h));
        e2_[m] = e1_[m] * e1_[m];
      }
      cached_h_ = h;
    }
    nonlinear(uh, h, a_);
    for (std::size_t m = 0; m < nh_; ++m) tmp_[m] = e1_[m] * (uh[m] + 0.5 * a_[m]);
    nonlinear(tmp_, h, b_);
    for (std::size_t m = 0; m < nh_; ++m) tmp_[m] = e1_[m] * uh[m] + 0.5 * b_[m];
    nonlinear(tmp_, h, c_);
    for (std::size_t m = 0; m < nh_; ++m) tmp_[m] = e2_[m] * uh[m] + e1_[m] * c_[m];
    nonlinear(tmp_, h, d_);
    for (std::size_t m = 0; m < nh_; ++m)
      uh[m] = e2_[m] * uh[m] + (e2_[m] * a_[m] + 2.0 * e1_[m] * (b_[m] + c_[m]) + d_[m]) / 6.0;
    uh[nh_ - 1] = Complex{};
  }

  RealField to_field(const std::vector<Complex>& uh) {
    RealField u(g_);
    fft::inverse(uh, u.samples());
    return u;
  }

 private:
  Grid g_;
  EquationParams p_;
  std::size_t nh_, cut_ = 0;
  double cached_h_ = 0.0;
  std::vector<double> k_, w_, phys_;
  std::vector<Complex> a_, b_, c_, d_, tmp_, e1_, e2_;
};

}  // namespace detail

/// Called with every recorded sample.
using SampleObserver = std::function<void(double t, const RealField& u)>;

/// Evolves u0 and records the state at each requested time. Steps of size dt are taken, and the
/// last step before each sample is shortened so the sample time is hit exactly. With
/// store_states = false only the scalar series are kept.
inline Trajectory evolve(const RealField& u0, const EquationParams& params, std::vector<double> sample_times,
                         const SampleObserver& observer = {}, bool store_states = true) {
  params.validate();
  require(u0.all_finite(), "evolve: initial data has non-finite samples");
  require(params.dt <= EquationParams::max_stable_dt(u0) * (1.0 + 1e-12),
          "evolve: dt=" + std::to_string(params.dt) + " exceeds 0.5 h / max(1, max|u0|) = " +
              std::to_string(EquationParams::max_stable_dt(u0)));
  require(!sample_times.empty(), "evolve: need at least one sample time");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    require(sample_times[i] >= 0.0 && sample_times[i] <= params.t_end * (1.0 + 1e-12),
            "evolve: sample times must lie in [0, t_end]");
    if (i) require(sample_times[i] > sample_times[i - 1], "evolve: sample times must be strictly increasing");
  }

  const Grid& g = u0.grid();
  detail::IfRk4 scheme(g, params);
  std::vector<Complex> uh(fft::half_size(g.size()));
  fft::forward(u0.samples(), uh);
  scheme.project(uh);

  Trajectory traj;
  traj.alpha = params.alpha;
  traj.nonlinear = params.nonlinear;
  double t = 0.0;
  std::vector<Complex> last_good = uh;
  auto record = [&](double ts, const RealField& u) {
    traj.times.push_back(ts);
    traj.conserved.push_back(conserved(u, params.alpha));
    traj.l1_norms.push_back(norm_l1(u));
    if (store_states) traj.states.push_back(u);
    if (observer) observer(ts, u);
  };
  auto finite = [](const std::vector<Complex>& v) {
    return std::all_of(v.begin(), v.end(), [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  };

  for (double ts : sample_times) {
    while (t < ts) {
      const double remaining = ts - t;
      const bool last_step = remaining <= params.dt * (1.0 + 1e-9);
      const double h = last_step ? remaining : params.dt;
      scheme.step(uh, h);
      if (!finite(uh))
        throw EvolutionAborted("evolve: non-finite state at t=" + std::to_string(t + h), scheme.to_field(last_good), t);
      t = last_step ? ts : t + h;
      last_good = uh;
    }
    record(ts, scheme.to_field(uh));
  }
  return traj;
}

struct L1Fit {
  double c0 = 0.0;
  double a_hat = 0.0;
  double a_low = 0.0;   // 95% interval on a_hat
  double a_high = 0.0;
  bool degenerate = false;
  bool below_threshold = false;  // a_hat < 1/(2+alpha)
};

/// Least-squares fit of log ||u(t)||_1 = log c0 + a log <t>, <t> = (1 + t^2)^{1/2}.
inline L1Fit l1_monitor(const Trajectory& traj) {
  const std::size_t n = traj.l1_norms.size();
  require(n >= 3, "l1_monitor: need at least 3 samples");
  L1Fit fit;
  const double threshold = 1.0 / (2.0 + traj.alpha);
  if (*std::max_element(traj.l1_norms.begin(), traj.l1_norms.end()) == 0.0) {
    fit.degenerate = true;
    fit.below_threshold = true;
    return fit;
  }
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(traj.l1_norms[i] > 0.0, "l1_monitor: L1 norm vanished at some samples but not all");
    x[i] = 0.5 * std::log1p(traj.times[i] * traj.times[i]);
    y[i] = std::log(traj.l1_norms[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (sxx == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.a_hat = sxy / sxx;
  fit.c0 = std::exp(my - fit.a_hat * mx);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (my + fit.a_hat * (x[i] - mx));
    sse += r * r;
  }
  const double dof = static_cast<double>(n) - 2.0;
  const double se = dof > 0 ? std::sqrt(sse / dof / sxx) : 0.0;
  const double q = dof > 0 ? boost::math::quantile(boost::math::students_t(dof), 0.975) : 0.0;
  fit.a_low = fit.a_hat - q * se;
  fit.a_high = fit.a_hat + q * se;
  fit.below_threshold = fit.a_hat < threshold;
  return fit;
}

}  // namespace dgbo
