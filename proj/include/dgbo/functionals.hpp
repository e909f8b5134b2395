#pragma once

// Weighted decay functional, the two moving-window identities, the virial identity and the
// interpolation / Leibniz / cubic-weight diagnostics.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dgbo/commutators.hpp"
#include "dgbo/errors.hpp"
#include "dgbo/evolution.hpp"
#include "dgbo/grid.hpp"
#include "dgbo/spectral.hpp"
#include "dgbo/weights.hpp"

namespace dgbo {

// ---------------------------------------------------------------------------------------------
// Weighted functional

/// int (u^2 + (D^mu u)^2 + (H D^mu u)^2) phi_alpha'(x / lambda(t)) dx with mu = (alpha+1)/2.
inline double weighted_J(const RealField& u, double t, const weights::WindowLaw& law, double alpha) {
  require(std::abs(law.alpha() - alpha) < 1e-15, "weighted_J: window law built for a different alpha");
  require(t > law.t_min(), "weighted_J: t must exceed the window's t_min = e^{1/b}");
  const RealField w = law.weight_at(t).sample_density(u.grid());
  const RealField d = fractional_derivative(u, 0.5 * (alpha + 1.0));
  const RealField hd = hilbert(d);
  return inner(w, u * u + d * d + hd * hd);
}

struct DecayReport {
  weights::WindowLaw law;
  std::vector<double> times;
  std::vector<double> J;
  std::vector<double> running_min;

  /// Running minimum at the last sample with time <= t.
  double running_min_at(double t) const {
    double v = -1.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= t * (1.0 + 1e-12); ++i) v = running_min[i];
    require(v >= 0.0, "DecayReport: no sample at or before t");
    return v;
  }
};

/// J along the trajectory samples with t > t_min; the running minimum is the liminf proxy.
inline DecayReport decay_report(const Trajectory& traj, const weights::WindowLaw& law) {
  require(traj.states.size() == traj.times.size(), "decay_report: trajectory was recorded without states");
  DecayReport r{law, {}, {}, {}};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] <= law.t_min()) continue;
    const double j = weighted_J(traj.states[i], traj.times[i], law, traj.alpha);
    r.times.push_back(traj.times[i]);
    r.J.push_back(j);
    r.running_min.push_back(r.running_min.empty() ? j : std::min(r.running_min.back(), j));
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Sampling sequence t_n = (log n)^{1/(eps (alpha+2))}

inline double sample_time(double epsilon, double alpha, long n) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "sample_time: epsilon must be positive");
  require(n >= 2, "sample_time: n must be >= 2");
  return std::pow(std::log(static_cast<double>(n)), 1.0 / (epsilon * (alpha + 2.0)));
}

/// `count` consecutive terms starting at the first index n >= max(2, first_index) with t_n >= t_min.
inline std::vector<double> sample_times(double epsilon, double alpha, int count, double t_min = 0.0, long first_index = 2) {
  require(count >= 2, "sample_times: count must be >= 2");
  long n = std::max(2L, first_index);
  while (sample_time(epsilon, alpha, n) < t_min) ++n;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(sample_time(epsilon, alpha, n + i));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Identity ledgers

struct IdentityLedger {
  std::string name;
  double t = 0.0;
  double ddt_term = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double closure_residual = 0.0;   // |ddt + sum terms| / max magnitude
  double fd_error_estimate = 0.0;  // |5-point - 3-point| / max magnitude
  double tolerance = 1e-6;
  bool fd_limited = false;  // residual above tolerance and explained by the time differencing
  double seam_fraction = 0.0;  // share of int (|u| + u^2) in the outer 2% of the box

  double term(const std::string& key) const {
    for (const auto& [k, v] : terms)
      if (k == key) return v;
    throw InvalidArgument("IdentityLedger: no term " + key);
  }

  void close() {
    double sum = ddt_term, scale = std::abs(ddt_term);
    for (const auto& [k, v] : terms) sum += v, scale = std::max(scale, std::abs(v));
    closure_residual = scale == 0.0 ? 0.0 : std::abs(sum) / scale;
    fd_error_estimate = scale == 0.0 ? 0.0 : fd_error_estimate / scale;
    fd_limited = closure_residual > tolerance && fd_error_estimate >= closure_residual;
  }
};

namespace detail {

// The weights are not periodic; this measures how much of the state sits where the box wraps.
inline double seam_fraction(const RealField& u, double edge_fraction = 0.02) {
  const Grid& g = u.grid();
  const double cut = 0.5 * g.length() * (1.0 - edge_fraction);
  double edge = 0.0, all = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double v = std::abs(u[j]) + u[j] * u[j];
    all += v;
    if (std::abs(g.node(j)) > cut) edge += v;
  }
  return all == 0.0 ? 0.0 : edge / all;
}

// Index of sample t and a uniform 5-point stencil around it.
inline std::pair<std::size_t, double> stencil(const Trajectory& traj, double t) {
  require(traj.states.size() == traj.times.size(), "ledger: trajectory was recorded without states");
  const auto& ts = traj.times;
  std::size_t i = 0;
  while (i < ts.size() && std::abs(ts[i] - t) > 1e-12 * std::max(1.0, std::abs(t))) ++i;
  require(i < ts.size(), "ledger: t is not a recorded sample time");
  require(i >= 2 && i + 2 < ts.size(), "ledger: t needs two recorded samples on each side");
  const double d = ts[i + 1] - ts[i];
  for (int k = -2; k < 2; ++k)
    require(std::abs(ts[i + k + 1] - ts[i + k] - d) <= 1e-9 * d, "ledger: samples around t are not uniformly spaced");
  return {i, d};
}

// 5-point derivative of F at the stencil centre, plus |d5 - d3| as an error estimate.
template <typename F>
std::pair<double, double> richardson_derivative(std::size_t i, double d, F&& f) {
  const double fm2 = f(i - 2), fm1 = f(i - 1), fp1 = f(i + 1), fp2 = f(i + 2);
  const double d3 = (fp1 - fm1) / (2.0 * d);
  const double d3wide = (fp2 - fm2) / (4.0 * d);
  const double d5 = (4.0 * d3 - d3wide) / 3.0;
  return {d5, std::abs(d5 - d3)};
}

}  // namespace detail

/// d/dt[w int phi(x/lambda) u] + A1 + A2 + A3 + A4 = 0 with w = t^{-a} log^{-2} t and
///   A1 = -w' int phi u,             A2 = w (lambda'/lambda) int (x/lambda) phi'(x/lambda) u,
///   A3 = -w int phi D^{alpha+1} u_x, A4 = -(w / (2 lambda)) int phi'(x/lambda) u^2.
inline IdentityLedger step1_ledger(const Trajectory& traj, const weights::WindowLaw& law, double alpha, double t,
                                  double tolerance = 1e-6) {
  require(std::abs(law.alpha() - alpha) < 1e-15, "step1_ledger: window law built for a different alpha");
  require(std::abs(traj.alpha - alpha) < 1e-15, "step1_ledger: trajectory computed with a different alpha");
  const auto [i, d] = detail::stencil(traj, t);
  auto F = [&](std::size_t j) {
    const double tj = traj.times[j];
    return law.prefactor(tj) * inner(law.weight_at(tj).sample_antiderivative(traj.states[j].grid()), traj.states[j]);
  };
  IdentityLedger L;
  L.name = "step1";
  L.t = t;
  L.tolerance = tolerance;
  std::tie(L.ddt_term, L.fd_error_estimate) = detail::richardson_derivative(i, d, F);

  const RealField& u = traj.states[i];
  const Grid& g = u.grid();
  L.seam_fraction = detail::seam_fraction(u);
  const double w = law.prefactor(t), wp = law.prefactor_derivative(t), lam = law.lambda(t);
  const weights::WeightSpec spec = law.weight_at(t);
  const RealField phi = spec.sample_antiderivative(g);
  const RealField dphi = spec.sample_density(g);
  const RealField xl = RealField::from_function(g, [lam](double x) { return x / lam; });
  L.terms = {{"A1", -wp * inner(phi, u)},
             {"A2", w * law.lambda_log_derivative(t) * inner(xl * dphi, u)},
             {"A3", -w * inner(phi, fractional_derivative(derivative(u), alpha + 1.0))},
             {"A4", traj.nonlinear ? -w / (2.0 * lam) * inner(dphi, u * u) : 0.0}};
  L.close();
  return L;
}

/// (1/2) d/dt[w int phi u^2] + A1 + A2 + A31 + A32 + A33 + A4 = 0 with
///   A1 = -(w'/2) int phi u^2,  A2 = (w/2)(lambda'/lambda) int (x/lambda) phi' u^2,
///   A31 + A32 + A33 = -w int phi u D^{alpha+1} u_x (split with R_0, P_0),
///   A4 = -(w / (3 lambda)) int phi' u^3.
/// A4 is zero for trajectories computed without the nonlinearity.
inline IdentityLedger step2_ledger(const Trajectory& traj, const weights::WindowLaw& law, double alpha, double t,
                                  double tolerance = 1e-6) {
  require(std::abs(law.alpha() - alpha) < 1e-15, "step2_ledger: window law built for a different alpha");
  require(std::abs(traj.alpha - alpha) < 1e-15, "step2_ledger: trajectory computed with a different alpha");
  const auto [i, d] = detail::stencil(traj, t);
  auto F = [&](std::size_t j) {
    const double tj = traj.times[j];
    const RealField& uj = traj.states[j];
    return 0.5 * law.prefactor(tj) * inner(law.weight_at(tj).sample_antiderivative(uj.grid()), uj * uj);
  };
  IdentityLedger L;
  L.name = "step2";
  L.t = t;
  L.tolerance = tolerance;
  std::tie(L.ddt_term, L.fd_error_estimate) = detail::richardson_derivative(i, d, F);

  const RealField& u = traj.states[i];
  const Grid& g = u.grid();
  L.seam_fraction = detail::seam_fraction(u);
  const double w = law.prefactor(t), wp = law.prefactor_derivative(t), lam = law.lambda(t);
  const weights::WeightSpec spec = law.weight_at(t);
  const RealField phi = spec.sample_antiderivative(g);
  const RealField dphi = spec.sample_density(g);
  const RealField xl = RealField::from_function(g, [lam](double x) { return x / lam; });
  const RealField u2 = u * u;
  const A3Split a3 = step2_A3_decomposition(u, spec, alpha, w);
  L.terms = {{"A1", -0.5 * wp * inner(phi, u2)},
             {"A2", 0.5 * w * law.lambda_log_derivative(t) * inner(xl * dphi, u2)},
             {"A31", a3.a31},
             {"A32", a3.a32},
             {"A33", a3.a33},
             {"A4", traj.nonlinear ? -w / (3.0 * lam) * inner(dphi, u2 * u) : 0.0}};
  L.close();
  return L;
}

// ---------------------------------------------------------------------------------------------
// Virial identity d/dt int x u = (1/2) int u^2

struct VirialReport {
  std::vector<double> times;        // interior samples
  std::vector<double> moment_rate;  // 5-point d/dt int x u
  std::vector<double> half_l2;      // (1/2) int u^2
  double max_relative_mismatch = 0.0;
  double slope = 0.0;        // least-squares slope of int x u over all samples
  double expected_slope = 0.0;  // M(0)/2
};

/// Refuses states that are not negligible (|u| > edge_tol) in the outer `edge_fraction` of the box.
inline VirialReport virial(const Trajectory& traj, double edge_tol = 1e-8, double edge_fraction = 0.02) {
  require(traj.states.size() == traj.times.size(), "virial: trajectory was recorded without states");
  require(traj.size() >= 5, "virial: need at least 5 samples");
  const double d = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < traj.size(); ++i)
    require(std::abs(traj.times[i] - traj.times[i - 1] - d) <= 1e-9 * d, "virial: samples must be uniformly spaced");

  std::vector<double> moment(traj.size()), half(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const RealField& u = traj.states[i];
    const Grid& g = u.grid();
    const double edge = edge_fraction * 0.5 * g.length();
    for (std::size_t j = 0; j < g.size(); ++j)
      if (std::abs(g.node(j)) > 0.5 * g.length() - edge && std::abs(u[j]) > edge_tol)
        throw DegenerateInput("virial: state at t=" + std::to_string(traj.times[i]) +
                              " is not localized (|u| exceeds tolerance near the box ends)");
    moment[i] = inner(RealField::from_function(g, [](double x) { return x; }), u);
    half[i] = 0.5 * inner(u, u);
  }

  VirialReport r;
  r.expected_slope = half.front();
  for (std::size_t i = 2; i + 2 < traj.size(); ++i) {
    const double rate = (-moment[i + 2] + 8.0 * moment[i + 1] - 8.0 * moment[i - 1] + moment[i - 2]) / (12.0 * d);
    r.times.push_back(traj.times[i]);
    r.moment_rate.push_back(rate);
    r.half_l2.push_back(half[i]);
    if (half[i] > 0.0) r.max_relative_mismatch = std::max(r.max_relative_mismatch, std::abs(rate - half[i]) / half[i]);
  }
  double mt = 0.0, mm = 0.0;
  const double n = static_cast<double>(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) mt += traj.times[i], mm += moment[i];
  mt /= n, mm /= n;
  double stt = 0.0, stm = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    stt += (traj.times[i] - mt) * (traj.times[i] - mt);
    stm += (traj.times[i] - mt) * (moment[i] - mm);
  }
  r.slope = stm / stt;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Inequality diagnostics

/// ||u||_p / (||u||_2^{1-theta} ||D^{(1+alpha)/2} u||_2^theta), theta = (p-2)/((alpha+1) p).
inline double gn_check(const RealField& u, double p, double alpha) {
  require(p >= 2.0 && p <= 16.0, "gn_check: p must lie in [2, 16]");
  const double l2 = norm_l2(u);
  if (l2 == 0.0) throw DegenerateInput("gn_check: zero field");
  const double theta = (p - 2.0) / ((alpha + 1.0) * p);
  if (theta == 0.0) return norm_lp(u, p) / l2;
  const double dn = norm_l2(fractional_derivative(u, 0.5 * (1.0 + alpha)));
  if (dn == 0.0) throw DegenerateInput("gn_check: derivative norm vanishes with p > 2");
  return norm_lp(u, p) / (std::pow(l2, 1.0 - theta) * std::pow(dn, theta));
}

/// ||D^mu(f g) - g D^mu f||_2 / (||f||_4 ||D^mu g||_4), mu = (alpha+1)/2.
inline double leibniz_check(const RealField& f, const RealField& g, double alpha) {
  const double mu = 0.5 * (alpha + 1.0);
  const RealField dg = fractional_derivative(g, mu);
  const double den = norm_lp(f, 4.0) * norm_lp(dg, 4.0);
  if (!(den > 0.0)) throw DegenerateInput("leibniz_check: denominator vanishes");
  return norm_l2(fractional_derivative(f * g, mu) - g * fractional_derivative(f, mu)) / den;
}

struct CubicWeightResult {
  double lhs = 0.0;        // int |v|^3 phi'
  double rhs_ratio = 0.0;  // lhs / int v^2 phi'
  double sup_bound = 0.0;  // sum_m |v_m| >= ||v||_inf >= rhs_ratio
};

/// v = u(x - shift) rescaled to the given H^{(alpha+1)/2} norm, measured against phi_alpha'(x).
inline CubicWeightResult cubic_weight_check(const RealField& u, double shift_by, double alpha, double h_half_norm) {
  const double s = 0.5 * (alpha + 1.0);
  const double norm = sobolev_norm(u, s);
  if (norm == 0.0) throw DegenerateInput("cubic_weight_check: zero field");
  require(h_half_norm > 0.0, "cubic_weight_check: target norm must be positive");
  const RealField v = shift(u, shift_by) * (h_half_norm / norm);
  const Grid& g = u.grid();
  const RealField w = RealField::from_function(g, [alpha](double x) { return weights::phi_prime(x, alpha); });
  RealField abs_v(g);
  for (std::size_t j = 0; j < g.size(); ++j) abs_v[j] = std::abs(v[j]);
  CubicWeightResult r;
  r.lhs = inner(w, abs_v * v * v);
  r.rhs_ratio = r.lhs / inner(w, v * v);
  const SpectralField vh = fft::to_spectral(v);
  for (const auto& c : vh.coefficients()) r.sup_bound += std::abs(c);
  return r;
}

/// Grid-independent bound on sup|v| for ||v||_{H^s} = norm: sqrt(sum_m (1+k_m^2)^{-s} / L) * norm.
inline double sobolev_sup_bound(const Grid& g, double s, double norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k = g.wavenumber(g.mode(i));
    acc += std::pow(1.0 + k * k, -s);
  }
  return std::sqrt(acc / g.length()) * norm;
}

}  // namespace dgbo
