#pragma once

// Verification suites. Each check compares the library against an oracle that does not share its
// code path: closed forms, Beta/Gamma identities, dense matrices built from the defining sums, or
// exact solutions. The ten numbered criteria are also run by the acceptance test.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dgbo/cli/config.hpp"
#include "dgbo/cli/io.hpp"
#include "dgbo/cli/runner.hpp"
#include "dgbo/commutators.hpp"
#include "dgbo/evolution.hpp"
#include "dgbo/functionals.hpp"
#include "dgbo/ground_state.hpp"
#include "dgbo/random_fields.hpp"
#include "dgbo/spectral.hpp"
#include "dgbo/weights.hpp"

namespace dgbo::verify {

struct Row {
  std::string name;
  double value = 0.0;
  std::string limit;  // human-readable bound, e.g. "<= 1e-6"
  bool pass = false;
};

struct Criterion {
  int id = 0;  // 0 for module rows outside the numbered list
  std::string title;
  std::vector<Row> rows;
  bool pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return !rows.empty();
  }
};

namespace detail {

using std::numbers::pi;

inline std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

inline Row at_most(std::string name, double value, double bound) {
  return {std::move(name), value, "<= " + sci(bound), value <= bound};
}
inline Row at_least(std::string name, double value, double bound) {
  return {std::move(name), value, ">= " + sci(bound), value >= bound};
}
inline Row within(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, "in [" + sci(lo) + ", " + sci(hi) + "]", value >= lo && value <= hi};
}

inline double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline RealField gaussian(const Grid& g, double amp, double width, double x0 = 0.0) {
  return RealField::from_function(g, [=](double x) { return amp * std::exp(-std::pow((x - x0) / width, 2)); });
}

constexpr double kAlphas[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// Dense operators from the defining Fourier sums, independent of the FFT path.
struct Dense {
  std::size_t n;
  std::vector<double> a;
  explicit Dense(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  friend Dense operator*(const Dense& x, const Dense& y) {
    Dense z(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
      for (std::size_t k = 0; k < x.n; ++k)
        for (std::size_t j = 0; j < x.n; ++j) z(i, j) += x(i, k) * y(k, j);
    return z;
  }
  friend Dense operator+(Dense x, const Dense& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Dense operator*(double s, Dense x) {
    for (double& v : x.a) v *= s;
    return x;
  }
  std::vector<double> apply(const RealField& h) const {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += (*this)(i, j) * h[j];
    return y;
  }
};

inline Dense multiplier(const Grid& g, const std::function<std::complex<double>(double)>& symbol) {
  const std::size_t n = g.size();
  Dense m(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      std::complex<double> acc{};
      for (long q = -static_cast<long>(n / 2) + 1; q < static_cast<long>(n / 2); ++q) {
        const double k = g.wavenumber(q);
        acc += symbol(k) * std::exp(std::complex<double>(0.0, k * (g.node(j) - g.node(l))));
      }
      m(j, l) = acc.real() / static_cast<double>(n);
    }
  return m;
}

inline Dense diag(const RealField& f) {
  Dense d(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) d(j, j) = f[j];
  return d;
}

// R_0 = -[H D^a, f] - (P - H P H)/2 with P = a D^mu f' D^mu, mu = (a-1)/2.
inline Dense dense_R0(const Grid& g, const RealField& f, const RealField& fp, double a) {
  const Dense h = multiplier(g, [](double k) { return std::complex<double>(0.0, k > 0 ? -1.0 : (k < 0 ? 1.0 : 0.0)); });
  auto power = [&g](double s) {
    return multiplier(g, [s](double k) { return std::complex<double>(k == 0.0 ? 0.0 : std::pow(std::abs(k), s), 0.0); });
  };
  const Dense hd = h * power(a);
  const Dense fm = diag(f);
  const Dense dm = power(0.5 * (a - 1.0));
  const Dense p = a * (dm * diag(fp) * dm);
  return (-1.0 * (hd * fm)) + (fm * hd) + (-0.5 * p) + (0.5 * (h * p * h));
}

inline RealField periodized_gaussian(const Grid& g, double width) {
  return RealField::from_function(g, [&g, width](double x) {
    double s = 0.0;
    for (int r = -3; r <= 3; ++r) s += std::exp(-std::pow((x + r * g.length()) / width, 2));
    return s;
  });
}

// phi_alpha(x/lambda) minus the linear ramp that makes it periodic.
inline RealField periodic_phi_lift(const Grid& g, double alpha, double lambda) {
  const double half = 0.5 * g.length();
  const double jump = weights::phi(half / lambda, alpha) - weights::phi(-half / lambda, alpha);
  return RealField::from_function(g, [=](double x) { return weights::phi(x / lambda, alpha) - jump * (x + half) / (2 * half); });
}

// (2 pi)^{-1/2} ||(D^a e^{-x^2/w^2})^||_1 in closed form.
inline double gaussian_bound_rhs(double a, double w) {
  const double beta = pi * pi * w * w;
  return w * std::sqrt(pi) * std::pow(2.0 * pi, a) * std::tgamma(0.5 * (a + 1.0)) / std::pow(beta, 0.5 * (a + 1.0));
}

template <typename F>
double ensemble_max(std::size_t n, long max_mode, std::uint64_t seed, F&& ratio) {
  const Grid g(n, 20.0 * pi);
  std::mt19937_64 rng(seed);
  double m = 0.0;
  for (int i = 0; i < 1000; ++i) m = std::max(m, ratio(g, max_mode, rng));
  return m;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------

inline Criterion operators_rows() {
  using namespace detail;
  Criterion c{0, "spectral operators", {}};
  const Grid g(64, 2.0 * pi);
  const RealField co = RealField::from_function(g, [](double x) { return std::cos(3.0 * x); });
  const RealField si = RealField::from_function(g, [](double x) { return std::sin(3.0 * x); });
  c.rows.push_back(at_most("H cos 3x = sin 3x", max_abs_diff(hilbert(co), si), 1e-13));
  c.rows.push_back(at_most("D^1.5 cos 3x = 3^1.5 cos 3x", max_abs_diff(fractional_derivative(co, 1.5), co * std::pow(3.0, 1.5)), 1e-12));
  c.rows.push_back(at_most("d/dx cos 3x = -3 sin 3x", max_abs_diff(derivative(co), si * -3.0), 1e-12));
  c.rows.push_back(at_most("H^2 = -1 on mean-zero fields", max_abs_diff(hilbert(hilbert(co)), co * -1.0), 1e-13));
  std::mt19937_64 rng(3);
  const RealField u = random_band_limited(Grid(256, 30.0), 100, rng);
  c.rows.push_back(at_most("Parseval |1 - L sum|u_m|^2 / int u^2|",
                           rel(spectral_energy(fft::to_spectral(u)), inner(u, u)), 1e-12));
  c.rows.push_back(at_most("shift by L/4 of cos(2 pi x / L) is sin",
                           max_abs_diff(shift(RealField::from_function(Grid(64, 8.0), [](double x) { return std::cos(pi * x / 4.0); }), 2.0),
                                        RealField::from_function(Grid(64, 8.0), [](double x) { return std::sin(pi * x / 4.0); })),
                           1e-13));
  return c;
}

inline Criterion criterion_1() {
  using namespace detail;
  Criterion c{1, "weight Fourier identity", {}};
  double worst = 0.0;
  for (double xi = 0.0; xi <= 5.0; xi += 0.125) worst = std::max(worst, rel(weights::phi_prime_hat(xi, 0.0), pi * std::exp(-2.0 * pi * xi)));
  c.rows.push_back(at_most("alpha=0 transform vs pi e^{-2 pi |xi|}, xi in [0,5]", worst, 1e-6));
  for (double a : kAlphas) {
    const double want = std::sqrt(pi) * std::tgamma(0.5 * (a + 1.0)) / std::tgamma(0.5 * (a + 2.0));
    c.rows.push_back(at_most("transform at 0 vs Beta mass, alpha=" + sci(a), rel(weights::phi_prime_hat(0.0, a), want), 1e-8));
  }
  return c;
}

inline Criterion criterion_2() {
  using namespace detail;
  Criterion c{2, "moment integral", {}};
  for (double a : kAlphas) {
    const double p = 0.5 * (2.0 * a + 3.0);
    c.rows.push_back(at_most("moment vs Gamma closed form, alpha=" + sci(a), rel(weights::moment_integral(a), std::tgamma(p) / std::pow(pi, p)), 1e-6));
  }
  c.rows.push_back(at_most("alpha=1 spot value 3/(4 pi^2)", rel(weights::moment_integral(1.0), 3.0 / (4.0 * pi * pi)), 1e-6));
  c.rows.push_back(at_most("alpha=0 spot value 1/(2 pi)", rel(weights::moment_integral(0.0), 1.0 / (2.0 * pi)), 1e-6));
  return c;
}

inline Criterion criterion_3() {
  using namespace detail;
  Criterion c{3, "commutator remainder bound", {}};
  {
    const Grid g(64, 16.0);
    const RealField f = periodized_gaussian(g, 2.0);
    const auto spec = CommutatorSpec::periodic(f, 2.5, 0);
    const Dense r = dense_R0(g, f, spec.odd_derivative(0), 2.5);
    std::mt19937_64 rng(37);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const RealField h = random_band_limited(g, 31, rng);
      const std::vector<double> want = r.apply(h);
      const RealField got = apply_R_n(spec, h);
      for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(got[j] - want[j]));
    }
    c.rows.push_back(at_most("R_0 vs dense oracle, N=64 (max abs)", worst, 1e-10));
  }
  const Grid g(1024, 200.0);
  std::mt19937_64 rng(59);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double a = alpha + 2.0;
    const std::pair<std::string, std::pair<RealField, double>> cases[] = {
        {"gaussian", {periodized_gaussian(g, 2.0), gaussian_bound_rhs(a, 2.0)}},
        {"phi(x/2)", {periodic_phi_lift(g, alpha, 2.0), phi_weight_bound_rhs(alpha, 2.0)}},
        {"phi(x/5)", {periodic_phi_lift(g, alpha, 5.0), phi_weight_bound_rhs(alpha, 5.0)}}};
    for (const auto& [name, fc] : cases) {
      const auto spec = CommutatorSpec::periodic(fc.first, a, 0);
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const RealField h = random_band_limited(g, 340, rng);
        worst = std::max(worst, norm_l2(apply_R_n(spec, h)) / (fc.second * norm_l2(h)));
      }
      c.rows.push_back(at_most("||R h|| / (C ||(D^a f)^||_1 ||h||), C=1, 100 h, " + name + ", alpha=" + sci(alpha), worst, 1.05));
    }
  }
  return c;
}

inline Criterion criterion_4() {
  using namespace detail;
  Criterion c{4, "solitary-wave oracles", {}};
  {
    const Grid g(4096, 100.0);
    const SolitaryWave w = solve_petviashvili(1.0, 1.0, g);
    const RealField exact = RealField::from_function(g, [](double x) { return 3.0 / std::pow(std::cosh(0.5 * x), 2); });
    c.rows.push_back(at_most("alpha=1 profile vs 3 sech^2(x/2) (max abs)", max_abs_diff(w.profile, exact), 1e-6));
  }
  {
    const Grid g(16384, 400.0 * pi);
    const RealField q = RealField::from_function(g, [](double x) { return 4.0 / (1.0 + x * x); });
    c.rows.push_back(at_most("alpha=0 residual of 4/(1+x^2), L=400 pi (relative max)", profile_equation_residual(q, 0.0, 1.0), 1e-3));
  }
  {
    const double alpha = 0.5, speed = 2.0, kappa = std::pow(speed, 1.0 / (1.0 + alpha));
    const Grid g1(4096, 200.0), gc(4096, 200.0 / kappa);
    const SolitaryWave w1 = solve_petviashvili(alpha, 1.0, g1);
    const SolitaryWave wc = solve_petviashvili(alpha, speed, gc);
    double err = 0.0;
    for (std::size_t j = 0; j < g1.size(); ++j) err = std::max(err, std::abs(wc.profile[j] - speed * w1.profile[j]));
    c.rows.push_back(at_most("Q_c(x) = c Q_1(c^{1/(1+alpha)} x), c=2, alpha=0.5 (relative max)", err / wc.profile.max_abs(), 1e-6));
  }
  return c;
}

inline Criterion criterion_5() {
  using namespace detail;
  Criterion c{5, "evolution correctness", {}};
  auto sech2 = [](const Grid& g, double x0) {
    return RealField::from_function(g, [x0](double x) { return 3.0 / std::pow(std::cosh(0.5 * (x - x0)), 2); });
  };
  {
    const Grid g(1024, 200.0);
    EquationParams p;
    p.alpha = 1.0;
    p.dt = 0.01;
    p.t_end = 10.0;
    const Trajectory tr = evolve(sech2(g, 0.0), p, {10.0});
    c.rows.push_back(at_most("soliton translation error at T=10, alpha=1", max_abs_diff(tr.states.back(), sech2(g, 10.0)), 1e-6));
  }
  {
    const Grid g(256, 2.0 * pi * 8.0);
    const double k0 = g.wavenumber(5), alpha = 0.5, t = 3.7;
    EquationParams p;
    p.alpha = alpha;
    p.dt = 0.013;
    p.t_end = t;
    p.nonlinear = false;
    const Trajectory tr = evolve(RealField::from_function(g, [=](double x) { return std::cos(k0 * x); }), p, {t});
    const RealField exact = RealField::from_function(g, [=](double x) { return std::cos(k0 * x + std::pow(k0, alpha + 2.0) * t); });
    c.rows.push_back(at_most("linear mode phase cos(kx + k^{alpha+2} t)", max_abs_diff(tr.states.back(), exact), 1e-12));
  }
  {
    const Grid g(4096, 400.0);
    EquationParams p;
    p.alpha = 0.5;
    p.dt = 0.02;
    p.t_end = 100.0;
    const Trajectory tr = evolve(gaussian(g, 1.0, 5.0), p, {0.0, 25.0, 50.0, 75.0, 100.0}, {}, false);
    const ConservedTriple& c0 = tr.conserved.front();
    double dm = 0.0, dl = 0.0, de = 0.0;
    for (const auto& q : tr.conserved) {
      dm = std::max(dm, rel(q.mass, c0.mass));
      dl = std::max(dl, rel(q.l2, c0.l2));
      de = std::max(de, rel(q.energy, c0.energy));
    }
    c.rows.push_back(at_most("mass drift over T=100 (relative)", dm, 1e-13));
    c.rows.push_back(at_most("M drift over T=100 (relative)", dl, 1e-8));
    c.rows.push_back(at_most("E drift over T=100 (relative)", de, 1e-8));
  }
  {
    const Grid g(1024, 200.0);
    EquationParams p;
    p.alpha = 1.0;
    p.t_end = 10.0;
    double err[2], drift[2];
    const double dts[2] = {0.01, 0.005};
    for (int i = 0; i < 2; ++i) {
      p.dt = dts[i];
      const Trajectory tr = evolve(sech2(g, 0.0), p, {0.0, 10.0});
      err[i] = max_abs_diff(tr.states.back(), sech2(g, 10.0));
      drift[i] = rel(tr.conserved[1].l2, tr.conserved[0].l2);
    }
    c.rows.push_back(within("dt halving: state error ratio", err[0] / err[1], 13.0, 19.0));
    c.rows.push_back(at_least("dt halving: M drift ratio (RK4 drift is O(dt^5))", drift[0] / drift[1], 13.0));
  }
  return c;
}

inline Criterion criterion_6() {
  using namespace detail;
  Criterion c{6, "virial identity", {}};
  const Grid g(16384, 3200.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 0.02;
  p.t_end = 50.0;
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i) ts.push_back(0.5 * i);
  const VirialReport r = virial(evolve(gaussian(g, 1.0, 5.0), p, ts));
  c.rows.push_back(at_most("slope of int x u vs M(0)/2 (relative)", rel(r.slope, r.expected_slope), 1e-3));
  c.rows.push_back(at_most("pointwise |d/dt int x u - M/2| / (M/2)", r.max_relative_mismatch, 1e-4));
  return c;
}

inline Criterion criterion_7() {
  using namespace detail;
  Criterion c{7, "identity ledgers", {}};
  const Grid g(4096, 400.0);
  const double delta = 0.01;
  for (double alpha : {0.25, 0.5, 0.75}) {
    EquationParams p;
    p.alpha = alpha;
    p.dt = 1e-3;
    p.t_end = std::exp(3.0) + 3.0 * delta;
    std::vector<double> ts;
    for (double t : {std::exp(2.0), std::exp(3.0)})
      for (int k = -2; k <= 2; ++k) ts.push_back(t + k * delta);
    const Trajectory tr = evolve(gaussian(g, 1.0, 5.0), p, ts);
    const weights::WindowLaw law(0.0, 1.0, alpha);
    double a3 = std::numeric_limits<double>::infinity();
    for (int e : {2, 3}) {
      const double t = std::exp(static_cast<double>(e));
      const IdentityLedger s1 = step1_ledger(tr, law, alpha, t);
      const IdentityLedger s2 = step2_ledger(tr, law, alpha, t);
      const std::string tag = ", alpha=" + sci(alpha) + ", t=e^" + std::to_string(e);
      c.rows.push_back(at_most("step-1 closure" + tag, s1.closure_residual, 1e-6));
      c.rows.push_back(at_most("step-2 closure" + tag, s2.closure_residual, 1e-6));
      a3 = std::min({a3, s2.term("A32"), s2.term("A33")});
    }
    c.rows.push_back(at_least("min(A32, A33), alpha=" + sci(alpha), a3, 0.0));
  }
  return c;
}

inline Criterion criterion_8() {
  using namespace detail;
  Criterion c{8, "decay proxy", {}};
  const double alpha = 0.5;
  const Grid g(16384, 1600.0);
  const weights::WindowLaw law(0.0, 1.0, alpha);
  std::vector<double> ts{10.0};
  for (double t : sample_times(0.1, alpha, 40, 10.0))
    if (t > 10.0 && t < 200.0) ts.push_back(t);
  ts.push_back(200.0);
  EquationParams p;
  p.alpha = alpha;
  p.dt = 0.02;
  p.t_end = 200.0;
  const DecayReport gr = decay_report(evolve(gaussian(g, 1.0, 5.0), p, ts), law);
  c.rows.push_back(at_least("Gaussian: runmin J(10) / runmin J(200)", gr.running_min_at(10.0) / gr.running_min_at(200.0), 5.0));
  const SolitaryWave w = solve_petviashvili(alpha, 1.0, g);
  p.dt = std::min(p.dt, EquationParams::max_stable_dt(w.profile));
  const DecayReport sr = decay_report(evolve(w.profile, p, {10.0, 200.0}), law);
  c.rows.push_back(at_most("soliton: J(200) / J(10)", sr.J[1] / sr.J[0], 0.2));
  return c;
}

inline Criterion criterion_9() {
  using namespace detail;
  Criterion c{9, "inequality diagnostics", {}};
  const double alpha = 0.5;
  for (double p : {4.0, 8.0}) {
    auto gn = [p, alpha](const Grid& g, long mm, std::mt19937_64& rng) { return gn_check(random_band_limited(g, mm, rng), p, alpha); };
    const double coarse = ensemble_max(128, 30, 2024, gn), fine = ensemble_max(256, 30, 2024, gn);
    c.rows.push_back(at_most("GN p=" + sci(p) + ": |max(2N)/max(N) - 1|, 1000 fields", std::isfinite(coarse) ? rel(fine, coarse) : 1.0, 0.05));
  }
  {
    auto lb = [alpha](const Grid& g, long mm, std::mt19937_64& rng) {
      const RealField f = random_band_limited(g, mm, rng);
      return leibniz_check(f, random_band_limited(g, mm, rng), alpha);
    };
    const double coarse = ensemble_max(128, 30, 2025, lb), fine = ensemble_max(256, 30, 2025, lb);
    c.rows.push_back(at_most("Leibniz: |max(2N)/max(N) - 1|, 1000 pairs", std::isfinite(coarse) ? rel(fine, coarse) : 1.0, 0.05));
  }
  {
    const double norm = 2.0;
    const Grid g(2048, 400.0);
    const double bound = sobolev_sup_bound(g, 0.5 * (alpha + 1.0), norm);
    const SolitaryWave w = solve_petviashvili(alpha, 1.0, g);
    double hi = 0.0;
    for (double s = -50.0; s <= 50.0; s += 2.5) hi = std::max(hi, cubic_weight_check(w.profile, s, alpha, norm).rhs_ratio);
    c.rows.push_back(at_most("cubic ratio over shifts in [-50,50], soliton, ||.||_{H^{3/4}}=2 (/ Sobolev sup bound)", hi / bound, 1.0));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> where(-50.0, 50.0);
    hi = 0.0;
    for (int i = 0; i < 1000; ++i) hi = std::max(hi, cubic_weight_check(random_band_limited(g, 60, rng), where(rng), alpha, norm).rhs_ratio);
    c.rows.push_back(at_most("cubic ratio, 1000 random fields and shifts (/ Sobolev sup bound)", hi / bound, 1.0));
  }
  return c;
}

/// Small run configuration used for the reproducibility check.
inline cli::Json reproducibility_config(const std::string& output) {
  cli::Json j = cli::Json::parse(R"({
    "schema_version": 1, "scenario": "reproducibility", "alpha": 0.5,
    "grid": {"N": 512, "L": 100.0}, "dt": 0.02, "t_end": 8.0,
    "initial": {"type": "gaussian", "amplitude": 1.0, "width": 5.0},
    "samples": {"type": "uniform", "dt_sample": 0.5},
    "diagnostics": {"J": true, "ledgers": {"times": [5.0], "delta": 0.02}, "inequality_ensemble": 50,
                    "checkpoint_samples": true},
    "seed": 17
  })");
  j["output"] = output;
  return j;
}

inline Criterion criterion_10() {
  using namespace detail;
  namespace fs = std::filesystem;
  Criterion c{10, "reproducibility", {}};
  const fs::path root = fs::temp_directory_path() / ("dgbo-verify-" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  const char* old = std::getenv("DGBO_OUTPUT_ROOT");
  const std::string saved = old ? old : "";
  setenv("DGBO_OUTPUT_ROOT", root.string().c_str(), 1);
  std::size_t files = 0, differing = 0;
  try {
    cli::Json a = reproducibility_config("a"), b = reproducibility_config("b");
    cli::run(cli::parse_config(a), a);
    cli::run(cli::parse_config(b), b);
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (!e.is_regular_file()) continue;
      const fs::path rel_path = fs::relative(e.path(), root / "a");
      if (rel_path == "config.json") continue;  // differs by the output name only
      ++files;
      if (slurp(e.path()) != slurp(root / "b" / rel_path)) ++differing;
    }
  } catch (...) {
    if (old) setenv("DGBO_OUTPUT_ROOT", saved.c_str(), 1);
    else unsetenv("DGBO_OUTPUT_ROOT");
    fs::remove_all(root);
    throw;
  }
  if (old) setenv("DGBO_OUTPUT_ROOT", saved.c_str(), 1);
  else unsetenv("DGBO_OUTPUT_ROOT");
  c.rows.push_back(at_least("output files compared", static_cast<double>(files), 10.0));
  c.rows.push_back(at_most("files differing between two runs with the same seed", static_cast<double>(differing), 0.0));

  // write -> read -> write
  std::mt19937_64 rng(23);
  const cli::Checkpoint cp{0.5, 3.25, random_band_limited(Grid(256, 40.0), 100, rng)};
  std::ostringstream first;
  cli::write_checkpoint(first, cp);
  std::istringstream in(first.str());
  const cli::Checkpoint back = cli::read_checkpoint(in);
  std::ostringstream second;
  cli::write_checkpoint(second, back);
  const bool same_bytes = first.str() == second.str() && first.str().size() == 4 + 4 + 8 + 3 * 8 + 256 * 8;
  const bool same_values = back.state.values() == cp.state.values() && back.t == cp.t && back.alpha == cp.alpha;
  c.rows.push_back(at_most("checkpoint write-read-write byte mismatch", same_bytes && same_values ? 0.0 : 1.0, 0.0));
  fs::remove_all(root);
  return c;
}

// ---------------------------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"operators", "weights", "commutators", "groundstate", "evolution", "functionals", "all"};
  return names;
}

/// Runs a suite by name; throws InvalidArgument for unknown names.
inline std::vector<Criterion> run_suite(const std::string& name) {
  using F = Criterion (*)();
  std::vector<std::pair<std::string, std::vector<F>>> suites{
      {"operators", {operators_rows}},
      {"weights", {criterion_1, criterion_2}},
      {"commutators", {criterion_3}},
      {"groundstate", {criterion_4}},
      {"evolution", {criterion_5, criterion_10}},
      {"functionals", {criterion_6, criterion_7, criterion_8, criterion_9}}};
  std::vector<Criterion> out;
  bool found = false;
  for (const auto& [n, fs] : suites)
    if (name == n || name == "all") {
      found = true;
      for (F f : fs) out.push_back(f());
    }
  if (!found) throw InvalidArgument("unknown suite '" + name + "' (operators | weights | commutators | groundstate | evolution | functionals | all)");
  return out;
}

inline void print_table(std::ostream& out, const std::vector<Criterion>& cs) {
  for (const auto& c : cs) {
    out << (c.id ? "[" + std::to_string(c.id) + "] " : "[-] ") << c.title << '\n';
    for (const auto& r : c.rows) {
      char v[32];
      std::snprintf(v, sizeof v, "%.6g", r.value);
      out << "    " << (r.pass ? "ok  " : "FAIL") << "  " << r.name << "  = " << v << "  (" << r.limit << ")\n";
    }
  }
}

}  // namespace dgbo::verify
