#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dgbo/evolution.hpp"
#include "dgbo/ground_state.hpp"

using namespace dgbo;
using std::numbers::pi;

namespace {

RealField gaussian(const Grid& g, double amp, double width, double x0 = 0.0) {
  return RealField::from_function(g, [=](double x) { return amp * std::exp(-std::pow((x - x0) / width, 2)); });
}

double rel_drift(double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); }

}  // namespace

TEST(ConservedTest, TrigonometricValues) {
  const Grid g(64, 2.0 * pi);
  const RealField s = RealField::from_function(g, [](double x) { return std::sin(x); });
  const ConservedTriple c = conserved(s, 1.0);
  EXPECT_NEAR(c.mass, 0.0, 1e-14);
  EXPECT_NEAR(c.l2, pi, 1e-13);
  EXPECT_NEAR(c.energy, pi / 2.0, 1e-13);
}

TEST(ConservedTest, Constant) {
  const Grid g(64, 10.0);
  const double k = 0.7;
  const ConservedTriple c = conserved(RealField::from_function(g, [k](double) { return k; }), 0.5);
  EXPECT_NEAR(c.mass, k * 10.0, 1e-13);
  EXPECT_NEAR(c.l2, k * k * 10.0, 1e-13);
  EXPECT_NEAR(c.energy, -k * k * k * 10.0 / 6.0, 1e-13);
}

TEST(EvolveTest, ZeroStaysZero) {
  const Grid g(256, 50.0);
  EquationParams p;
  p.dt = 0.01;
  p.t_end = 1.0;
  const Trajectory tr = evolve(RealField(g), p, {0.0, 0.5, 1.0});
  for (const auto& u : tr.states) EXPECT_EQ(u.max_abs(), 0.0);
}

// cos(k0 x) evolves to cos(k0 x + k0^{alpha+2} t) under the linear flow.
TEST(EvolveTest, LinearModePhase) {
  const Grid g(256, 2.0 * pi * 8.0);
  const double k0 = g.wavenumber(5), alpha = 0.5;
  const double t = 3.7;
  auto exact = [&](double amp) {
    return RealField::from_function(g, [=](double x) { return amp * std::cos(k0 * x + std::pow(k0, alpha + 2.0) * t); });
  };
  EquationParams p;
  p.alpha = alpha;
  p.dt = 0.013;
  p.t_end = t;
  const double eps = 1e-8;
  const Trajectory small = evolve(RealField::from_function(g, [=](double x) { return eps * std::cos(k0 * x); }), p, {t});
  EXPECT_LE(max_abs_diff(small.states.back(), exact(eps)), 1e-12);
  p.nonlinear = false;
  const Trajectory linear = evolve(RealField::from_function(g, [=](double x) { return std::cos(k0 * x); }), p, {t});
  EXPECT_LE(max_abs_diff(linear.states.back(), exact(1.0)), 1e-12);
}

TEST(EvolveTest, SolitonTranslates) {
  const Grid g(1024, 200.0);
  EquationParams p;
  p.alpha = 1.0;
  p.dt = 0.01;
  p.t_end = 10.0;
  const Trajectory tr = evolve(kdv_soliton(g, 1.0), p, {10.0});
  EXPECT_LE(max_abs_diff(tr.states.back(), kdv_soliton(g, 1.0, 10.0)), 1e-6);
}

TEST(EvolveTest, SampleTimesHitExactly) {
  const Grid g(256, 50.0);
  EquationParams p;
  p.dt = 0.03;
  p.t_end = 1.0;
  const std::vector<double> ts{0.0, 0.1, 0.2501, 1.0};
  const Trajectory tr = evolve(gaussian(g, 1.0, 3.0), p, ts);
  ASSERT_EQ(tr.size(), ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_EQ(tr.times[i], ts[i]);
  EXPECT_EQ(tr.states.size(), ts.size());
}

TEST(EvolveTest, Rejections) {
  const Grid g(256, 50.0);
  const RealField u = gaussian(g, 2.0, 3.0);
  EquationParams p;
  p.dt = 0.01;
  p.t_end = 1.0;
  EXPECT_THROW(evolve(u, p, {0.5, 0.2}), InvalidArgument);
  EXPECT_THROW(evolve(u, p, {1.5}), InvalidArgument);
  EXPECT_THROW(evolve(u, p, {}), InvalidArgument);
  p.dt = 0.1;  // 0.5 h / 2 = 0.049
  EXPECT_THROW(evolve(u, p, {1.0}), InvalidArgument);
  p.dt = 0.01;
  p.alpha = 1.5;
  EXPECT_THROW(evolve(u, p, {1.0}), InvalidArgument);
}

TEST(EvolveTest, NonFiniteAbortCarriesLastGoodState) {
  const Grid g(256, 50.0);
  const RealField u = gaussian(g, 1e200, 3.0);
  EquationParams p;
  p.dt = EquationParams::max_stable_dt(u);
  p.t_end = 10.0 * p.dt;
  try {
    evolve(u, p, {p.t_end});
    FAIL() << "expected abort";
  } catch (const EvolutionAborted& e) {
    EXPECT_EQ(e.last_time, 0.0);
    EXPECT_TRUE(e.last_state.all_finite());
    EXPECT_NEAR(e.last_state.max_abs() / 1e200, 1.0, 1e-6);
  }
}

TEST(ConservationTest, MassIsExactAndQuadraticInvariantsDrift) {
  const Grid g(4096, 400.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 0.02;
  p.t_end = 100.0;
  const Trajectory tr = evolve(gaussian(g, 1.0, 5.0), p, {0.0, 25.0, 50.0, 100.0}, {}, false);
  const ConservedTriple& c0 = tr.conserved.front();
  for (const auto& c : tr.conserved) {
    EXPECT_LE(std::abs(c.mass - c0.mass), 1e-13 * std::abs(c0.mass));
    EXPECT_LE(rel_drift(c0.l2, c.l2), 1e-8);
    EXPECT_LE(rel_drift(c0.energy, c.energy), 1e-8);
  }
}

TEST(ConservationTest, ReferenceResolutionL2Drift) {
  const Grid g(4096, 400.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 1e-3;
  p.t_end = 50.0;
  const Trajectory tr = evolve(gaussian(g, 1.0, 5.0), p, {0.0, 50.0}, {}, false);
  EXPECT_LE(rel_drift(tr.conserved[0].l2, tr.conserved[1].l2), 1e-10);
}

// The global error is fourth order. Drift of the quadratic invariants decays at least as fast
// (classical RK4 loses |R(iy)|^2 - 1 = O(y^6) per step, so drift is in fact O(dt^5)).
TEST(ConvergenceTest, FourthOrderInTime) {
  const Grid g(1024, 200.0);
  EquationParams p;
  p.alpha = 1.0;
  p.t_end = 10.0;
  double err[2], drift[2];
  const double dts[2] = {0.01, 0.005};
  for (int i = 0; i < 2; ++i) {
    p.dt = dts[i];
    const Trajectory tr = evolve(kdv_soliton(g, 1.0), p, {0.0, 10.0});
    err[i] = max_abs_diff(tr.states.back(), kdv_soliton(g, 1.0, 10.0));
    drift[i] = rel_drift(tr.conserved[0].l2, tr.conserved[1].l2);
  }
  EXPECT_NEAR(err[0] / err[1], 16.0, 3.0);
  EXPECT_GE(drift[0] / drift[1], 13.0);
}

TEST(EvolveTest, TimeReversalRecoversInitialData) {
  const Grid g(1024, 200.0);
  const RealField u0 = gaussian(g, 1.0, 5.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 0.01;
  p.t_end = 5.0;
  const Trajectory fwd = evolve(u0, p, {5.0});
  p.reverse = true;
  const Trajectory back = evolve(fwd.states.back(), p, {5.0});
  EXPECT_LE(max_abs_diff(back.states.back(), u0), 1e-8);
}

TEST(EvolveTest, ResolutionDoublingIsSpectrallyConverged) {
  const Grid coarse(2048, 400.0), fine(4096, 400.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 0.02;
  p.t_end = 10.0;
  const Trajectory a = evolve(gaussian(coarse, 1.0, 5.0), p, {10.0});
  const Trajectory b = evolve(gaussian(fine, 1.0, 5.0), p, {10.0});
  double err = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) err = std::max(err, std::abs(a.states.back()[j] - b.states.back()[2 * j]));
  EXPECT_LE(err, 1e-9);
}

TEST(L1MonitorTest, SyntheticPowerLaw) {
  Trajectory tr;
  tr.alpha = 0.5;
  for (double t : {0.0, 1.0, 3.0, 10.0, 30.0}) {
    tr.times.push_back(t);
    tr.l1_norms.push_back(2.0 * std::pow(1.0 + t * t, 0.15));
  }
  const L1Fit f = l1_monitor(tr);
  EXPECT_NEAR(f.a_hat, 0.3, 1e-12);
  EXPECT_NEAR(f.c0, 2.0, 1e-12);
  EXPECT_TRUE(f.below_threshold);
  EXPECT_LE(f.a_low, f.a_hat);
  EXPECT_GE(f.a_high, f.a_hat);
}

TEST(L1MonitorTest, DegenerateAndTooShort) {
  Trajectory tr;
  tr.times = {0.0, 1.0};
  tr.l1_norms = {0.0, 0.0};
  EXPECT_THROW(l1_monitor(tr), InvalidArgument);
  tr.times.push_back(2.0);
  tr.l1_norms.push_back(0.0);
  const L1Fit f = l1_monitor(tr);
  EXPECT_TRUE(f.degenerate);
  EXPECT_EQ(f.a_hat, 0.0);
  EXPECT_EQ(f.c0, 0.0);
}

TEST(L1MonitorTest, SolitonHasNoGrowth) {
  const Grid g(1024, 200.0);
  EquationParams p;
  p.alpha = 1.0;
  p.dt = 0.01;
  p.t_end = 20.0;
  const Trajectory tr = evolve(kdv_soliton(g, 1.0, -20.0), p, {0.0, 5.0, 10.0, 15.0, 20.0}, {}, false);
  EXPECT_LE(std::abs(l1_monitor(tr).a_hat), 0.02);
}

TEST(L1MonitorTest, DispersingGaussian) {
  const Grid g(4096, 800.0);
  EquationParams p;
  p.alpha = 0.5;
  p.dt = 0.05;
  p.t_end = 100.0;
  std::vector<double> ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(5.0 * i);
  const Trajectory tr = evolve(gaussian(g, 0.3, 5.0), p, ts, {}, false);
  const L1Fit f = l1_monitor(tr);
  RecordProperty("a_hat", std::to_string(f.a_hat));
  EXPECT_TRUE(std::isfinite(f.a_hat));
  EXPECT_LT(f.a_hat, 1.0 / 2.5);
  EXPECT_LE(f.a_low, f.a_hat);
}
