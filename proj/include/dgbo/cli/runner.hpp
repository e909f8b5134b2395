#pragma once

// Executes a RunConfig: evolution, the selected diagnostics and every output file.
//
// Output directory layout:
//   summary.json             machine-readable summary (also the run's exit report)
//   series.csv               t, mass, l2, energy, l1 [, J, runmin_J]
//   ledgers.csv              identity, t, ddt, A-terms, closure, fd_error, fd_limited, seam
//   virial.csv               t, d/dt int x u, 0.5 int u^2
//   checkpoints/*.dgbo       final state (and every sample when requested)
//   plots/*.dat, RECIPE.txt  two-column plot data and how to draw it

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dgbo/cli/config.hpp"
#include "dgbo/cli/io.hpp"
#include "dgbo/evolution.hpp"
#include "dgbo/functionals.hpp"
#include "dgbo/ground_state.hpp"
#include "dgbo/random_fields.hpp"

namespace dgbo::cli {

namespace fs = std::filesystem;

struct RunReport {
  Json summary;
  std::vector<std::string> failed_expectations;
  fs::path directory;
  bool ok() const { return failed_expectations.empty(); }
};

/// Output root: $DGBO_OUTPUT_ROOT, or ./runs.
inline fs::path output_root() {
  const char* env = std::getenv("DGBO_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

/// Initial state on the configured grid. Soliton profiles come from the Petviashvili solver.
inline RealField build_initial(const RunConfig& c) {
  const Grid g = c.grid();
  const InitialData& d = c.initial;
  switch (d.kind) {
    case InitialData::Kind::gaussian:
      return RealField::from_function(g, [&d](double x) { return d.amplitude * std::exp(-std::pow((x - d.center) / d.width, 2)); });
    case InitialData::Kind::mode: {
      const double k = g.wavenumber(d.mode);
      return RealField::from_function(g, [&d, k](double x) { return d.amplitude * std::cos(k * x); });
    }
    case InitialData::Kind::soliton: {
      PetviashviliOptions opt;
      opt.initial = petviashvili_guess(g, d.speed, d.center);
      return solve_petviashvili(c.params.alpha, d.speed, g, opt).profile;
    }
    case InitialData::Kind::file: {
      const Checkpoint cp = load_checkpoint(d.path);
      if (!(cp.state.grid() == g)) throw ConfigError("/initial/path", "checkpoint grid differs from /grid");
      if (cp.alpha != c.params.alpha) throw ConfigError("/initial/path", "checkpoint alpha differs from /alpha");
      return cp.state;
    }
  }
  throw ConfigError("/initial/type", "unhandled initial data type");
}

namespace detail {

inline bool close_times(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

inline std::vector<double> merge_times(std::vector<double> ts) {
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || !close_times(t, out.back())) out.push_back(t);
  return out;
}

// Uniform grid times as multiples of the step, so reruns hit identical values.
inline std::vector<double> uniform_times(double step, double t_end) {
  std::vector<double> ts;
  const long count = static_cast<long>(std::floor(t_end / step * (1.0 + 1e-12)));
  for (long i = 0; i <= count; ++i) ts.push_back(static_cast<double>(i) * step);
  return ts;
}

}  // namespace detail

/// The primary sample schedule (before ledger stencils are added).
inline std::vector<double> schedule_times(const RunConfig& c) {
  const SampleSchedule& s = c.samples;
  std::vector<double> ts;
  switch (s.kind) {
    case SampleSchedule::Kind::uniform:
      ts = detail::uniform_times(s.dt_sample, c.params.t_end);
      break;
    case SampleSchedule::Kind::sequence:
      for (double t : sample_times(s.epsilon, c.params.alpha, s.count, s.t_min))
        if (t <= c.params.t_end) ts.push_back(t);
      break;
    case SampleSchedule::Kind::list:
      ts = s.times;
      break;
  }
  if (s.include_endpoints) {
    ts.push_back(0.0);
    ts.push_back(c.params.t_end);
  }
  return detail::merge_times(ts);
}

inline RunReport run(const RunConfig& c, const Json& raw_config = Json()) {
  const Grid g = c.grid();
  const RealField u0 = build_initial(c);
  const double dt_max = EquationParams::max_stable_dt(u0);
  if (c.params.dt > dt_max * (1.0 + 1e-12))
    throw ConfigError("/dt", "dt=" + format_double(c.params.dt) + " exceeds 0.5 h / max(1, max|u0|) = " + format_double(dt_max));

  std::vector<double> primary = schedule_times(c);
  std::vector<double> all = primary;
  for (double t : c.diagnostics.ledger_times)
    for (int k = -2; k <= 2; ++k) all.push_back(t + k * c.diagnostics.ledger_delta);
  all = detail::merge_times(all);
  if (c.diagnostics.virial) {
    if (c.samples.kind != SampleSchedule::Kind::uniform || !c.diagnostics.ledger_times.empty())
      throw ConfigError("/diagnostics/virial", "needs a uniform sample schedule without ledger stencils");
    for (std::size_t i = 2; i < all.size(); ++i)
      if (std::abs((all[i] - all[i - 1]) - (all[1] - all[0])) > 1e-9 * (all[1] - all[0]))
        throw ConfigError("/samples/dt_sample", "virial needs t_end to be a multiple of dt_sample");
  }
  const bool need_states = c.diagnostics.J || c.diagnostics.virial || !c.diagnostics.ledger_times.empty() ||
                           c.diagnostics.soliton_error || c.diagnostics.checkpoint_samples;

  const fs::path dir = output_root() / c.output;
  fs::create_directories(dir / "checkpoints");
  fs::create_directories(dir / "plots");
  if (!raw_config.is_null()) std::ofstream(dir / "config.json") << raw_config.dump(2) << '\n';

  const Trajectory traj = evolve(u0, c.params, all, {}, need_states);

  RunReport rep;
  rep.directory = dir;
  Json& s = rep.summary;
  s["scenario"] = c.scenario;
  s["alpha"] = c.params.alpha;
  s["grid"] = {{"N", c.n}, {"L", c.length}};
  s["dt"] = c.params.dt;
  s["t_end"] = c.params.t_end;
  s["samples"] = traj.size();
  s["seed"] = c.seed;

  auto expect_max = [&rep](const std::optional<double>& limit, double value, const std::string& what) {
    if (limit && !(value <= *limit)) rep.failed_expectations.push_back(what + " = " + format_double(value) + " > " + format_double(*limit));
  };
  auto expect_min = [&rep](const std::optional<double>& limit, double value, const std::string& what) {
    if (limit && !(value >= *limit)) rep.failed_expectations.push_back(what + " = " + format_double(value) + " < " + format_double(*limit));
  };

  // Conservation.
  const ConservedTriple& c0 = traj.conserved.front();
  double dmass = 0.0, dl2 = 0.0, de = 0.0;
  for (const auto& q : traj.conserved) {
    dmass = std::max(dmass, std::abs(q.mass - c0.mass) / std::max(std::abs(c0.mass), 1e-300));
    dl2 = std::max(dl2, std::abs(q.l2 - c0.l2) / std::max(std::abs(c0.l2), 1e-300));
    de = std::max(de, std::abs(q.energy - c0.energy) / std::max(std::abs(c0.energy), 1e-300));
  }
  if (c0.l2 == 0.0) dmass = dl2 = de = 0.0;
  s["conservation"] = {{"max_relative_mass_drift", dmass}, {"max_relative_l2_drift", dl2}, {"max_relative_energy_drift", de}};
  expect_max(c.expect.max_mass_drift, dmass, "mass drift");
  expect_max(c.expect.max_l2_drift, dl2, "L2 drift");
  expect_max(c.expect.max_energy_drift, de, "energy drift");

  // Series.
  std::vector<std::string> header{"t", "mass", "l2", "energy", "l1"};
  std::optional<DecayReport> decay;
  if (c.diagnostics.J) {
    header.push_back("J");
    header.push_back("runmin_J");
    Trajectory prim;
    prim.alpha = traj.alpha;
    for (std::size_t i = 0; i < traj.size(); ++i)
      if (std::any_of(primary.begin(), primary.end(), [&](double t) { return detail::close_times(traj.times[i], t); })) {
        prim.times.push_back(traj.times[i]);
        prim.states.push_back(traj.states[i]);
      }
    decay = decay_report(prim, c.window());
  }
  {
    CsvWriter csv(dir / "series.csv", header);
    std::ofstream pl2(dir / "plots" / "l2_drift.dat");
    for (std::size_t i = 0; i < traj.size(); ++i) {
      std::vector<double> row{traj.times[i], traj.conserved[i].mass, traj.conserved[i].l2, traj.conserved[i].energy, traj.l1_norms[i]};
      if (decay) {
        const auto it = std::find_if(decay->times.begin(), decay->times.end(), [&](double t) { return detail::close_times(t, traj.times[i]); });
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.push_back(it == decay->times.end() ? nan : decay->J[static_cast<std::size_t>(it - decay->times.begin())]);
        row.push_back(it == decay->times.end() ? nan : decay->running_min[static_cast<std::size_t>(it - decay->times.begin())]);
      }
      csv.row(row);
      pl2 << format_double(traj.times[i]) << ' ' << format_double(traj.conserved[i].l2 - c0.l2) << '\n';
    }
  }
  if (decay) {
    Json j;
    j["window"] = {{"a", c.window_a}, {"b", 1.0 - c.window_a}, {"c", c.window_c}};
    if (!decay->times.empty()) {
      j["first"] = {{"t", decay->times.front()}, {"J", decay->J.front()}};
      j["last"] = {{"t", decay->times.back()}, {"J", decay->J.back()}, {"runmin_J", decay->running_min.back()}};
      const double factor = decay->running_min.front() / decay->running_min.back();
      j["runmin_decrease_factor"] = factor;
      expect_min(c.expect.min_J_decrease, factor, "running-min J decrease factor");
      std::ofstream pj(dir / "plots" / "J.dat");
      for (std::size_t i = 0; i < decay->times.size(); ++i)
        pj << format_double(decay->times[i]) << ' ' << format_double(decay->J[i]) << ' ' << format_double(decay->running_min[i]) << '\n';
    }
    s["J"] = j;
  }

  // Soliton translation error against the initial profile moved by c t.
  if (c.diagnostics.soliton_error) {
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
      err = std::max(err, max_abs_diff(traj.states[i], shift(u0, c.initial.speed * traj.times[i])));
    s["soliton"] = {{"speed", c.initial.speed}, {"max_translation_error", err}};
    expect_max(c.expect.max_soliton_error, err, "soliton translation error");
  }

  // Identity ledgers.
  if (!c.diagnostics.ledger_times.empty()) {
    CsvWriter csv(dir / "ledgers.csv", {"identity", "t", "ddt", "A1", "A2", "A3", "A31", "A32", "A33", "A4", "closure", "fd_error",
                                        "fd_limited", "seam_fraction"});
    double worst = 0.0, a3_min = std::numeric_limits<double>::infinity();
    Json rows = Json::array();
    const auto law = c.window();
    for (double t : c.diagnostics.ledger_times) {
      for (const IdentityLedger& L : {step1_ledger(traj, law, c.params.alpha, t), step2_ledger(traj, law, c.params.alpha, t)}) {
        auto term = [&L](const char* k) {
          for (const auto& [name, v] : L.terms)
            if (name == k) return format_double(v);
          return std::string();
        };
        csv.row_strings({L.name, format_double(L.t), format_double(L.ddt_term), term("A1"), term("A2"), term("A3"), term("A31"),
                         term("A32"), term("A33"), term("A4"), format_double(L.closure_residual), format_double(L.fd_error_estimate),
                         L.fd_limited ? "1" : "0", format_double(L.seam_fraction)});
        worst = std::max(worst, L.closure_residual);
        if (L.name == "step2") a3_min = std::min({a3_min, L.term("A32"), L.term("A33")});
        rows.push_back({{"identity", L.name}, {"t", L.t}, {"closure", L.closure_residual}, {"fd_limited", L.fd_limited}});
      }
    }
    s["ledgers"] = {{"max_closure_residual", worst}, {"min_A32_A33", a3_min}, {"entries", rows}};
    expect_max(c.expect.max_ledger_residual, worst, "ledger closure residual");
    if (a3_min < 0.0) rep.failed_expectations.push_back("A32/A33 negative: " + format_double(a3_min));
  }

  // Virial identity.
  if (c.diagnostics.virial) {
    const VirialReport v = virial(traj);
    const double slope_err = v.expected_slope == 0.0 ? std::abs(v.slope) : std::abs(v.slope - v.expected_slope) / v.expected_slope;
    s["virial"] = {{"slope", v.slope}, {"expected_slope", v.expected_slope}, {"relative_slope_error", slope_err},
                   {"max_relative_mismatch", v.max_relative_mismatch}};
    CsvWriter csv(dir / "virial.csv", {"t", "d_dt_moment", "half_l2"});
    for (std::size_t i = 0; i < v.times.size(); ++i) csv.row({v.times[i], v.moment_rate[i], v.half_l2[i]});
    expect_max(c.expect.max_virial_mismatch, v.max_relative_mismatch, "virial pointwise mismatch");
    expect_max(c.expect.max_virial_slope_error, slope_err, "virial slope error");
  }

  if (c.diagnostics.l1_fit) {
    const L1Fit f = l1_monitor(traj);
    s["l1_fit"] = {{"c0", f.c0}, {"a_hat", f.a_hat}, {"a_low", f.a_low}, {"a_high", f.a_high},
                   {"degenerate", f.degenerate}, {"below_threshold", f.below_threshold}};
  }

  // Inequality diagnostics on a seeded ensemble of band-limited fields.
  if (c.diagnostics.inequality_ensemble > 0) {
    std::mt19937_64 rng(c.seed);
    const long mm = c.diagnostics.ensemble_max_mode ? c.diagnostics.ensemble_max_mode : std::min<long>(static_cast<long>(c.n) / 8, 64);
    double gn = 0.0, lb = 0.0, cw = 0.0;
    std::uniform_real_distribution<double> where(-0.25 * c.length, 0.25 * c.length);
    CsvWriter csv(dir / "inequalities.csv", {"draw", "gn_p4", "leibniz", "cubic_ratio"});
    for (int i = 0; i < c.diagnostics.inequality_ensemble; ++i) {
      const RealField f = random_band_limited(g, mm, rng), h = random_band_limited(g, mm, rng);
      const double a = gn_check(f, 4.0, c.params.alpha), b = leibniz_check(f, h, c.params.alpha);
      const double r = cubic_weight_check(f, where(rng), c.params.alpha, 1.0).rhs_ratio;
      csv.row({static_cast<double>(i), a, b, r});
      gn = std::max(gn, a), lb = std::max(lb, b), cw = std::max(cw, r);
    }
    s["inequalities"] = {{"draws", c.diagnostics.inequality_ensemble}, {"max_mode", mm}, {"max_gn_p4", gn}, {"max_leibniz", lb},
                         {"max_cubic_ratio", cw}, {"cubic_sup_bound", sobolev_sup_bound(g, 0.5 * (c.params.alpha + 1.0), 1.0)}};
  }

  // Checkpoints and final-state plot.
  const RealField final_state = need_states ? traj.states.back() : evolve(u0, c.params, {c.params.t_end}).states.back();
  save_checkpoint(dir / "checkpoints" / "final.dgbo", {c.params.alpha, traj.times.back(), final_state});
  if (c.diagnostics.checkpoint_samples)
    for (std::size_t i = 0; i < traj.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "sample_%04zu.dgbo", i);
      save_checkpoint(dir / "checkpoints" / name, {c.params.alpha, traj.times[i], traj.states[i]});
    }
  {
    std::ofstream pf(dir / "plots" / "final_state.dat");
    for (std::size_t j = 0; j < g.size(); ++j) pf << format_double(g.node(j)) << ' ' << format_double(final_state[j]) << '\n';
    std::ofstream r(dir / "plots" / "RECIPE.txt");
    r << "final_state.dat: columns x u(x, t_end). Plot u against x.\n"
         "l2_drift.dat: columns t M(t)-M(0). Plot on a linear axis; values are round-off sized.\n";
    if (decay)
      r << "J.dat: columns t J(t) runmin_J(t). Plot both against t with a log y axis.\n"
           "  gnuplot: set logscale y; plot 'J.dat' u 1:2 w lp t 'J', '' u 1:3 w l t 'running min'\n";
    r << "gnuplot: plot 'final_state.dat' w l\n";
  }

  s["expectations_met"] = rep.ok();
  s["failed_expectations"] = rep.failed_expectations;
  std::ofstream(dir / "summary.json") << s.dump(2) << '\n';
  return rep;
}

}  // namespace dgbo::cli
