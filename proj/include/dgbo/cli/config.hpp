#pragma once

// Run configuration: JSON with a versioned schema. Every key is checked; unknown keys are errors.

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dgbo/errors.hpp"
#include "dgbo/evolution.hpp"
#include "dgbo/weights.hpp"

namespace dgbo::cli {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Bad configuration; `path` is the JSON pointer of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& msg) : Error(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct InitialData {
  enum class Kind { soliton, gaussian, mode, file };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;  // gaussian, mode
  double width = 5.0;      // gaussian: amplitude exp(-((x - center)/width)^2)
  double center = 0.0;     // gaussian, soliton
  long mode = 1;           // mode: amplitude cos(2 pi mode x / L)
  double speed = 1.0;      // soliton
  std::string path;        // file: checkpoint
};

struct SampleSchedule {
  enum class Kind { uniform, sequence, list };
  Kind kind = Kind::uniform;
  double dt_sample = 1.0;
  double epsilon = 0.1;
  int count = 0;
  double t_min = 0.0;
  std::vector<double> times;
  bool include_endpoints = true;  // add 0 and t_end
};

struct Diagnostics {
  bool J = false;
  std::vector<double> ledger_times;
  double ledger_delta = 0.01;
  bool virial = false;
  bool l1_fit = false;
  bool soliton_error = false;
  bool checkpoint_samples = false;
  int inequality_ensemble = 0;  // random fields drawn from the run seed
  long ensemble_max_mode = 0;   // 0: min(N/8, 64)
};

/// Optional thresholds; a run exits 1 when one is missed.
struct Expectations {
  std::optional<double> max_mass_drift, max_l2_drift, max_energy_drift;
  std::optional<double> max_soliton_error;
  std::optional<double> max_ledger_residual;
  std::optional<double> min_J_decrease;
  std::optional<double> max_virial_mismatch, max_virial_slope_error;
};

struct RunConfig {
  std::string scenario;
  EquationParams params;
  std::size_t n = 1024;
  double length = 200.0;
  InitialData initial;
  double window_a = 0.0, window_c = 1.0;
  SampleSchedule samples;
  Diagnostics diagnostics;
  Expectations expect;
  std::string output;
  std::uint64_t seed = 1;

  Grid grid() const { return Grid(n, length); }
  weights::WindowLaw window() const { return weights::WindowLaw(window_a, window_c, params.alpha); }
};

namespace detail {

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  // Must be called after all reads.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path_ + "/" + k, "unknown key");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string at(const std::string& k) const { return path_ + "/" + k; }

  double number(const std::string& k, std::optional<double> dflt = {}) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (dflt) return *dflt;
      throw ConfigError(at(k), "required number is missing");
    }
    if (!j_[k].is_number()) throw ConfigError(at(k), "expected a number");
    const double v = j_[k].get<double>();
    if (!std::isfinite(v)) throw ConfigError(at(k), "must be finite");
    return v;
  }

  std::optional<double> maybe_number(const std::string& k) {
    if (!j_.contains(k)) {
      seen_.insert(k);
      return std::nullopt;
    }
    return number(k);
  }

  long integer(const std::string& k, std::optional<long> dflt = {}) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (dflt) return *dflt;
      throw ConfigError(at(k), "required integer is missing");
    }
    if (!j_[k].is_number_integer()) throw ConfigError(at(k), "expected an integer");
    return j_[k].get<long>();
  }

  bool boolean(const std::string& k, bool dflt) {
    seen_.insert(k);
    if (!j_.contains(k)) return dflt;
    if (!j_[k].is_boolean()) throw ConfigError(at(k), "expected true or false");
    return j_[k].get<bool>();
  }

  std::string string(const std::string& k, std::optional<std::string> dflt = {}) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (dflt) return *dflt;
      throw ConfigError(at(k), "required string is missing");
    }
    if (!j_[k].is_string()) throw ConfigError(at(k), "expected a string");
    return j_[k].get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) return {};
    if (!j_[k].is_array()) throw ConfigError(at(k), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_[k].size(); ++i) {
      if (!j_[k][i].is_number()) throw ConfigError(at(k) + "/" + std::to_string(i), "expected a number");
      out.push_back(j_[k][i].get<double>());
    }
    return out;
  }

  std::optional<Reader> object(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) return std::nullopt;
    return Reader(j_[k], at(k));
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path, msg);
}

}  // namespace detail

/// Parses and validates everything that can be checked without the initial state.
inline RunConfig parse_config(const Json& j) {
  using detail::check;
  detail::Reader r(j, "");
  RunConfig c;
  const long version = r.integer("schema_version");
  check(version == kSchemaVersion, "/schema_version", "unsupported version " + std::to_string(version));
  c.scenario = r.string("scenario");
  check(!c.scenario.empty(), "/scenario", "must not be empty");
  c.params.alpha = r.number("alpha");
  check(c.params.alpha >= 0.0 && c.params.alpha <= 1.0, "/alpha", "must lie in [0, 1]");

  auto g = r.object("grid");
  check(g.has_value(), "/grid", "required object is missing");
  const long n = g->integer("N");
  check(n >= 16 && n % 2 == 0, g->at("N"), "must be even and >= 16");
  c.n = static_cast<std::size_t>(n);
  c.length = g->number("L");
  check(c.length > 0.0, g->at("L"), "must be positive");
  g->finish();

  c.params.dt = r.number("dt");
  check(c.params.dt > 0.0, "/dt", "must be positive");
  c.params.t_end = r.number("t_end");
  check(c.params.t_end > 0.0, "/t_end", "must be positive");
  c.params.dealias = r.boolean("dealias", true);
  c.params.nonlinear = r.boolean("nonlinear", true);

  auto init = r.object("initial");
  check(init.has_value(), "/initial", "required object is missing");
  const std::string kind = init->string("type");
  if (kind == "gaussian") {
    c.initial.kind = InitialData::Kind::gaussian;
    c.initial.amplitude = init->number("amplitude");
    c.initial.width = init->number("width");
    check(c.initial.width > 0.0, init->at("width"), "must be positive");
    c.initial.center = init->number("center", 0.0);
  } else if (kind == "soliton") {
    c.initial.kind = InitialData::Kind::soliton;
    c.initial.speed = init->number("speed", 1.0);
    check(c.initial.speed > 0.0, init->at("speed"), "must be positive");
    c.initial.center = init->number("center", 0.0);
  } else if (kind == "mode") {
    c.initial.kind = InitialData::Kind::mode;
    c.initial.mode = init->integer("k");
    check(c.initial.mode >= 0 && c.initial.mode < n / 2, init->at("k"), "mode index must lie in [0, N/2)");
    c.initial.amplitude = init->number("amplitude");
  } else if (kind == "file") {
    c.initial.kind = InitialData::Kind::file;
    c.initial.path = init->string("path");
  } else {
    throw ConfigError(init->at("type"), "unknown initial data type '" + kind + "' (soliton | gaussian | mode | file)");
  }
  init->finish();

  if (auto w = r.object("window")) {
    c.window_a = w->number("a", 0.0);
    c.window_c = w->number("c", 1.0);
    w->finish();
    try {
      (void)c.window();
    } catch (const InvalidArgument& e) {
      throw ConfigError("/window", e.what());
    }
  }

  auto s = r.object("samples");
  check(s.has_value(), "/samples", "required object is missing");
  const std::string sk = s->string("type");
  if (sk == "uniform") {
    c.samples.kind = SampleSchedule::Kind::uniform;
    c.samples.dt_sample = s->number("dt_sample");
    check(c.samples.dt_sample > 0.0, s->at("dt_sample"), "must be positive");
  } else if (sk == "sequence") {
    c.samples.kind = SampleSchedule::Kind::sequence;
    c.samples.epsilon = s->number("epsilon");
    check(c.samples.epsilon > 0.0, s->at("epsilon"), "must be positive");
    c.samples.count = static_cast<int>(s->integer("count"));
    check(c.samples.count >= 2, s->at("count"), "must be >= 2");
    c.samples.t_min = s->number("t_min", 0.0);
  } else if (sk == "list") {
    c.samples.kind = SampleSchedule::Kind::list;
    c.samples.times = s->numbers("times");
    check(!c.samples.times.empty(), s->at("times"), "must not be empty");
    for (std::size_t i = 0; i < c.samples.times.size(); ++i)
      check(c.samples.times[i] >= 0.0 && c.samples.times[i] <= c.params.t_end, s->at("times") + "/" + std::to_string(i),
            "sample time outside [0, t_end]");
  } else {
    throw ConfigError(s->at("type"), "unknown sample schedule '" + sk + "' (uniform | sequence | list)");
  }
  c.samples.include_endpoints = s->boolean("include_endpoints", true);
  s->finish();

  if (auto d = r.object("diagnostics")) {
    c.diagnostics.J = d->boolean("J", false);
    c.diagnostics.virial = d->boolean("virial", false);
    c.diagnostics.l1_fit = d->boolean("l1_fit", false);
    c.diagnostics.soliton_error = d->boolean("soliton_error", false);
    c.diagnostics.checkpoint_samples = d->boolean("checkpoint_samples", false);
    c.diagnostics.inequality_ensemble = static_cast<int>(d->integer("inequality_ensemble", 0));
    check(c.diagnostics.inequality_ensemble >= 0, d->at("inequality_ensemble"), "must be >= 0");
    c.diagnostics.ensemble_max_mode = d->integer("ensemble_max_mode", 0);
    check(c.diagnostics.ensemble_max_mode >= 0 && c.diagnostics.ensemble_max_mode < n / 2, d->at("ensemble_max_mode"),
          "must lie in [0, N/2)");
    if (auto l = d->object("ledgers")) {
      c.diagnostics.ledger_times = l->numbers("times");
      c.diagnostics.ledger_delta = l->number("delta", 0.01);
      check(c.diagnostics.ledger_delta > 0.0, l->at("delta"), "must be positive");
      for (std::size_t i = 0; i < c.diagnostics.ledger_times.size(); ++i) {
        const double t = c.diagnostics.ledger_times[i];
        const std::string p = l->at("times") + "/" + std::to_string(i);
        check(t - 2.0 * c.diagnostics.ledger_delta > 0.0 && t + 2.0 * c.diagnostics.ledger_delta <= c.params.t_end, p,
              "ledger stencil t +- 2 delta must lie inside (0, t_end]");
        check(t > c.window().t_min(), p, "ledger time must exceed the window's t_min = e^{1/b}");
      }
      l->finish();
    }
    d->finish();
  }
  if (c.diagnostics.soliton_error)
    check(c.initial.kind == InitialData::Kind::soliton, "/diagnostics/soliton_error", "requires soliton initial data");

  if (auto e = r.object("expect")) {
    c.expect.max_mass_drift = e->maybe_number("max_mass_drift");
    c.expect.max_l2_drift = e->maybe_number("max_l2_drift");
    c.expect.max_energy_drift = e->maybe_number("max_energy_drift");
    c.expect.max_soliton_error = e->maybe_number("max_soliton_error");
    c.expect.max_ledger_residual = e->maybe_number("max_ledger_residual");
    c.expect.min_J_decrease = e->maybe_number("min_J_decrease");
    c.expect.max_virial_mismatch = e->maybe_number("max_virial_mismatch");
    c.expect.max_virial_slope_error = e->maybe_number("max_virial_slope_error");
    e->finish();
  }
  c.output = r.string("output", c.scenario);
  check(!c.output.empty() && c.output.find("..") == std::string::npos, "/output", "must be a non-empty relative name");
  const long seed = r.integer("seed", 1);
  check(seed >= 0, "/seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  r.finish();

  try {
    c.params.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("/", e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace dgbo::cli
