// dgbo: run configured experiments, verification suites and checkpoint export.
//
// Exit codes: 0 ok, 1 diagnostic failure, 2 configuration or usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "dgbo/cli/config.hpp"
#include "dgbo/cli/io.hpp"
#include "dgbo/cli/runner.hpp"
#include "dgbo/cli/verify.hpp"

namespace {

constexpr int kOk = 0, kDiagnostic = 1, kConfig = 2;

int do_run(const std::string& path) {
  dgbo::cli::Json raw;
  dgbo::cli::RunConfig cfg;
  try {
    std::ifstream in(path);
    if (!in) throw dgbo::cli::ConfigError("/", "cannot open file");
    try {
      raw = dgbo::cli::Json::parse(in);
    } catch (const dgbo::cli::Json::parse_error& e) {
      throw dgbo::cli::ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    cfg = dgbo::cli::parse_config(raw);
  } catch (const dgbo::cli::ConfigError& e) {
    std::cerr << "config error in " << path << " at " << e.what() << '\n';
    return kConfig;
  }
  try {
    const dgbo::cli::RunReport rep = dgbo::cli::run(cfg, raw);
    std::cout << rep.summary.dump(2) << '\n';
    std::cerr << "outputs in " << rep.directory.string() << '\n';
    for (const auto& f : rep.failed_expectations) std::cerr << "expectation missed: " << f << '\n';
    return rep.ok() ? kOk : kDiagnostic;
  } catch (const dgbo::cli::ConfigError& e) {
    std::cerr << "config error in " << path << " at " << e.what() << '\n';
    return kConfig;
  } catch (const dgbo::InvalidArgument& e) {
    // Module preconditions are config errors too; name the scenario so the entry can be found.
    std::cerr << "config error in " << path << " (scenario '" << cfg.scenario << "'): " << e.what() << '\n';
    return kConfig;
  } catch (const dgbo::Error& e) {
    std::cerr << "run failed in " << path << " (scenario '" << cfg.scenario << "'): " << e.what() << '\n';
    return kDiagnostic;
  }
}

int do_verify(const std::string& suite) {
  std::vector<dgbo::verify::Criterion> rows;
  try {
    rows = dgbo::verify::run_suite(suite);
  } catch (const dgbo::InvalidArgument& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  }
  dgbo::verify::print_table(std::cout, rows);
  bool ok = true;
  for (const auto& c : rows) ok = ok && c.pass();
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kOk : kDiagnostic;
}

int do_export(const std::string& path, const std::string& out) {
  std::optional<dgbo::cli::Checkpoint> loaded;
  try {
    loaded = dgbo::cli::load_checkpoint(path);
  } catch (const dgbo::Error& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfig;
  }
  const dgbo::cli::Checkpoint& cp = *loaded;
  if (out.empty() || out == "-") {
    dgbo::cli::write_state_csv(std::cout, cp.state);
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "cannot write " << out << '\n';
      return kConfig;
    }
    dgbo::cli::write_state_csv(f, cp.state);
  }
  std::cerr << "N=" << cp.state.size() << " L=" << cp.state.grid().length() << " alpha=" << cp.alpha << " t=" << cp.t << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral lab for the dispersion-generalized Benjamin-Ono equation"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run a JSON experiment config (outputs under $DGBO_OUTPUT_ROOT, default ./runs)");
  run->add_option("config", config, "config file")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite and print a pass/fail table");
  verify->add_option("suite", suite, "operators | weights | commutators | groundstate | evolution | functionals | all")->required();

  std::string checkpoint, out;
  bool csv = false;
  auto* exp = app.add_subcommand("export", "convert a checkpoint to an x,u table");
  exp->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  exp->add_flag("--csv", csv, "CSV output (the only format)")->required();
  exp->add_option("--out,-o", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) return do_run(config);
  if (*verify) return do_verify(suite);
  return do_export(checkpoint, out);
}
