#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idnc/checks.hpp"
#include "idnc/errors.hpp"
#include "idnc/experiment.hpp"

namespace {

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw idnc::ConfigError("bad axis value: " + item);
    }
  }
  if (values.empty()) throw idnc::ConfigError("no axis values given");
  return values;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw idnc::ConfigError("cannot open output file: " + path);
  out << content;
}

void print_summary(const idnc::RunStats& stats) {
  for (const auto& [solver, summary] : stats.summary)
    std::printf("%-10s frames=%ld mean_ct=%.4f (se %.4f) mean_dd=%.4f (se %.4f)\n",
                idnc::solver_name(solver), summary.frames, summary.mean_ct,
                summary.stderr_ct, summary.mean_dd, summary.stderr_dd);
}

int report_checks(const std::vector<idnc::CheckResult>& checks, bool verbose) {
  int failures = 0;
  for (const idnc::CheckResult& c : checks) {
    if (!c.pass) ++failures;
    if (verbose || !c.pass)
      std::printf("%-32s %s expected=%.8f observed=%.8f tol=%.2e\n",
                  c.name.c_str(), c.pass ? "ok  " : "FAIL", c.expected,
                  c.observed, c.tolerance);
  }
  std::printf("%zu checks, %d failures\n", checks.size(), failures);
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IDNC completion-time reduction simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string axis_name;
  std::string values_text;
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool json = false;
  bool verbose = false;
  int mc_params = 20;
  long mc_trials = 200000;
  int oracle_instances = 50;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--out", out_path, "CSV output path");
    sub->add_flag("--json", json, "JSON summary on stdout");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "single experiment");
  add_common(run_cmd);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "axis sweep");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--axis", axis_name, "M, N, P, mu or T_bpso")
      ->required();
  sweep_cmd->add_option("--values", values_text, "comma-separated axis values")
      ->required();

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Monte-Carlo channel-belief validation");
  validate_cmd->add_option("--seed", seed, "suite seed")
      ->each([&](const std::string&) { have_seed = true; });
  validate_cmd->add_option("--params", mc_params, "number of parameter sets");
  validate_cmd->add_option("--trials", mc_trials, "trials per parameter set");
  validate_cmd->add_flag("--verbose", verbose, "print passing checks too");

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "brute-force equivalence checks");
  oracle_cmd->add_option("--seed", seed, "suite seed")
      ->each([&](const std::string&) { have_seed = true; });
  oracle_cmd->add_option("--instances", oracle_instances,
                         "instances per weighting");
  oracle_cmd->add_flag("--verbose", verbose, "print passing checks too");

  try {
    app.parse(argc, argv);

    if (validate_cmd->parsed()) {
      const auto checks = idnc::validate_channel_beliefs(
          have_seed ? seed : 7, mc_params, mc_trials);
      return report_checks(checks, verbose);
    }
    if (oracle_cmd->parsed()) {
      const std::uint64_t s = have_seed ? seed : 7;
      auto checks = idnc::run_equivalence_oracle(s, oracle_instances, false);
      const auto limited =
          idnc::run_equivalence_oracle(s, oracle_instances, true);
      checks.insert(checks.end(), limited.begin(), limited.end());
      return report_checks(checks, verbose);
    }

    idnc::ExperimentConfig config;
    if (!config_path.empty()) config = idnc::load_config(config_path);
    if (have_seed) config.master_seed = seed;
    config.validate();

    if (run_cmd->parsed()) {
      const idnc::RunStats stats = idnc::run_experiment(config);
      if (!out_path.empty()) write_file(out_path, idnc::per_frame_csv(stats));
      if (json)
        std::cout << idnc::json_summary(config, stats);
      else
        print_summary(stats);
      return 0;
    }

    // sweep
    const idnc::SweepAxis axis = idnc::axis_from_name(axis_name);
    const auto rows = idnc::sweep(config, axis, parse_values(values_text));
    const std::string csv = idnc::sweep_csv(rows, axis);
    if (!out_path.empty())
      write_file(out_path, csv);
    else
      std::cout << csv;
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const idnc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
