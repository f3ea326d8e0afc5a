// Copyright 2026 The netcpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netcpd/config.hpp"
#include "netcpd/csv.hpp"
#include "netcpd/detection.hpp"
#include "netcpd/error.hpp"
#include "netcpd/experiment.hpp"
#include "netcpd/rng.hpp"
#include "netcpd/theory.hpp"
#include "netcpd/validation.hpp"

namespace netcpd {
namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::size_t threads = 1;
  std::string trial_log;
};

struct PosteriorArgs {
  std::string config;
  std::string subset;
  double alpha = 0.01;
  std::uint64_t seed = 0;
  std::string rule = "MP";
  std::string out;
};

struct TheoryArgs {
  std::string config;
  std::vector<std::string> subsets;
};

struct ValidateArgs {
  double budget = kDefaultOracleBudget;
  std::size_t instances = 100;
  std::uint64_t seed = ValidationOptions{}.seed;
  std::string config;
};

void echo_resolved(std::ostream& os, const ExperimentConfig& config) {
  os << "# resolved config\n";
  std::istringstream lines(resolved_config(config));
  for (std::string line; std::getline(lines, line);) os << "#   " << line << '\n';
}

int simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = parse_config(args.config);
  if (!args.out.empty()) config.output = args.out;
  echo_resolved(out, config);

  RunOptions options;
  options.threads = args.threads;
  options.keep_trial_log = !args.trial_log.empty();
  const ExperimentResult result = run_experiment(config, options);
  emit_csv(result.rows, config.output);
  if (options.keep_trial_log) {
    std::ofstream log(args.trial_log, std::ios::binary | std::ios::trunc);
    if (!log) throw Error("cannot open '" + args.trial_log + "' for writing");
    write_trial_log(log, result.trial_log);
  }
  if (result.censored_total > 0) {
    err << "WARNING: " << result.censored_total
        << " censored trial(s); raise n_max or inspect the censored column\n";
  }
  out << "wrote " << result.rows.size() << " rows to " << config.output << '\n';
  return kOk;
}

int posterior(const PosteriorArgs& args, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = parse_config(args.config);
  const NetworkModel model = build_model(config.model);
  const std::vector<NodeId> subset = parse_subset(args.subset, model.node_count());
  const RuleKind rule = parse_rule_kind(args.rule);
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
    throw ValidationError("--alpha must lie in (0, 1), got " + format_exact(args.alpha));
  }
  const std::size_t cap =
      config.n_max ? *config.n_max : default_max_horizon(model, subset, args.alpha);

  Rng lambda_rng = substream(args.seed, {0});
  const ChangePointAssignment lambda = sample_change_points(model, lambda_rng);
  Rng obs_rng = substream(args.seed, {0, 1});
  std::vector<double> trajectory;
  const double alphas[] = {args.alpha};
  const std::size_t caps[] = {cap};
  const StoppingOutcome outcome = run_rule_multi(model, lambda, subset, rule, alphas, caps, obs_rng,
                                                 config.allow_loopy, &trajectory)
                                      .front();

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot open '" + args.out + "' for writing");
  }
  std::ostream& csv = args.out.empty() ? out : file;
  csv << "n,gamma,stopped\n";
  for (std::size_t n = 1; n <= trajectory.size(); ++n) {
    const bool stopped = outcome.stop_time && n >= *outcome.stop_time;
    csv << n << ',' << format_exact(trajectory[n - 1]) << ',' << (stopped ? 1 : 0) << '\n';
  }

  err << "lambda =";
  for (std::size_t v : lambda.values()) err << ' ' << v;
  err << "; phi = " << outcome.truth << "; tau = ";
  if (outcome.stop_time) {
    err << *outcome.stop_time;
  } else {
    err << "censored at " << cap;
  }
  err << (outcome.false_alarm ? " (false alarm)" : "") << '\n';
  return kOk;
}

int theory(const TheoryArgs& args, std::ostream& out) {
  const ExperimentConfig config = parse_config(args.config);
  const NetworkModel model = build_model(config.model);
  std::vector<std::vector<NodeId>> subsets;
  for (const std::string& s : args.subsets) subsets.push_back(parse_subset(s, model.node_count()));
  if (subsets.empty()) {
    for (const FunctionalSpec& f : config.functionals) subsets.push_back(f.subset);
  }
  const InformationSummary summary = summarize_information(model, subsets);

  out << "# information in nats\nstream,id,kl\n";
  for (std::size_t j = 0; j < summary.node_info.size(); ++j) {
    out << "node," << j + 1 << ',' << format_sig6(summary.node_info[j]) << '\n';
  }
  for (std::size_t e = 0; e < summary.edge_info.size(); ++e) {
    const Edge& edge = model.graph().edge(e);
    out << "edge," << edge.lo + 1 << '-' << edge.hi + 1 << ','
        << format_sig6(summary.edge_info[e]) << '\n';
  }
  out << "\nsubset,prior_rate,info,slope\n";
  for (const SubsetInformation& s : summary.subsets) {
    out << subset_label(s.subset) << ',' << format_sig6(s.prior_rate) << ','
        << format_sig6(s.info) << ',' << format_sig6(s.slope) << '\n';
  }
  return kOk;
}

int validate(const ValidateArgs& args, std::ostream& out) {
  if (!args.config.empty()) {
    const ExperimentConfig config = parse_config(args.config);
    build_model(config.model);
    out << "config " << args.config << " ok\n";
  }
  ValidationOptions options;
  options.budget_cells = args.budget;
  options.instances = args.instances;
  options.seed = args.seed;
  const ValidationReport report = run_validation(options);
  std::size_t failed = 0;
  for (const ValidationCheck& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    if (!c.passed) ++failed;
  }
  out << (failed == 0 ? "all " + std::to_string(report.checks.size()) + " checks passed"
                      : std::to_string(failed) + " check(s) failed")
      << '\n';
  return failed == 0 ? kOk : kFailure;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential change-point detection on networks", "netcpd"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment grid");
  sim_cmd->add_option("--config", sim.config, "YAML experiment config")->required();
  sim_cmd->add_option("--out", sim.out, "CSV output path (default: experiment.output)");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--trial-log", sim.trial_log, "Per-trial CSV log path");

  PosteriorArgs post;
  CLI::App* post_cmd = app.add_subcommand("posterior", "Print one trial's posterior trajectory");
  post_cmd->add_option("--config", post.config, "YAML experiment config")->required();
  post_cmd->add_option("--subset", post.subset, "Nodes of S, 1-based, e.g. 1,2")->required();
  post_cmd->add_option("--alpha", post.alpha, "False-alarm level")->required();
  post_cmd->add_option("--seed", post.seed, "Trial seed")->required();
  post_cmd->add_option("--rule", post.rule, "MP or SINGLE")->check(CLI::IsMember({"MP", "SINGLE"}));
  post_cmd->add_option("--out", post.out, "CSV output path (default: stdout)");

  TheoryArgs th;
  CLI::App* th_cmd = app.add_subcommand("theory", "Print information numbers and slopes");
  th_cmd->add_option("--config", th.config, "YAML experiment config")->required();
  th_cmd->add_option("--subset", th.subsets, "One or more subsets, e.g. --subset 1 1,2");

  ValidateArgs val;
  CLI::App* val_cmd = app.add_subcommand("validate", "Run the oracle and invariant suite");
  val_cmd->add_option("--budget", val.budget, "Oracle cell budget")->check(CLI::PositiveNumber);
  val_cmd->add_option("--instances", val.instances, "Random instances for the oracle check");
  val_cmd->add_option("--seed", val.seed, "Seed of the random instances");
  val_cmd->add_option("--config", val.config, "Also check that this config loads");

  if (argc <= 1) {
    err << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kUsage;
  }

  try {
    if (*sim_cmd) return simulate(sim, out, err);
    if (*post_cmd) return posterior(post, out, err);
    if (*th_cmd) return theory(th, out);
    if (*val_cmd) return validate(val, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace netcpd
