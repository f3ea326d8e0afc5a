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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "netcpd/config.hpp"
#include "netcpd/detection.hpp"

namespace netcpd {

/// One (functional, rule, alpha) cell of an experiment grid.
struct AggregateRow {
  std::string functional;
  RuleKind rule = RuleKind::kMessagePassing;
  double alpha = 0.0;
  std::size_t trials = 0;
  std::size_t completed = 0;     // tau >= phi
  std::size_t censored = 0;
  std::size_t false_alarms = 0;  // tau < phi
  double false_alarm_rate = 0.0;
  double mean_cond_delay = 0.0;  // E[tau - phi | tau >= phi]
  double se_delay = 0.0;
  double slope = 0.0;            // mean_cond_delay / |log alpha|
  double theory_slope = 0.0;
  double mean_delay = 0.0;       // E(tau - phi)_+ over non-censored trials
};

struct TrialRecord {
  std::size_t trial = 0;
  std::string functional;
  RuleKind rule = RuleKind::kMessagePassing;
  double alpha = 0.0;
  std::vector<std::size_t> lambda;
  StoppingOutcome outcome;
};

struct ExperimentResult {
  std::vector<AggregateRow> rows;
  std::vector<TrialRecord> trial_log;  // filled when requested
  std::size_t censored_total = 0;
};

struct RunOptions {
  std::size_t threads = 1;
  bool keep_trial_log = false;
};

/// Runs every (functional, rule, alpha) cell over config.trials trials.
/// Trial t draws its change points and observations from substreams of
/// (seed, t) only, so output is independent of thread count and order.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Rebuilds aggregates from per-trial records (used for auditing).
AggregateRow aggregate(const std::string& functional, RuleKind rule, double alpha,
                       std::span<const StoppingOutcome> outcomes, double theory_slope);

}  // namespace netcpd
