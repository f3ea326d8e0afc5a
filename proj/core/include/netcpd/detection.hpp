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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netcpd/graph_model.hpp"
#include "netcpd/inference.hpp"

namespace netcpd {

enum class RuleKind {
  kMessagePassing,  // threshold gamma_S^n[n] computed from all network data
  kSingle,          // threshold each node's private-data posterior, stop at the first
};

std::string to_string(RuleKind kind);
RuleKind parse_rule_kind(const std::string& text);

struct StoppingRuleSpec {
  std::vector<NodeId> subset;
  double alpha = 0.01;
  RuleKind rule = RuleKind::kMessagePassing;
  std::size_t max_horizon = 1000;
  /// Allows the MP rule on graphs with cycles through loopy BP.
  bool allow_loopy = false;
  LoopyOptions loopy;
};

/// Throws ValidationError / UnsupportedError for specs the model cannot run.
void validate_rule(const NetworkModel& model, const StoppingRuleSpec& spec);

/// 50 + ceil(20 * (1/rho_min + |log alpha| / (q_phi + I_phi))), rho_min over S.
std::size_t default_max_horizon(const NetworkModel& model, std::span<const NodeId> subset,
                                double alpha);

struct StoppingOutcome {
  std::optional<std::size_t> stop_time;  // empty when censored
  std::size_t truth = 0;                 // phi = lambda_S
  std::size_t delay = 0;                 // (tau - phi)_+
  bool false_alarm = false;              // tau < phi
  bool censored = false;
  double posterior_at_stop = 0.0;
};

StoppingOutcome make_outcome(std::optional<std::size_t> stop_time, std::size_t truth,
                             double posterior_at_stop);

/// The rule's statistic at horizon n: gamma_S^n[n] for MP, the largest
/// private-data posterior P(lambda_j <= n | X_j^n) over S for SINGLE.
class RuleStatistic {
 public:
  RuleStatistic(const NetworkModel& model, std::vector<NodeId> subset, RuleKind rule,
                bool allow_loopy = false, LoopyOptions loopy = {});

  double evaluate(const ObservationPanel& panel, std::size_t n) const;
  RuleKind rule() const { return rule_; }
  std::span<const NodeId> subset() const { return subset_; }

 private:
  const NetworkModel* model_;
  std::vector<NodeId> subset_;
  RuleKind rule_;
  bool allow_loopy_;
  LoopyOptions loopy_;
  std::vector<NetworkModel> private_models_;  // one single-node model per node of S
};

struct PosteriorSnapshot {
  std::size_t horizon = 0;
  double gamma = 0.0;
  bool stopped = false;
  std::optional<std::size_t> stop_time;
};

/// Online driver: feed one time step at a time, query the posterior and the
/// (sticky) stop decision in between.
class DetectionSession {
 public:
  DetectionSession(const NetworkModel& model, StoppingRuleSpec spec);

  /// Appends \p steps in order and re-evaluates after each; an empty span
  /// leaves the state unchanged. Throws SchemaError on a malformed record.
  const PosteriorSnapshot& advance(std::span<const TimeStep> steps);
  const PosteriorSnapshot& advance(const TimeStep& step) { return advance(std::span(&step, 1)); }

  const PosteriorSnapshot& snapshot() const { return snapshot_; }
  const ObservationPanel& panel() const { return panel_; }
  const StoppingRuleSpec& spec() const { return spec_; }

 private:
  const NetworkModel* model_;
  StoppingRuleSpec spec_;
  RuleStatistic statistic_;
  ObservationPanel panel_;
  PosteriorSnapshot snapshot_;
};

/// Streams observations drawn from \p rng until the rule stops or the
/// horizon cap is hit (censored outcome).
StoppingOutcome run_mp_rule(const NetworkModel& model, const ChangePointAssignment& assignment,
                            const StoppingRuleSpec& spec, Rng& rng);
StoppingOutcome run_single_rule(const NetworkModel& model, const ChangePointAssignment& assignment,
                                const StoppingRuleSpec& spec, Rng& rng);

/// One data realization, many thresholds: tracks the statistic until every
/// alpha has crossed or hit its own cap. Outcome i matches running the rule
/// with alphas[i] and max_horizons[i] on the same random stream.
std::vector<StoppingOutcome> run_rule_multi(const NetworkModel& model,
                                            const ChangePointAssignment& assignment,
                                            std::span<const NodeId> subset, RuleKind rule,
                                            std::span<const double> alphas,
                                            std::span<const std::size_t> max_horizons, Rng& rng,
                                            bool allow_loopy = false,
                                            std::vector<double>* trajectory = nullptr);

}  // namespace netcpd
