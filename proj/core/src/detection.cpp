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

#include "netcpd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netcpd/error.hpp"
#include "netcpd/theory.hpp"

namespace netcpd {

std::string to_string(RuleKind kind) {
  return kind == RuleKind::kMessagePassing ? "MP" : "SINGLE";
}

RuleKind parse_rule_kind(const std::string& text) {
  if (text == "MP" || text == "mp") return RuleKind::kMessagePassing;
  if (text == "SINGLE" || text == "single") return RuleKind::kSingle;
  throw ValidationError("unknown rule '" + text + "' (expected MP or SINGLE)");
}

void validate_rule(const NetworkModel& model, const StoppingRuleSpec& spec) {
  if (spec.subset.empty()) throw ValidationError("stopping rule: subset must be nonempty");
  std::set<NodeId> seen;
  for (NodeId j : spec.subset) {
    if (j >= model.node_count()) {
      throw ValidationError("stopping rule: node " + std::to_string(j + 1) + " not in the graph");
    }
    if (!seen.insert(j).second) {
      throw ValidationError("stopping rule: node " + std::to_string(j + 1) + " repeated in subset");
    }
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw ValidationError("stopping rule: alpha must lie in (0,1), got " +
                          std::to_string(spec.alpha));
  }
  if (spec.max_horizon == 0) throw ValidationError("stopping rule: max_horizon must be >= 1");
  if (spec.rule == RuleKind::kSingle) {
    if (spec.subset.size() > 2) {
      throw UnsupportedError("SINGLE rule is defined for one or two nodes only, got " +
                             std::to_string(spec.subset.size()));
    }
    return;
  }
  if (!model.is_forest()) {
    if (!spec.allow_loopy) {
      throw UnsupportedError("graph has cycles; enable loopy inference explicitly");
    }
    const bool pair_edge =
        spec.subset.size() == 2 && model.graph().find_edge(spec.subset[0], spec.subset[1]);
    if (spec.subset.size() != 1 && !pair_edge) {
      throw UnsupportedError("loopy MP supports a single node or an adjacent pair only");
    }
  }
}

std::size_t default_max_horizon(const NetworkModel& model, std::span<const NodeId> subset,
                                double alpha) {
  double rho_min = 1.0;
  for (NodeId j : subset) rho_min = std::min(rho_min, model.prior(j).rho());
  const double slope = asymptotic_slope(model, subset);
  return 50 + static_cast<std::size_t>(
                  std::ceil(20.0 * (1.0 / rho_min + slope * std::abs(std::log(alpha)))));
}

StoppingOutcome make_outcome(std::optional<std::size_t> stop_time, std::size_t truth,
                             double posterior_at_stop) {
  StoppingOutcome out;
  out.truth = truth;
  out.stop_time = stop_time;
  out.posterior_at_stop = posterior_at_stop;
  if (!stop_time) {
    out.censored = true;
    return out;
  }
  out.false_alarm = *stop_time < truth;
  out.delay = out.false_alarm ? 0 : *stop_time - truth;
  return out;
}

RuleStatistic::RuleStatistic(const NetworkModel& model, std::vector<NodeId> subset, RuleKind rule,
                             bool allow_loopy, LoopyOptions loopy)
    : model_(&model),
      subset_(std::move(subset)),
      rule_(rule),
      allow_loopy_(allow_loopy),
      loopy_(loopy) {
  if (rule_ != RuleKind::kSingle) return;
  for (NodeId j : subset_) {
    private_models_.emplace_back(StatisticalGraph(1, {}), std::vector{model.prior(j)},
                                 std::vector{model.node_density(j)},
                                 std::vector<TwoPhaseDensity>{});
  }
}

double RuleStatistic::evaluate(const ObservationPanel& panel, std::size_t n) const {
  if (n == 0) return 0.0;
  static constexpr NodeId kOnly[] = {0};
  if (rule_ == RuleKind::kSingle) {
    double best = 0.0;
    for (std::size_t s = 0; s < subset_.size(); ++s) {
      const auto stream = panel.node_stream(subset_[s]);
      ObservationPanel own({std::vector<double>(stream.begin(), stream.begin() + n)}, {});
      best = std::max(best, subset_min_cdf(build_evidence(private_models_[s], own, n), kOnly));
    }
    return best;
  }
  if (model_->is_forest()) return subset_min_cdf(build_evidence(*model_, panel, n), subset_);
  if (!allow_loopy_) throw UnsupportedError("graph has cycles; enable loopy inference explicitly");
  const MessageTable table = run_loopy_bp(*model_, panel, n, loopy_);
  if (subset_.size() == 1) return cdf_at_horizon(node_posterior(table, subset_[0]));
  return pair_posterior(table, subset_[0], subset_[1]).gamma_min;
}

DetectionSession::DetectionSession(const NetworkModel& model, StoppingRuleSpec spec)
    : model_(&model),
      spec_(std::move(spec)),
      statistic_((validate_rule(model, spec_), model), spec_.subset, spec_.rule, spec_.allow_loopy,
                 spec_.loopy),
      panel_(model.node_count(), model.edge_count()) {}

const PosteriorSnapshot& DetectionSession::advance(std::span<const TimeStep> steps) {
  for (const TimeStep& step : steps) {
    panel_.append(step);
    snapshot_.horizon = panel_.horizon();
    snapshot_.gamma = statistic_.evaluate(panel_, snapshot_.horizon);
    if (!snapshot_.stopped && snapshot_.gamma >= 1.0 - spec_.alpha) {
      snapshot_.stopped = true;
      snapshot_.stop_time = snapshot_.horizon;
    }
  }
  return snapshot_;
}

namespace {

StoppingOutcome run_rule(const NetworkModel& model, const ChangePointAssignment& assignment,
                         const StoppingRuleSpec& spec, Rng& rng) {
  DetectionSession session(model, spec);
  ObservationGenerator gen(model, assignment, rng);
  const std::size_t truth = assignment.subset_min(spec.subset);
  while (session.snapshot().horizon < spec.max_horizon) {
    const PosteriorSnapshot& snap = session.advance(gen.next());
    if (snap.stopped) return make_outcome(snap.stop_time, truth, snap.gamma);
  }
  return make_outcome(std::nullopt, truth, session.snapshot().gamma);
}

}  // namespace

StoppingOutcome run_mp_rule(const NetworkModel& model, const ChangePointAssignment& assignment,
                            const StoppingRuleSpec& spec, Rng& rng) {
  if (spec.rule != RuleKind::kMessagePassing) {
    throw ValidationError("run_mp_rule called with a SINGLE spec");
  }
  return run_rule(model, assignment, spec, rng);
}

StoppingOutcome run_single_rule(const NetworkModel& model, const ChangePointAssignment& assignment,
                                const StoppingRuleSpec& spec, Rng& rng) {
  if (spec.rule != RuleKind::kSingle) {
    throw ValidationError("run_single_rule called with an MP spec");
  }
  return run_rule(model, assignment, spec, rng);
}

std::vector<StoppingOutcome> run_rule_multi(const NetworkModel& model,
                                            const ChangePointAssignment& assignment,
                                            std::span<const NodeId> subset, RuleKind rule,
                                            std::span<const double> alphas,
                                            std::span<const std::size_t> max_horizons, Rng& rng,
                                            bool allow_loopy, std::vector<double>* trajectory) {
  if (alphas.size() != max_horizons.size()) {
    throw DomainError("one horizon cap per alpha is required");
  }
  std::vector<StoppingOutcome> out(alphas.size());
  if (alphas.empty()) return out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    StoppingRuleSpec spec{std::vector<NodeId>(subset.begin(), subset.end()), alphas[i], rule,
                          max_horizons[i], allow_loopy, {}};
    validate_rule(model, spec);
  }
  const RuleStatistic statistic(model, std::vector<NodeId>(subset.begin(), subset.end()), rule,
                                allow_loopy);
  const std::size_t truth = assignment.subset_min(subset);
  const std::size_t cap = *std::max_element(max_horizons.begin(), max_horizons.end());

  std::vector<bool> resolved(alphas.size(), false);
  std::size_t open = alphas.size();
  ObservationPanel panel(model.node_count(), model.edge_count());
  ObservationGenerator gen(model, assignment, rng);
  for (std::size_t n = 1; n <= cap && open > 0; ++n) {
    panel.append(gen.next());
    const double gamma = statistic.evaluate(panel, n);
    if (trajectory) trajectory->push_back(gamma);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      if (resolved[i]) continue;
      if (gamma >= 1.0 - alphas[i]) {
        out[i] = make_outcome(n, truth, gamma);
      } else if (n == max_horizons[i]) {
        out[i] = make_outcome(std::nullopt, truth, gamma);
      } else {
        continue;
      }
      resolved[i] = true;
      --open;
    }
  }
  return out;
}

}  // namespace netcpd
