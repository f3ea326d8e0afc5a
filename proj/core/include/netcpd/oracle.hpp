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

// Brute-force references. Nothing here shares code with the message-passing
// path: likelihoods are evaluated as explicit products over time.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netcpd/graph_model.hpp"

namespace netcpd {

inline constexpr double kDefaultOracleBudget = 1e7;

/// Joint posterior P(lambda = k | X^n) on [n+1]^d; index n+1 is "after n".
class JointPosteriorTable {
 public:
  JointPosteriorTable(std::size_t node_count, std::size_t horizon, std::vector<double> mass);

  std::size_t node_count() const { return node_count_; }
  std::size_t horizon() const { return horizon_; }
  std::span<const double> mass() const { return mass_; }
  /// \p changes holds 1-based change times, one per node.
  double at(std::span<const std::size_t> changes) const;

  std::vector<double> node_marginal(NodeId j) const;
  /// Row-major (n+1) x (n+1), rows indexed by lambda_i.
  std::vector<double> pair_marginal(NodeId i, NodeId j) const;
  /// P(min_{j in S} lambda_j <= n | X^n).
  double subset_min_cdf(std::span<const NodeId> subset) const;

 private:
  std::size_t node_count_;
  std::size_t horizon_;
  std::vector<double> mass_;
};

/// Throws BudgetError when d * (n+1)^d exceeds \p budget_cells.
JointPosteriorTable enumerate_joint_posterior(const NetworkModel& model,
                                              const ObservationPanel& panel, std::size_t n,
                                              double budget_cells = kDefaultOracleBudget);

/// log P(X^n | lambda) evaluated straight from the definition, for any lambda >= 1.
double direct_log_likelihood(const NetworkModel& model, const ObservationPanel& panel,
                             std::size_t n, std::span<const std::size_t> lambda);

struct ConstancyReport {
  bool constant = false;
  double max_relative_deviation = 0.0;
  std::vector<double> log_likelihoods;  // one per probe combination
};

/// Probes P(X^n | lambda_i = k_i, i in probed; fixed assignments) with every
/// probed k_i ranging over {n+1, ..., n+probe_count}, marginalizing all other
/// nodes by explicit summation truncated where the remaining prior mass is
/// below 1e-15. No lumping is used.
ConstancyReport lemma2_constancy_check(const NetworkModel& model, const ObservationPanel& panel,
                                       std::size_t n, std::span<const NodeId> probed,
                                       std::span<const std::pair<NodeId, std::size_t>> fixed = {},
                                       std::size_t probe_count = 4,
                                       double relative_tolerance = 1e-10,
                                       double budget_cells = kDefaultOracleBudget);

struct MarginalLikelihoodRatio {
  std::optional<std::size_t> k;  // nullopt: phi = infinity
  std::size_t n = 0;
  double log_value = 0.0;        // log D_phi^{k,n}
};

/// log M_phi^{k,n}: the prior mixture of likelihood ratios against the
/// all-pre-change data, conditional on phi = k (k = nullopt meaning infinity).
double log_mixture_ratio(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                         std::span<const NodeId> subset, std::optional<std::size_t> k,
                         double budget_cells = kDefaultOracleBudget);

/// log D_phi^{k,n} = log M^{k,n} - log M^{inf,n}.
MarginalLikelihoodRatio marginal_lr(const NetworkModel& model, const ObservationPanel& panel,
                                    std::size_t n, std::span<const NodeId> subset,
                                    std::optional<std::size_t> k,
                                    double budget_cells = kDefaultOracleBudget);

struct ConcentrationRow {
  std::size_t n = 0;
  double median_normalized_log_lr = 0.0;  // median over reps of (1/n) log D
  double info = 0.0;                      // I_phi
};

/// Samples lambda from the prior conditioned on min_{j in S} lambda_j = k (by
/// rejection), simulates data and tracks (1/n) log D_phi^{k,n} along \p n_grid.
std::vector<ConcentrationRow> concentration_diagnostic(const NetworkModel& model,
                                                       std::span<const NodeId> subset,
                                                       std::size_t k,
                                                       std::span<const std::size_t> n_grid,
                                                       std::size_t reps, Rng& rng,
                                                       double budget_cells = kDefaultOracleBudget);

}  // namespace netcpd
