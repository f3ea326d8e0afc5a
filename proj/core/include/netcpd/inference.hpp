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

// Exact sum-product inference over change-point hypotheses on tree-structured
// statistical graphs.
//
// Every length-(n+1) vector below is indexed by change time: entry k-1 holds
// "change at k" for k in 1..n, and entry n holds the lumped state "change
// after n". All messages and profiles live in the log domain.

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "netcpd/graph_model.hpp"

namespace netcpd {

using LogVector = std::vector<double>;

/// pi~(k) for k in 1..n followed by the tail mass (1 - rho)^n.
std::vector<double> tail_augmented_prior(const GeometricPrior& prior, std::size_t n);
LogVector log_tail_augmented_prior(const GeometricPrior& prior, std::size_t n);

/// log P(stream^n | change at k) for k in 1..n+1, in O(n) via suffix sums of h.
/// Entry n+1 is the all-pre-change log likelihood.
LogVector likelihood_profile(std::span<const double> stream, const TwoPhaseDensity& density,
                             std::size_t n);

/// Node potentials log pi~ + log P(X_j|k) and edge profiles log P(X_e|k) at a
/// fixed horizon n; everything a message pass consumes.
struct LocalEvidence {
  std::size_t horizon = 0;
  StatisticalGraph graph;
  std::vector<LogVector> node_potential;
  std::vector<LogVector> edge_profile;
};

LocalEvidence build_evidence(const NetworkModel& model, const ObservationPanel& panel,
                             std::size_t n);

/// Directed messages m_{j->i}, one per orientation of every edge, each shifted
/// so that its largest log entry is 0. The shift is kept in log_normalizer().
class MessageTable {
 public:
  MessageTable(std::shared_ptr<const LocalEvidence> evidence, bool approximate);

  std::size_t horizon() const { return evidence_->horizon; }
  const LocalEvidence& evidence() const { return *evidence_; }
  const StatisticalGraph& graph() const { return evidence_->graph; }

  std::span<const double> message(NodeId from, NodeId to) const;
  /// Mutable access; posteriors are invariant to adding a constant to a log message.
  std::span<double> mutable_message(NodeId from, NodeId to);
  double log_normalizer(NodeId from, NodeId to) const;

  /// Stores \p log_message shifted to max 0.
  void set_message(NodeId from, NodeId to, LogVector log_message);

  bool approximate() const { return approximate_; }
  bool converged() const { return converged_; }
  std::size_t iterations() const { return iterations_; }
  void set_convergence(bool converged, std::size_t iterations) {
    converged_ = converged;
    iterations_ = iterations;
  }

 private:
  std::size_t slot(NodeId from, NodeId to) const;

  std::shared_ptr<const LocalEvidence> evidence_;
  std::vector<LogVector> messages_;
  std::vector<double> normalizers_;
  bool approximate_ = false;
  bool converged_ = true;
  std::size_t iterations_ = 0;
};

/// Two-sweep (leaves to root, then root to leaves) message passing. Accepts
/// any acyclic graph; each component is rooted at its smallest node unless
/// \p root is given for its component. Throws UnsupportedError on cycles.
MessageTable run_tree_bp(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                         std::optional<NodeId> root = std::nullopt);
MessageTable run_tree_bp(std::shared_ptr<const LocalEvidence> evidence,
                         std::optional<NodeId> root = std::nullopt);

struct LoopyOptions {
  std::size_t max_iters = 200;
  double damping = 0.5;
  double tolerance = 1e-8;
};

/// Synchronous flooding with log-domain damping. The result is flagged
/// approximate; check converged() before trusting it.
MessageTable run_loopy_bp(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                          const LoopyOptions& options = {});

/// gamma_j^n over [n+1]; the last entry is P(lambda_j > n | X^n).
std::vector<double> node_posterior(const MessageTable& messages, NodeId j);

/// Sum of the first n entries of a posterior over [n+1].
double cdf_at_horizon(std::span<const double> posterior);

struct PairPosterior {
  NodeId first;
  NodeId second;
  std::size_t dim = 0;            // n + 1
  std::vector<double> zeta;       // row-major, rows indexed by lambda_first
  double gamma_min = 0.0;         // P(lambda_first ^ lambda_second <= n | X^n)

  double at(std::size_t k1, std::size_t k2) const { return zeta[(k1 - 1) * dim + (k2 - 1)]; }
};

/// zeta_ij^n over [n+1]^2 for an edge {i,j}. Throws UnsupportedError when
/// i and j are not adjacent; use subset_min_cdf for other pairs.
PairPosterior pair_posterior(const MessageTable& messages, NodeId i, NodeId j);

/// log P(lambda_j > n for all j in S | X^n), as the ratio of a partition
/// function with every node of S pinned to the lumped state over the
/// unconstrained one. Exact on forests.
double log_subset_survival(const LocalEvidence& evidence, std::span<const NodeId> subset);

/// gamma_S^n[n] = P(min_{j in S} lambda_j <= n | X^n).
double subset_min_cdf(const LocalEvidence& evidence, std::span<const NodeId> subset);
double subset_min_cdf(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                      std::span<const NodeId> subset);

/// Log partition function of the (possibly constrained) model, computed by a
/// single collect sweep per component.
double log_partition(const LocalEvidence& evidence, std::span<const LogVector> node_potential);

struct PosteriorSet {
  std::size_t horizon = 0;
  std::vector<std::vector<double>> node;  // gamma_j^n
  std::vector<PairPosterior> edge;        // zeta per edge, oriented (lo, hi)
  std::vector<std::vector<NodeId>> subsets;
  std::vector<double> subset_cdf;         // gamma_S^n[n], aligned with subsets

  double node_cdf(NodeId j) const { return cdf_at_horizon(node.at(j)); }
};

PosteriorSet compute_posterior_set(const MessageTable& messages,
                                   std::span<const std::vector<NodeId>> subsets = {});

/// CSV dump "kind,id,k1,k2,value": kind is node, edge or subset; ids and change
/// times are 1-based; k = n+1 is the lumped state; subset rows carry the
/// scalar gamma_S^n[n] with empty k columns.
void write_posterior_dump(std::ostream& out, const PosteriorSet& set);

namespace detail {

/// m(k) = log sum_{k'} exp(source(k') + edge(min(k, k'))), split at k' <= k and
/// k' > k and accumulated with running log-sums: O(n).
LogVector message_prefix(std::span<const double> source, std::span<const double> edge_profile);
/// Same quantity through the plain O(n^2) double loop.
LogVector message_naive(std::span<const double> source, std::span<const double> edge_profile);

}  // namespace detail

}  // namespace netcpd
