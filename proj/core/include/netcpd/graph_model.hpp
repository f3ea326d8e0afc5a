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
#include <utility>
#include <variant>
#include <vector>

#include "netcpd/rng.hpp"

namespace netcpd {

using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Undirected edge with endpoints stored as (lo, hi), lo < hi.
struct Edge {
  NodeId lo;
  NodeId hi;

  NodeId other(NodeId j) const { return j == lo ? hi : lo; }
  bool operator==(const Edge&) const = default;
};

/// Neighbor entry of an adjacency list: the adjacent node and the edge that links them.
struct Incidence {
  NodeId node;
  EdgeId edge;
};

/// Simple undirected graph over nodes 0..d-1. Node terms and edge terms are
/// kept apart; the extended edge set (edges plus one self-loop per node) is
/// never materialized.
class StatisticalGraph {
 public:
  StatisticalGraph() = default;

  /// Throws ValidationError on self-loops, duplicate edges or out-of-range endpoints.
  StatisticalGraph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Incidence> neighbors(NodeId j) const { return adjacency_.at(j); }
  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;

  bool is_connected() const;
  bool is_acyclic() const;
  /// Connected and |E| = d - 1.
  bool is_tree() const { return is_connected() && edge_count() + 1 == node_count(); }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// pi(k) = (1 - rho)^(k-1) rho on k = 1, 2, ...
class GeometricPrior {
 public:
  explicit GeometricPrior(double rho);

  double rho() const { return rho_; }
  double log_survival_rate() const { return log_rho_bar_; }  // log(1 - rho)
  double pmf(std::size_t k) const;
  double log_pmf(std::size_t k) const;
  /// P(lambda > n) = (1 - rho)^n.
  double tail(std::size_t n) const;
  double log_tail(std::size_t n) const;

 private:
  double rho_;
  double log_rho_bar_;
};

struct GaussianFamily {
  double mean_pre;
  double mean_post;
  double variance;
};

struct BernoulliFamily {
  double p_pre;
  double p_post;
};

using DensityFamily = std::variant<GaussianFamily, BernoulliFamily>;

/// Pre-change density g and post-change density f of one observation stream.
/// Gaussian densities are taken w.r.t. Lebesgue measure, Bernoulli w.r.t.
/// counting measure on {0, 1}.
class TwoPhaseDensity {
 public:
  /// Throws ValidationError naming \p what on bad parameters.
  explicit TwoPhaseDensity(DensityFamily family, const std::string& what = "density");

  static TwoPhaseDensity gaussian(double mean_pre, double mean_post, double variance);
  static TwoPhaseDensity bernoulli(double p_pre, double p_post);

  const DensityFamily& family() const { return family_; }
  bool is_bernoulli() const { return std::holds_alternative<BernoulliFamily>(family_); }

  double log_pre(double x) const;
  double log_post(double x) const;
  /// h(x) = log f(x) - log g(x).
  double log_lr(double x) const;

  double sample_pre(Rng& rng) const;
  double sample_post(Rng& rng) const;

  /// Same family with the roles of f and g exchanged.
  TwoPhaseDensity swapped() const;
  /// sup |h| for the Bernoulli family; nullopt for Gaussians (unbounded).
  std::optional<double> llr_bound() const;
  bool is_flat() const;

 private:
  void check_support(double x) const;

  DensityFamily family_;
};

double log_lr(const TwoPhaseDensity& density, double x);

/// Raw description from which build_model produces a validated NetworkModel.
struct ModelSpec {
  std::size_t node_count = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<double> rho;                 // one per node
  std::vector<DensityFamily> node_densities;
  std::vector<DensityFamily> edge_densities;  // aligned with edges
};

class NetworkModel {
 public:
  NetworkModel(StatisticalGraph graph, std::vector<GeometricPrior> priors,
               std::vector<TwoPhaseDensity> node_densities,
               std::vector<TwoPhaseDensity> edge_densities);

  const StatisticalGraph& graph() const { return graph_; }
  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t edge_count() const { return graph_.edge_count(); }
  const GeometricPrior& prior(NodeId j) const { return priors_.at(j); }
  const TwoPhaseDensity& node_density(NodeId j) const { return node_densities_.at(j); }
  const TwoPhaseDensity& edge_density(EdgeId e) const { return edge_densities_.at(e); }
  bool is_tree() const { return tree_; }
  bool is_forest() const { return forest_; }

 private:
  StatisticalGraph graph_;
  std::vector<GeometricPrior> priors_;
  std::vector<TwoPhaseDensity> node_densities_;
  std::vector<TwoPhaseDensity> edge_densities_;
  bool tree_ = false;
  bool forest_ = false;
};

NetworkModel build_model(const ModelSpec& spec);

/// Change points lambda_j >= 1 for every node. Edge and subset minima are
/// always derived, never stored.
class ChangePointAssignment {
 public:
  ChangePointAssignment() = default;
  explicit ChangePointAssignment(std::vector<std::size_t> lambda);

  std::size_t node(NodeId j) const { return lambda_.at(j); }
  std::size_t edge(const StatisticalGraph& graph, EdgeId e) const;
  std::size_t subset_min(std::span<const NodeId> subset) const;
  std::span<const std::size_t> values() const { return lambda_; }
  std::size_t size() const { return lambda_.size(); }

 private:
  std::vector<std::size_t> lambda_;
};

/// Observations of all streams at a single time step.
struct TimeStep {
  std::vector<double> node;
  std::vector<double> edge;
};

/// Streams X_j^1..X_j^n and X_e^1..X_e^n; all share one horizon.
class ObservationPanel {
 public:
  ObservationPanel() = default;
  ObservationPanel(std::size_t node_count, std::size_t edge_count);
  ObservationPanel(std::vector<std::vector<double>> node_streams,
                   std::vector<std::vector<double>> edge_streams);

  std::size_t horizon() const { return horizon_; }
  std::size_t node_count() const { return node_streams_.size(); }
  std::size_t edge_count() const { return edge_streams_.size(); }
  std::span<const double> node_stream(NodeId j) const { return node_streams_.at(j); }
  std::span<const double> edge_stream(EdgeId e) const { return edge_streams_.at(e); }

  /// Throws SchemaError unless the step covers every node and edge.
  void append(const TimeStep& step);

 private:
  std::size_t horizon_ = 0;
  std::vector<std::vector<double>> node_streams_;
  std::vector<std::vector<double>> edge_streams_;
};

ChangePointAssignment sample_change_points(const NetworkModel& model, Rng& rng);

/// Draws observations one time step at a time; step t uses f on a stream
/// whose change point is <= t and g otherwise.
class ObservationGenerator {
 public:
  ObservationGenerator(const NetworkModel& model, ChangePointAssignment assignment, Rng& rng);

  TimeStep next();
  std::size_t time() const { return time_; }

 private:
  const NetworkModel* model_;
  ChangePointAssignment assignment_;
  std::vector<std::size_t> edge_change_;
  Rng* rng_;
  std::size_t time_ = 0;
};

ObservationPanel sample_observations(const NetworkModel& model,
                                     const ChangePointAssignment& assignment,
                                     std::size_t horizon, Rng& rng);

}  // namespace netcpd
