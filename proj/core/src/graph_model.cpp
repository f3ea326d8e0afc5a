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

#include "netcpd/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "netcpd/error.hpp"

namespace netcpd {

namespace {

std::string edge_name(NodeId a, NodeId b) {
  std::ostringstream os;
  os << "edge {" << a + 1 << "," << b + 1 << "}";
  return os.str();
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void validate_family(const DensityFamily& family, const std::string& what) {
  if (const auto* g = std::get_if<GaussianFamily>(&family)) {
    if (!(g->variance > 0.0) || !std::isfinite(g->variance)) {
      std::ostringstream os;
      os << what << ": gaussian variance must be > 0, got " << g->variance;
      throw ValidationError(os.str());
    }
    if (!std::isfinite(g->mean_pre) || !std::isfinite(g->mean_post)) {
      throw ValidationError(what + ": gaussian means must be finite");
    }
  } else {
    const auto& b = std::get<BernoulliFamily>(family);
    for (double p : {b.p_pre, b.p_post}) {
      if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << what << ": bernoulli probability must lie in (0,1), got " << p;
        throw ValidationError(os.str());
      }
    }
  }
}

}  // namespace

StatisticalGraph::StatisticalGraph(std::size_t node_count,
                                   std::span<const std::pair<NodeId, NodeId>> edges)
    : adjacency_(node_count) {
  if (node_count == 0) throw ValidationError("graph: node count must be positive");
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw ValidationError(edge_name(a, b) + ": endpoint outside [1, " +
                            std::to_string(node_count) + "]");
    }
    if (a == b) throw ValidationError(edge_name(a, b) + ": self-loop not allowed");
    if (find_edge(a, b)) throw ValidationError(edge_name(a, b) + ": duplicate edge");
    const EdgeId id = edges_.size();
    edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
    adjacency_[a].push_back(Incidence{b, id});
    adjacency_[b].push_back(Incidence{a, id});
  }
}

std::optional<EdgeId> StatisticalGraph::find_edge(NodeId a, NodeId b) const {
  if (a >= adjacency_.size()) return std::nullopt;
  for (const Incidence& inc : adjacency_[a]) {
    if (inc.node == b) return inc.edge;
  }
  return std::nullopt;
}

bool StatisticalGraph::is_connected() const {
  if (adjacency_.empty()) return false;
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId j = stack.back();
    stack.pop_back();
    for (const Incidence& inc : adjacency_[j]) {
      if (!seen[inc.node]) {
        seen[inc.node] = true;
        ++reached;
        stack.push_back(inc.node);
      }
    }
  }
  return reached == adjacency_.size();
}

bool StatisticalGraph::is_acyclic() const {
  std::vector<std::size_t> parent(adjacency_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const Edge& e : edges_) {
    const std::size_t ra = find_root(parent, e.lo);
    const std::size_t rb = find_root(parent, e.hi);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

GeometricPrior::GeometricPrior(double rho) : rho_(rho), log_rho_bar_(std::log1p(-rho)) {
  if (!(rho > 0.0 && rho < 1.0)) {
    std::ostringstream os;
    os << "geometric prior: rho must lie in (0,1), got " << rho;
    throw ValidationError(os.str());
  }
}

double GeometricPrior::pmf(std::size_t k) const { return k == 0 ? 0.0 : std::exp(log_pmf(k)); }

double GeometricPrior::log_pmf(std::size_t k) const {
  if (k == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(k - 1) * log_rho_bar_ + std::log(rho_);
}

double GeometricPrior::tail(std::size_t n) const { return std::exp(log_tail(n)); }

double GeometricPrior::log_tail(std::size_t n) const {
  return static_cast<double>(n) * log_rho_bar_;
}

TwoPhaseDensity::TwoPhaseDensity(DensityFamily family, const std::string& what)
    : family_(family) {
  validate_family(family_, what);
}

TwoPhaseDensity TwoPhaseDensity::gaussian(double mean_pre, double mean_post, double variance) {
  return TwoPhaseDensity(GaussianFamily{mean_pre, mean_post, variance});
}

TwoPhaseDensity TwoPhaseDensity::bernoulli(double p_pre, double p_post) {
  return TwoPhaseDensity(BernoulliFamily{p_pre, p_post});
}

void TwoPhaseDensity::check_support(double x) const {
  if (is_bernoulli() && x != 0.0 && x != 1.0) {
    std::ostringstream os;
    os << "bernoulli observation must be 0 or 1, got " << x;
    throw DomainError(os.str());
  }
}

namespace {

double gaussian_log_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - z * z / (2.0 * variance);
}

double bernoulli_log_pmf(double x, double p) { return x == 1.0 ? std::log(p) : std::log1p(-p); }

}  // namespace

double TwoPhaseDensity::log_pre(double x) const {
  check_support(x);
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    return gaussian_log_pdf(x, g->mean_pre, g->variance);
  }
  return bernoulli_log_pmf(x, std::get<BernoulliFamily>(family_).p_pre);
}

double TwoPhaseDensity::log_post(double x) const {
  check_support(x);
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    return gaussian_log_pdf(x, g->mean_post, g->variance);
  }
  return bernoulli_log_pmf(x, std::get<BernoulliFamily>(family_).p_post);
}

double TwoPhaseDensity::log_lr(double x) const {
  check_support(x);
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    const double a = x - g->mean_pre;
    const double b = x - g->mean_post;
    return (a * a - b * b) / (2.0 * g->variance);
  }
  const auto& b = std::get<BernoulliFamily>(family_);
  return x == 1.0 ? std::log(b.p_post / b.p_pre) : std::log1p(-b.p_post) - std::log1p(-b.p_pre);
}

double TwoPhaseDensity::sample_pre(Rng& rng) const {
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    std::normal_distribution<double> normal(g->mean_pre, std::sqrt(g->variance));
    return normal(rng);
  }
  std::bernoulli_distribution coin(std::get<BernoulliFamily>(family_).p_pre);
  return coin(rng) ? 1.0 : 0.0;
}

double TwoPhaseDensity::sample_post(Rng& rng) const {
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    std::normal_distribution<double> normal(g->mean_post, std::sqrt(g->variance));
    return normal(rng);
  }
  std::bernoulli_distribution coin(std::get<BernoulliFamily>(family_).p_post);
  return coin(rng) ? 1.0 : 0.0;
}

TwoPhaseDensity TwoPhaseDensity::swapped() const {
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) {
    return gaussian(g->mean_post, g->mean_pre, g->variance);
  }
  const auto& b = std::get<BernoulliFamily>(family_);
  return bernoulli(b.p_post, b.p_pre);
}

std::optional<double> TwoPhaseDensity::llr_bound() const {
  if (const auto* b = std::get_if<BernoulliFamily>(&family_)) {
    return std::max(std::abs(std::log(b->p_post / b->p_pre)),
                    std::abs(std::log1p(-b->p_post) - std::log1p(-b->p_pre)));
  }
  if (is_flat()) return 0.0;
  return std::nullopt;
}

bool TwoPhaseDensity::is_flat() const {
  if (const auto* g = std::get_if<GaussianFamily>(&family_)) return g->mean_pre == g->mean_post;
  const auto& b = std::get<BernoulliFamily>(family_);
  return b.p_pre == b.p_post;
}

double log_lr(const TwoPhaseDensity& density, double x) { return density.log_lr(x); }

NetworkModel::NetworkModel(StatisticalGraph graph, std::vector<GeometricPrior> priors,
                           std::vector<TwoPhaseDensity> node_densities,
                           std::vector<TwoPhaseDensity> edge_densities)
    : graph_(std::move(graph)),
      priors_(std::move(priors)),
      node_densities_(std::move(node_densities)),
      edge_densities_(std::move(edge_densities)) {
  if (priors_.size() != graph_.node_count()) {
    throw ValidationError("model: expected one prior per node (" +
                          std::to_string(graph_.node_count()) + "), got " +
                          std::to_string(priors_.size()));
  }
  if (node_densities_.size() != graph_.node_count()) {
    throw ValidationError("model: expected one density per node (" +
                          std::to_string(graph_.node_count()) + "), got " +
                          std::to_string(node_densities_.size()));
  }
  if (edge_densities_.size() != graph_.edge_count()) {
    throw ValidationError("model: expected one density per edge (" +
                          std::to_string(graph_.edge_count()) + "), got " +
                          std::to_string(edge_densities_.size()));
  }
  tree_ = graph_.is_tree();
  forest_ = graph_.is_acyclic();
}

NetworkModel build_model(const ModelSpec& spec) {
  StatisticalGraph graph(spec.node_count, spec.edges);
  if (spec.rho.size() != spec.node_count) {
    throw ValidationError("model: expected " + std::to_string(spec.node_count) +
                          " priors, got " + std::to_string(spec.rho.size()));
  }
  std::vector<GeometricPrior> priors;
  priors.reserve(spec.node_count);
  for (std::size_t j = 0; j < spec.rho.size(); ++j) {
    const double rho = spec.rho[j];
    if (!(rho > 0.0 && rho < 1.0)) {
      std::ostringstream os;
      os << "node " << j + 1 << " prior: rho must lie in (0,1), got " << rho;
      throw ValidationError(os.str());
    }
    priors.emplace_back(rho);
  }
  if (spec.node_densities.size() != spec.node_count) {
    throw ValidationError("model: expected " + std::to_string(spec.node_count) +
                          " node densities, got " + std::to_string(spec.node_densities.size()));
  }
  if (spec.edge_densities.size() != spec.edges.size()) {
    throw ValidationError("model: expected " + std::to_string(spec.edges.size()) +
                          " edge densities, got " + std::to_string(spec.edge_densities.size()));
  }
  std::vector<TwoPhaseDensity> nodes;
  nodes.reserve(spec.node_count);
  for (std::size_t j = 0; j < spec.node_count; ++j) {
    nodes.emplace_back(spec.node_densities[j], "node " + std::to_string(j + 1) + " density");
  }
  std::vector<TwoPhaseDensity> edges;
  edges.reserve(spec.edges.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    edges.emplace_back(spec.edge_densities[e],
                       edge_name(spec.edges[e].first, spec.edges[e].second) + " density");
  }
  return NetworkModel(std::move(graph), std::move(priors), std::move(nodes), std::move(edges));
}

ChangePointAssignment::ChangePointAssignment(std::vector<std::size_t> lambda)
    : lambda_(std::move(lambda)) {
  for (std::size_t j = 0; j < lambda_.size(); ++j) {
    if (lambda_[j] < 1) {
      throw ValidationError("change point of node " + std::to_string(j + 1) + " must be >= 1");
    }
  }
}

std::size_t ChangePointAssignment::edge(const StatisticalGraph& graph, EdgeId e) const {
  const Edge& ed = graph.edge(e);
  return std::min(lambda_.at(ed.lo), lambda_.at(ed.hi));
}

std::size_t ChangePointAssignment::subset_min(std::span<const NodeId> subset) const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (NodeId j : subset) best = std::min(best, lambda_.at(j));
  return best;
}

ObservationPanel::ObservationPanel(std::size_t node_count, std::size_t edge_count)
    : node_streams_(node_count), edge_streams_(edge_count) {}

ObservationPanel::ObservationPanel(std::vector<std::vector<double>> node_streams,
                                   std::vector<std::vector<double>> edge_streams)
    : node_streams_(std::move(node_streams)), edge_streams_(std::move(edge_streams)) {
  std::optional<std::size_t> len;
  auto check = [&](const std::vector<double>& s) {
    if (!len) len = s.size();
    if (*len != s.size()) throw SchemaError("observation panel: streams differ in length");
  };
  for (const auto& s : node_streams_) check(s);
  for (const auto& s : edge_streams_) check(s);
  horizon_ = len.value_or(0);
}

void ObservationPanel::append(const TimeStep& step) {
  if (step.node.size() != node_streams_.size() || step.edge.size() != edge_streams_.size()) {
    std::ostringstream os;
    os << "observation record covers " << step.node.size() << " nodes and " << step.edge.size()
       << " edges; expected " << node_streams_.size() << " and " << edge_streams_.size();
    throw SchemaError(os.str());
  }
  for (std::size_t j = 0; j < step.node.size(); ++j) node_streams_[j].push_back(step.node[j]);
  for (std::size_t e = 0; e < step.edge.size(); ++e) edge_streams_[e].push_back(step.edge[e]);
  ++horizon_;
}

ChangePointAssignment sample_change_points(const NetworkModel& model, Rng& rng) {
  std::vector<std::size_t> lambda(model.node_count());
  for (NodeId j = 0; j < model.node_count(); ++j) {
    // std::geometric_distribution counts failures before the first success.
    std::geometric_distribution<std::size_t> geom(model.prior(j).rho());
    lambda[j] = geom(rng) + 1;
  }
  return ChangePointAssignment(std::move(lambda));
}

ObservationGenerator::ObservationGenerator(const NetworkModel& model,
                                           ChangePointAssignment assignment, Rng& rng)
    : model_(&model), assignment_(std::move(assignment)), rng_(&rng) {
  if (assignment_.size() != model.node_count()) {
    throw ValidationError("assignment does not cover every node");
  }
  edge_change_.reserve(model.edge_count());
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    edge_change_.push_back(assignment_.edge(model.graph(), e));
  }
}

TimeStep ObservationGenerator::next() {
  ++time_;
  TimeStep step;
  step.node.reserve(model_->node_count());
  step.edge.reserve(model_->edge_count());
  for (NodeId j = 0; j < model_->node_count(); ++j) {
    const TwoPhaseDensity& d = model_->node_density(j);
    step.node.push_back(time_ >= assignment_.node(j) ? d.sample_post(*rng_) : d.sample_pre(*rng_));
  }
  for (EdgeId e = 0; e < model_->edge_count(); ++e) {
    const TwoPhaseDensity& d = model_->edge_density(e);
    step.edge.push_back(time_ >= edge_change_[e] ? d.sample_post(*rng_) : d.sample_pre(*rng_));
  }
  return step;
}

ObservationPanel sample_observations(const NetworkModel& model,
                                     const ChangePointAssignment& assignment,
                                     std::size_t horizon, Rng& rng) {
  ObservationPanel panel(model.node_count(), model.edge_count());
  ObservationGenerator gen(model, assignment, rng);
  for (std::size_t t = 0; t < horizon; ++t) panel.append(gen.next());
  return panel;
}

}  // namespace netcpd
