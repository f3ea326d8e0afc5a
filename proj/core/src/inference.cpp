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

#include "netcpd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcpd/error.hpp"
#include "netcpd/log_math.hpp"

namespace netcpd {

std::vector<double> tail_augmented_prior(const GeometricPrior& prior, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t k = 1; k <= n; ++k) out[k - 1] = prior.pmf(k);
  out[n] = prior.tail(n);
  return out;
}

LogVector log_tail_augmented_prior(const GeometricPrior& prior, std::size_t n) {
  LogVector out(n + 1);
  for (std::size_t k = 1; k <= n; ++k) out[k - 1] = prior.log_pmf(k);
  out[n] = prior.log_tail(n);
  return out;
}

LogVector likelihood_profile(std::span<const double> stream, const TwoPhaseDensity& density,
                             std::size_t n) {
  if (stream.size() < n) {
    throw DomainError("likelihood profile: stream has " + std::to_string(stream.size()) +
                      " observations, horizon is " + std::to_string(n));
  }
  LogVector out(n + 1);
  double all_pre = 0.0;
  for (std::size_t t = 0; t < n; ++t) all_pre += density.log_pre(stream[t]);
  out[n] = all_pre;
  double suffix = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    suffix += density.log_lr(stream[k - 1]);
    out[k - 1] = all_pre + suffix;
  }
  return out;
}

LocalEvidence build_evidence(const NetworkModel& model, const ObservationPanel& panel,
                             std::size_t n) {
  if (panel.node_count() != model.node_count() || panel.edge_count() != model.edge_count()) {
    throw SchemaError("observation panel does not match the model's nodes and edges");
  }
  if (panel.horizon() < n) {
    throw DomainError("panel horizon " + std::to_string(panel.horizon()) +
                      " is shorter than requested n = " + std::to_string(n));
  }
  LocalEvidence ev;
  ev.horizon = n;
  ev.graph = model.graph();
  ev.node_potential.reserve(model.node_count());
  for (NodeId j = 0; j < model.node_count(); ++j) {
    LogVector pot = log_tail_augmented_prior(model.prior(j), n);
    const LogVector lik = likelihood_profile(panel.node_stream(j), model.node_density(j), n);
    for (std::size_t k = 0; k <= n; ++k) pot[k] += lik[k];
    ev.node_potential.push_back(std::move(pot));
  }
  ev.edge_profile.reserve(model.edge_count());
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    ev.edge_profile.push_back(likelihood_profile(panel.edge_stream(e), model.edge_density(e), n));
  }
  return ev;
}

namespace detail {

LogVector message_prefix(std::span<const double> source, std::span<const double> edge_profile) {
  const std::size_t len = source.size();
  // suffix[k] = log sum_{k' > k} exp(source(k')), 0-based.
  LogVector suffix(len, kNegInf);
  for (std::size_t k = len - 1; k-- > 0;) suffix[k] = log_add(suffix[k + 1], source[k + 1]);
  LogVector out(len);
  double prefix = kNegInf;
  for (std::size_t k = 0; k < len; ++k) {
    prefix = log_add(prefix, source[k] + edge_profile[k]);
    out[k] = log_add(prefix, edge_profile[k] + suffix[k]);
  }
  return out;
}

LogVector message_naive(std::span<const double> source, std::span<const double> edge_profile) {
  const std::size_t len = source.size();
  LogVector out(len);
  std::vector<double> terms(len);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t kp = 0; kp < len; ++kp) terms[kp] = source[kp] + edge_profile[std::min(k, kp)];
    out[k] = log_sum_exp(terms);
  }
  return out;
}

}  // namespace detail

namespace {

double shift_to_max_zero(LogVector& v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return 0.0;
  for (double& x : v) x -= hi;
  return hi;
}

struct RootedComponent {
  std::vector<NodeId> order;  // BFS order, root first
  std::vector<NodeId> parent;  // parent[j] == j for the root
};

/// BFS forest over all nodes; the component containing \p root (if any) is rooted there.
std::vector<RootedComponent> root_forest(const StatisticalGraph& graph,
                                         std::optional<NodeId> root) {
  const std::size_t d = graph.node_count();
  std::vector<bool> seen(d, false);
  std::vector<RootedComponent> out;
  auto grow = [&](NodeId start) {
    RootedComponent comp;
    comp.parent.assign(d, start);
    comp.order.push_back(start);
    seen[start] = true;
    for (std::size_t head = 0; head < comp.order.size(); ++head) {
      const NodeId j = comp.order[head];
      for (const Incidence& inc : graph.neighbors(j)) {
        if (!seen[inc.node]) {
          seen[inc.node] = true;
          comp.parent[inc.node] = j;
          comp.order.push_back(inc.node);
        }
      }
    }
    out.push_back(std::move(comp));
  };
  if (root) {
    if (*root >= d) throw DomainError("root node out of range");
    grow(*root);
  }
  for (NodeId j = 0; j < d; ++j) {
    if (!seen[j]) grow(j);
  }
  return out;
}

void require_acyclic(const StatisticalGraph& graph) {
  if (!graph.is_acyclic()) {
    throw UnsupportedError(
        "exact message passing needs an acyclic graph; use run_loopy_bp for graphs with cycles");
  }
}

/// node potential plus every incoming message except the one from \p skip.
LogVector gather(const MessageTable& table, std::span<const double> potential, NodeId j,
                 std::optional<NodeId> skip) {
  LogVector acc(potential.begin(), potential.end());
  for (const Incidence& inc : table.graph().neighbors(j)) {
    if (skip && inc.node == *skip) continue;
    const auto m = table.message(inc.node, j);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += m[k];
  }
  return acc;
}

}  // namespace

MessageTable::MessageTable(std::shared_ptr<const LocalEvidence> evidence, bool approximate)
    : evidence_(std::move(evidence)), approximate_(approximate) {
  const std::size_t slots = 2 * evidence_->graph.edge_count();
  messages_.assign(slots, LogVector(evidence_->horizon + 1, 0.0));
  normalizers_.assign(slots, 0.0);
}

std::size_t MessageTable::slot(NodeId from, NodeId to) const {
  const auto e = evidence_->graph.find_edge(from, to);
  if (!e) {
    throw DomainError("no edge {" + std::to_string(from + 1) + "," + std::to_string(to + 1) + "}");
  }
  return 2 * *e + (from == evidence_->graph.edge(*e).lo ? 0 : 1);
}

std::span<const double> MessageTable::message(NodeId from, NodeId to) const {
  return messages_[slot(from, to)];
}

std::span<double> MessageTable::mutable_message(NodeId from, NodeId to) {
  return messages_[slot(from, to)];
}

double MessageTable::log_normalizer(NodeId from, NodeId to) const {
  return normalizers_[slot(from, to)];
}

void MessageTable::set_message(NodeId from, NodeId to, LogVector log_message) {
  const std::size_t s = slot(from, to);
  normalizers_[s] = shift_to_max_zero(log_message);
  messages_[s] = std::move(log_message);
}

MessageTable run_tree_bp(std::shared_ptr<const LocalEvidence> evidence,
                         std::optional<NodeId> root) {
  require_acyclic(evidence->graph);
  MessageTable table(evidence, false);
  const LocalEvidence& ev = *evidence;
  for (const RootedComponent& comp : root_forest(ev.graph, root)) {
    // Collect: leaves towards the root.
    for (auto it = comp.order.rbegin(); it != comp.order.rend(); ++it) {
      const NodeId j = *it;
      const NodeId p = comp.parent[j];
      if (p == j) continue;
      const LogVector src = gather(table, ev.node_potential[j], j, p);
      const EdgeId e = *ev.graph.find_edge(j, p);
      table.set_message(j, p, detail::message_prefix(src, ev.edge_profile[e]));
    }
    // Distribute: root towards the leaves, reusing the collected messages.
    for (const NodeId j : comp.order) {
      for (const Incidence& inc : ev.graph.neighbors(j)) {
        if (comp.parent[inc.node] != j || inc.node == comp.order.front()) continue;
        const LogVector src = gather(table, ev.node_potential[j], j, inc.node);
        table.set_message(j, inc.node, detail::message_prefix(src, ev.edge_profile[inc.edge]));
      }
    }
  }
  return table;
}

MessageTable run_tree_bp(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                         std::optional<NodeId> root) {
  if (!model.is_forest()) require_acyclic(model.graph());
  return run_tree_bp(std::make_shared<const LocalEvidence>(build_evidence(model, panel, n)), root);
}

MessageTable run_loopy_bp(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                          const LoopyOptions& options) {
  if (!(options.damping >= 0.0 && options.damping < 1.0)) {
    throw DomainError("loopy damping must lie in [0,1)");
  }
  auto evidence = std::make_shared<const LocalEvidence>(build_evidence(model, panel, n));
  const LocalEvidence& ev = *evidence;
  MessageTable table(evidence, true);
  const StatisticalGraph& g = ev.graph;

  std::size_t iter = 0;
  bool converged = g.edge_count() == 0;
  while (!converged && iter < options.max_iters) {
    ++iter;
    std::vector<std::pair<std::pair<NodeId, NodeId>, LogVector>> updates;
    updates.reserve(2 * g.edge_count());
    double change = 0.0;
    for (const Edge& e : g.edges()) {
      for (const auto& [from, to] : {std::pair{e.lo, e.hi}, std::pair{e.hi, e.lo}}) {
        const LogVector src = gather(table, ev.node_potential[from], from, to);
        LogVector fresh = detail::message_prefix(src, ev.edge_profile[*g.find_edge(from, to)]);
        shift_to_max_zero(fresh);
        const auto old = table.message(from, to);
        for (std::size_t k = 0; k < fresh.size(); ++k) {
          if (fresh[k] == kNegInf && old[k] == kNegInf) continue;
          fresh[k] = (1.0 - options.damping) * fresh[k] + options.damping * old[k];
        }
        shift_to_max_zero(fresh);
        for (std::size_t k = 0; k < fresh.size(); ++k) {
          if (fresh[k] == kNegInf && old[k] == kNegInf) continue;
          change = std::max(change, std::abs(fresh[k] - old[k]));
        }
        updates.push_back({{from, to}, std::move(fresh)});
      }
    }
    for (auto& [dir, msg] : updates) table.set_message(dir.first, dir.second, std::move(msg));
    converged = change < options.tolerance;
  }
  table.set_convergence(converged, iter);
  return table;
}

std::vector<double> node_posterior(const MessageTable& messages, NodeId j) {
  const LogVector belief =
      gather(messages, messages.evidence().node_potential.at(j), j, std::nullopt);
  const double z = log_sum_exp(belief);
  std::vector<double> out(belief.size());
  for (std::size_t k = 0; k < belief.size(); ++k) out[k] = std::exp(belief[k] - z);
  return out;
}

double cdf_at_horizon(std::span<const double> posterior) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < posterior.size(); ++k) acc += posterior[k];
  return acc;
}

PairPosterior pair_posterior(const MessageTable& messages, NodeId i, NodeId j) {
  const auto e = messages.graph().find_edge(i, j);
  if (!e) {
    throw UnsupportedError("pair posterior needs an edge; {" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + "} is not one (use subset_min_cdf)");
  }
  const LocalEvidence& ev = messages.evidence();
  const LogVector ai = gather(messages, ev.node_potential[i], i, j);
  const LogVector aj = gather(messages, ev.node_potential[j], j, i);
  const std::span<const double> edge = ev.edge_profile[*e];
  const std::size_t dim = ai.size();

  PairPosterior out{i, j, dim, std::vector<double>(dim * dim), 0.0};
  LogVector logz(dim * dim);
  for (std::size_t k1 = 0; k1 < dim; ++k1) {
    for (std::size_t k2 = 0; k2 < dim; ++k2) {
      logz[k1 * dim + k2] = ai[k1] + aj[k2] + edge[std::min(k1, k2)];
    }
  }
  const double z = log_sum_exp(logz);
  for (std::size_t c = 0; c < logz.size(); ++c) out.zeta[c] = std::exp(logz[c] - z);
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < out.zeta.size(); ++c) acc += out.zeta[c];
  out.gamma_min = acc;
  return out;
}

double log_partition(const LocalEvidence& ev, std::span<const LogVector> node_potential) {
  require_acyclic(ev.graph);
  double logz = 0.0;
  for (const RootedComponent& comp : root_forest(ev.graph, std::nullopt)) {
    std::vector<LogVector> up(ev.graph.node_count());
    for (auto it = comp.order.rbegin(); it != comp.order.rend(); ++it) {
      const NodeId j = *it;
      LogVector src = node_potential[j];
      for (const Incidence& inc : ev.graph.neighbors(j)) {
        if (inc.node == comp.parent[j] && j != comp.order.front()) continue;
        for (std::size_t k = 0; k < src.size(); ++k) src[k] += up[inc.node][k];
      }
      if (j == comp.order.front()) {
        logz += log_sum_exp(src);
      } else {
        up[j] = detail::message_prefix(src, ev.edge_profile[*ev.graph.find_edge(j, comp.parent[j])]);
        logz += shift_to_max_zero(up[j]);
      }
    }
  }
  return logz;
}

double log_subset_survival(const LocalEvidence& ev, std::span<const NodeId> subset) {
  if (subset.empty()) throw DomainError("subset must be nonempty");
  std::vector<LogVector> pinned = ev.node_potential;
  for (NodeId j : subset) {
    if (j >= pinned.size()) throw DomainError("subset node out of range");
    std::fill(pinned[j].begin(), pinned[j].end() - 1, kNegInf);
  }
  return std::min(0.0, log_partition(ev, pinned) - log_partition(ev, ev.node_potential));
}

double subset_min_cdf(const LocalEvidence& ev, std::span<const NodeId> subset) {
  return -std::expm1(log_subset_survival(ev, subset));
}

double subset_min_cdf(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                      std::span<const NodeId> subset) {
  if (!model.is_forest()) require_acyclic(model.graph());
  return subset_min_cdf(build_evidence(model, panel, n), subset);
}

PosteriorSet compute_posterior_set(const MessageTable& messages,
                                   std::span<const std::vector<NodeId>> subsets) {
  PosteriorSet set;
  set.horizon = messages.horizon();
  const StatisticalGraph& g = messages.graph();
  for (NodeId j = 0; j < g.node_count(); ++j) set.node.push_back(node_posterior(messages, j));
  for (const Edge& e : g.edges()) set.edge.push_back(pair_posterior(messages, e.lo, e.hi));
  for (const auto& s : subsets) {
    set.subsets.push_back(s);
    set.subset_cdf.push_back(subset_min_cdf(messages.evidence(), s));
  }
  return set;
}

void write_posterior_dump(std::ostream& out, const PosteriorSet& set) {
  const auto old_precision = out.precision(17);
  out << "kind,id,k1,k2,value\n";
  for (std::size_t j = 0; j < set.node.size(); ++j) {
    for (std::size_t k = 0; k < set.node[j].size(); ++k) {
      out << "node," << j + 1 << ',' << k + 1 << ",," << set.node[j][k] << '\n';
    }
  }
  for (std::size_t e = 0; e < set.edge.size(); ++e) {
    const PairPosterior& p = set.edge[e];
    for (std::size_t k1 = 1; k1 <= p.dim; ++k1) {
      for (std::size_t k2 = 1; k2 <= p.dim; ++k2) {
        out << "edge," << e + 1 << ',' << k1 << ',' << k2 << ',' << p.at(k1, k2) << '\n';
      }
    }
  }
  for (std::size_t s = 0; s < set.subsets.size(); ++s) {
    out << "subset,";
    for (std::size_t i = 0; i < set.subsets[s].size(); ++i) {
      out << (i ? ";" : "") << set.subsets[s][i] + 1;
    }
    out << ",,," << set.subset_cdf[s] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace netcpd
