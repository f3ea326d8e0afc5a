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

#include "netcpd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "netcpd/error.hpp"
#include "netcpd/log_math.hpp"
#include "netcpd/theory.hpp"

namespace netcpd {

namespace {

/// Streaming log-sum-exp accumulator.
class LogAccumulator {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v <= hi_) {
      sum_ += std::exp(v - hi_);
    } else {
      sum_ = sum_ * std::exp(hi_ - v) + 1.0;
      hi_ = v;
    }
  }
  double value() const { return hi_ == kNegInf ? kNegInf : hi_ + std::log(sum_); }

 private:
  double hi_ = kNegInf;
  double sum_ = 0.0;
};

void check_budget(std::size_t d, std::size_t n, double budget) {
  const double cells = static_cast<double>(d) * std::pow(static_cast<double>(n + 1), d);
  if (cells > budget) {
    std::ostringstream os;
    os << "oracle refuses instance: d*(n+1)^d = " << cells << " cells exceeds budget " << budget;
    throw BudgetError(os.str(), cells);
  }
}

/// Odometer over [1, n+1]^d.
bool next_cell(std::vector<std::size_t>& k, std::size_t top) {
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (++k[j] <= top) return true;
    k[j] = 1;
  }
  return false;
}

/// log P(stream^n | change at k) as a literal product over t, k in 1..n+1.
std::vector<double> direct_profile(std::span<const double> stream, const TwoPhaseDensity& density,
                                   std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t k = 1; k <= n + 1; ++k) {
    double acc = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      acc += t < k ? density.log_pre(stream[t - 1]) : density.log_post(stream[t - 1]);
    }
    out[k - 1] = acc;
  }
  return out;
}

/// log R_k^n = sum_{t=k}^n h(X^t), k in 1..n+1 (0 at k = n+1).
std::vector<double> log_lr_suffix(std::span<const double> stream, const TwoPhaseDensity& density,
                                  std::size_t n) {
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t k = n; k >= 1; --k) out[k - 1] = out[k] + density.log_lr(stream[k - 1]);
  return out;
}

void check_panel(const NetworkModel& model, const ObservationPanel& panel, std::size_t n) {
  if (panel.node_count() != model.node_count() || panel.edge_count() != model.edge_count()) {
    throw SchemaError("observation panel does not match the model's nodes and edges");
  }
  if (panel.horizon() < n) throw DomainError("panel horizon shorter than n");
}

}  // namespace

JointPosteriorTable::JointPosteriorTable(std::size_t node_count, std::size_t horizon,
                                         std::vector<double> mass)
    : node_count_(node_count), horizon_(horizon), mass_(std::move(mass)) {}

double JointPosteriorTable::at(std::span<const std::size_t> changes) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (std::size_t j = 0; j < node_count_; ++j) {
    idx += (changes[j] - 1) * stride;
    stride *= horizon_ + 1;
  }
  return mass_[idx];
}

std::vector<double> JointPosteriorTable::node_marginal(NodeId j) const {
  std::vector<double> out(horizon_ + 1, 0.0);
  std::vector<std::size_t> k(node_count_, 1);
  std::size_t idx = 0;
  do {
    out[k[j] - 1] += mass_[idx++];
  } while (next_cell(k, horizon_ + 1));
  return out;
}

std::vector<double> JointPosteriorTable::pair_marginal(NodeId i, NodeId j) const {
  const std::size_t dim = horizon_ + 1;
  std::vector<double> out(dim * dim, 0.0);
  std::vector<std::size_t> k(node_count_, 1);
  std::size_t idx = 0;
  do {
    out[(k[i] - 1) * dim + (k[j] - 1)] += mass_[idx++];
  } while (next_cell(k, dim));
  return out;
}

double JointPosteriorTable::subset_min_cdf(std::span<const NodeId> subset) const {
  double acc = 0.0;
  std::vector<std::size_t> k(node_count_, 1);
  std::size_t idx = 0;
  do {
    const bool any_early =
        std::any_of(subset.begin(), subset.end(), [&](NodeId j) { return k[j] <= horizon_; });
    if (any_early) acc += mass_[idx];
    ++idx;
  } while (next_cell(k, horizon_ + 1));
  return acc;
}

JointPosteriorTable enumerate_joint_posterior(const NetworkModel& model,
                                              const ObservationPanel& panel, std::size_t n,
                                              double budget_cells) {
  const std::size_t d = model.node_count();
  check_budget(d, n, budget_cells);
  check_panel(model, panel, n);

  std::vector<std::vector<double>> node_term(d);
  for (NodeId j = 0; j < d; ++j) {
    node_term[j] = direct_profile(panel.node_stream(j), model.node_density(j), n);
    const GeometricPrior& prior = model.prior(j);
    for (std::size_t k = 1; k <= n; ++k) node_term[j][k - 1] += std::log(prior.pmf(k));
    // Mass of {n+1, n+2, ...}, summed term by term until it stops changing.
    double tail = 0.0;
    for (std::size_t k = n + 1;; ++k) {
      const double p = prior.pmf(k);
      if (tail + p == tail) break;
      tail += p;
    }
    node_term[j][n] += std::log(tail);
  }
  std::vector<std::vector<double>> edge_term(model.edge_count());
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    edge_term[e] = direct_profile(panel.edge_stream(e), model.edge_density(e), n);
  }

  const std::size_t cells = static_cast<std::size_t>(std::pow(n + 1, d) + 0.5);
  std::vector<double> logmass(cells);
  std::vector<std::size_t> k(d, 1);
  std::size_t idx = 0;
  do {
    double v = 0.0;
    for (NodeId j = 0; j < d; ++j) v += node_term[j][k[j] - 1];
    for (EdgeId e = 0; e < model.edge_count(); ++e) {
      const Edge& ed = model.graph().edge(e);
      v += edge_term[e][std::min(k[ed.lo], k[ed.hi]) - 1];
    }
    logmass[idx++] = v;
  } while (next_cell(k, n + 1));

  const double z = log_sum_exp(logmass);
  for (double& v : logmass) v = std::exp(v - z);
  return JointPosteriorTable(d, n, std::move(logmass));
}

double direct_log_likelihood(const NetworkModel& model, const ObservationPanel& panel,
                             std::size_t n, std::span<const std::size_t> lambda) {
  double acc = 0.0;
  for (NodeId j = 0; j < model.node_count(); ++j) {
    const auto s = panel.node_stream(j);
    const TwoPhaseDensity& dens = model.node_density(j);
    for (std::size_t t = 1; t <= n; ++t) {
      acc += t < lambda[j] ? dens.log_pre(s[t - 1]) : dens.log_post(s[t - 1]);
    }
  }
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.graph().edge(e);
    const std::size_t change = std::min(lambda[ed.lo], lambda[ed.hi]);
    const auto s = panel.edge_stream(e);
    const TwoPhaseDensity& dens = model.edge_density(e);
    for (std::size_t t = 1; t <= n; ++t) {
      acc += t < change ? dens.log_pre(s[t - 1]) : dens.log_post(s[t - 1]);
    }
  }
  return acc;
}

ConstancyReport lemma2_constancy_check(const NetworkModel& model, const ObservationPanel& panel,
                                       std::size_t n, std::span<const NodeId> probed,
                                       std::span<const std::pair<NodeId, std::size_t>> fixed,
                                       std::size_t probe_count, double relative_tolerance,
                                       double budget_cells) {
  check_panel(model, panel, n);
  const std::size_t d = model.node_count();
  std::vector<int> role(d, 0);  // 0 free, 1 probed, 2 fixed
  std::vector<std::size_t> lambda(d, 1);
  for (NodeId j : probed) role.at(j) = 1;
  for (const auto& [j, k] : fixed) {
    if (role.at(j) != 0) throw DomainError("node both probed and fixed");
    if (k < 1) throw DomainError("fixed change point must be >= 1");
    role[j] = 2;
    lambda[j] = k;
  }
  std::vector<NodeId> free_nodes;
  std::vector<std::size_t> truncation;
  double combos = 1.0;
  for (NodeId j = 0; j < d; ++j) {
    if (role[j] != 0) continue;
    free_nodes.push_back(j);
    const double rate = model.prior(j).log_survival_rate();
    const auto top = static_cast<std::size_t>(std::ceil(std::log(1e-15) / rate)) + n + 1;
    truncation.push_back(top);
    combos *= static_cast<double>(top);
  }
  combos *= std::pow(static_cast<double>(probe_count), static_cast<double>(probed.size()));
  if (combos > budget_cells) {
    throw BudgetError("constancy check too large for the oracle budget", combos);
  }

  ConstancyReport report;
  std::vector<std::size_t> probe(probed.size(), 0);
  while (true) {
    for (std::size_t p = 0; p < probed.size(); ++p) lambda[probed[p]] = n + 1 + probe[p];
    // Marginalize free nodes by explicit summation over 1..truncation.
    LogAccumulator acc;
    std::vector<std::size_t> kf(free_nodes.size(), 1);
    while (true) {
      double logw = 0.0;
      for (std::size_t f = 0; f < free_nodes.size(); ++f) {
        lambda[free_nodes[f]] = kf[f];
        logw += model.prior(free_nodes[f]).log_pmf(kf[f]);
      }
      acc.add(logw + direct_log_likelihood(model, panel, n, lambda));
      std::size_t f = 0;
      for (; f < kf.size(); ++f) {
        if (++kf[f] <= truncation[f]) break;
        kf[f] = 1;
      }
      if (f == kf.size()) break;
    }
    report.log_likelihoods.push_back(acc.value());
    std::size_t p = 0;
    for (; p < probe.size(); ++p) {
      if (++probe[p] < probe_count) break;
      probe[p] = 0;
    }
    if (p == probe.size()) break;
  }
  const double ref = report.log_likelihoods.front();
  for (double v : report.log_likelihoods) {
    report.max_relative_deviation =
        std::max(report.max_relative_deviation, std::abs(std::expm1(v - ref)));
  }
  report.constant = report.max_relative_deviation <= relative_tolerance;
  return report;
}

double log_mixture_ratio(const NetworkModel& model, const ObservationPanel& panel, std::size_t n,
                         std::span<const NodeId> subset, std::optional<std::size_t> k,
                         double budget_cells) {
  const std::size_t d = model.node_count();
  if (subset.empty()) throw DomainError("subset must be nonempty");
  if (k && *k == 0) throw DomainError("conditioning value k must be >= 1");
  check_budget(d, n, budget_cells);
  check_panel(model, panel, n);

  std::vector<bool> in(d, false);
  for (NodeId j : subset) in.at(j) = true;
  // phi = k beyond the horizon puts every node of S in the lumped state, as phi = infinity does.
  const bool beyond = !k || *k > n;

  // Per-node log conditional weight plus log R_{k_j}^n{j}.
  std::vector<std::vector<double>> node_term(d);
  for (NodeId j = 0; j < d; ++j) {
    node_term[j] = log_lr_suffix(panel.node_stream(j), model.node_density(j), n);
    const GeometricPrior& prior = model.prior(j);
    for (std::size_t kj = 1; kj <= n + 1; ++kj) {
      double w;
      if (in[j] && beyond) {
        w = kj == n + 1 ? 0.0 : kNegInf;
      } else if (in[j] && kj < *k) {
        w = kNegInf;
      } else {
        w = kj <= n ? prior.log_pmf(kj) : prior.log_tail(n);
      }
      node_term[j][kj - 1] += w;
    }
  }
  std::vector<std::vector<double>> edge_term(model.edge_count());
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    edge_term[e] = log_lr_suffix(panel.edge_stream(e), model.edge_density(e), n);
  }

  double log_norm = 0.0;
  if (!beyond) {
    // P(phi = k) = rbar_S^{k-1} (1 - rbar_S).
    double log_rbar = 0.0;
    for (NodeId j : subset) log_rbar += model.prior(j).log_survival_rate();
    log_norm = static_cast<double>(*k - 1) * log_rbar + std::log(-std::expm1(log_rbar));
    if (!std::isfinite(log_norm)) throw DomainError("P(phi = k) is zero under the prior");
  }

  LogAccumulator acc;
  std::vector<std::size_t> kv(d, 1);
  do {
    if (!beyond) {
      bool hit = false;
      for (NodeId j : subset) hit = hit || kv[j] == *k;
      if (!hit) continue;
    }
    double v = 0.0;
    for (NodeId j = 0; j < d; ++j) v += node_term[j][kv[j] - 1];
    if (v == kNegInf) continue;
    for (EdgeId e = 0; e < model.edge_count(); ++e) {
      const Edge& ed = model.graph().edge(e);
      v += edge_term[e][std::min(kv[ed.lo], kv[ed.hi]) - 1];
    }
    acc.add(v);
  } while (next_cell(kv, n + 1));
  return acc.value() - log_norm;
}

MarginalLikelihoodRatio marginal_lr(const NetworkModel& model, const ObservationPanel& panel,
                                    std::size_t n, std::span<const NodeId> subset,
                                    std::optional<std::size_t> k, double budget_cells) {
  MarginalLikelihoodRatio out;
  out.k = k;
  out.n = n;
  if (!k || *k > n) {
    out.log_value = 0.0;
    return out;
  }
  out.log_value = log_mixture_ratio(model, panel, n, subset, k, budget_cells) -
                  log_mixture_ratio(model, panel, n, subset, std::nullopt, budget_cells);
  return out;
}

std::vector<ConcentrationRow> concentration_diagnostic(const NetworkModel& model,
                                                       std::span<const NodeId> subset,
                                                       std::size_t k,
                                                       std::span<const std::size_t> n_grid,
                                                       std::size_t reps, Rng& rng,
                                                       double budget_cells) {
  if (n_grid.empty() || reps == 0) return {};
  const std::size_t horizon = *std::max_element(n_grid.begin(), n_grid.end());
  check_budget(model.node_count(), horizon, budget_cells);
  const double info = info_functional(model, subset);

  std::vector<std::vector<double>> samples(n_grid.size());
  for (std::size_t r = 0; r < reps; ++r) {
    ChangePointAssignment lambda;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > 10'000'000) throw DomainError("rejection sampler for phi = k did not accept");
      lambda = sample_change_points(model, rng);
      if (lambda.subset_min(subset) == k) break;
    }
    const ObservationPanel panel = sample_observations(model, lambda, horizon, rng);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      const std::size_t n = n_grid[g];
      const double d = marginal_lr(model, panel, n, subset, k, budget_cells).log_value;
      samples[g].push_back(d / static_cast<double>(n));
    }
  }
  std::vector<ConcentrationRow> rows;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    auto& s = samples[g];
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size();
    const double median = m % 2 ? s[m / 2] : 0.5 * (s[m / 2 - 1] + s[m / 2]);
    rows.push_back(ConcentrationRow{n_grid[g], median, info});
  }
  return rows;
}

}  // namespace netcpd
