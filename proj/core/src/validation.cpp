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

#include "netcpd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "netcpd/error.hpp"
#include "netcpd/inference.hpp"
#include "netcpd/theory.hpp"

namespace netcpd {
namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

DensityFamily random_density(Rng& rng, bool bernoulli) {
  if (bernoulli) {
    double p = uniform(rng, 0.15, 0.85);
    double q = uniform(rng, 0.15, 0.85);
    if (std::abs(p - q) < 0.05) q = p < 0.5 ? p + 0.2 : p - 0.2;
    return BernoulliFamily{p, q};
  }
  return GaussianFamily{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, 0.5, 2.0)};
}

double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), std::numeric_limits<double>::min());
  return std::abs(got - want) / scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ModelSpec star_spec() {
  ModelSpec spec;
  spec.node_count = 4;
  spec.edges = {{0, 1}, {1, 2}, {1, 3}};
  spec.rho.assign(4, 0.1);
  spec.node_densities.assign(4, GaussianFamily{1.0, 0.0, 1.0});
  spec.edge_densities.assign(3, GaussianFamily{1.0, 0.0, 1.0});
  return spec;
}

RandomInstance random_tree_instance(Rng& rng, const InstanceShape& shape) {
  const std::size_t d = pick(rng, shape.min_nodes, shape.max_nodes);
  const std::size_t n = pick(rng, shape.min_horizon, shape.max_horizon);
  const bool bernoulli = pick(rng, 0, 1) == 1;

  std::vector<NodeId> label(d);
  std::iota(label.begin(), label.end(), NodeId{0});
  std::shuffle(label.begin(), label.end(), rng);

  ModelSpec spec;
  spec.node_count = d;
  for (std::size_t v = 1; v < d; ++v) {
    const std::size_t parent = pick(rng, 0, v - 1);
    spec.edges.emplace_back(label[parent], label[v]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    spec.rho.push_back(uniform(rng, 0.05, 0.5));
    spec.node_densities.push_back(random_density(rng, bernoulli));
  }
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    spec.edge_densities.push_back(random_density(rng, bernoulli));
  }

  const NetworkModel model = build_model(spec);
  const ChangePointAssignment lambda = sample_change_points(model, rng);
  RandomInstance out{spec, sample_observations(model, lambda, n, rng), n};
  return out;
}

EquivalenceStats oracle_equivalence(std::size_t instances, std::uint64_t seed,
                                    double budget_cells) {
  EquivalenceStats stats;
  auto record = [&](double got, double want, const std::string& what) {
    ++stats.comparisons;
    const double err = relative_error(got, want);
    if (err > stats.max_relative_error || std::isnan(err)) {
      stats.max_relative_error = std::isnan(err) ? HUGE_VAL : err;
      stats.worst = what + ": bp=" + fmt(got) + " oracle=" + fmt(want);
    }
  };

  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = substream(seed, {i});
    const RandomInstance inst = random_tree_instance(rng);
    const NetworkModel model = build_model(inst.spec);
    const std::size_t n = inst.horizon;
    const std::size_t d = model.node_count();
    std::optional<JointPosteriorTable> joint;
    try {
      joint.emplace(enumerate_joint_posterior(model, inst.panel, n, budget_cells));
    } catch (const BudgetError&) {
      ++stats.skipped;
      continue;
    }
    ++stats.instances;
    const std::string tag = "instance " + std::to_string(i);

    auto evidence = std::make_shared<const LocalEvidence>(build_evidence(model, inst.panel, n));
    const MessageTable table = run_tree_bp(evidence);
    for (NodeId j = 0; j < d; ++j) {
      const std::vector<double> bp = node_posterior(table, j);
      const std::vector<double> ref = joint->node_marginal(j);
      for (std::size_t k = 0; k <= n; ++k) {
        record(bp[k], ref[k], tag + " node " + std::to_string(j + 1) + " k=" + std::to_string(k + 1));
      }
    }
    for (EdgeId e = 0; e < model.edge_count(); ++e) {
      const Edge& edge = model.graph().edge(e);
      const PairPosterior bp = pair_posterior(table, edge.lo, edge.hi);
      const std::vector<double> ref = joint->pair_marginal(edge.lo, edge.hi);
      for (std::size_t c = 0; c < ref.size(); ++c) {
        record(bp.zeta[c], ref[c], tag + " edge " + std::to_string(e) + " cell " + std::to_string(c));
      }
    }
    std::vector<std::vector<NodeId>> subsets;
    for (NodeId a = 0; a < d; ++a) {
      subsets.push_back({a});
      for (NodeId b = a + 1; b < d; ++b) subsets.push_back({a, b});
    }
    std::vector<NodeId> all(d);
    std::iota(all.begin(), all.end(), NodeId{0});
    subsets.push_back(all);
    for (const std::vector<NodeId>& s : subsets) {
      record(subset_min_cdf(*evidence, s), joint->subset_min_cdf(s),
             tag + " subset of size " + std::to_string(s.size()));
    }
  }
  return stats;
}

ConstancyStats constancy_sweep(std::size_t instances, std::uint64_t seed, double budget_cells) {
  ConstancyStats stats;
  const InstanceShape shape{2, 4, 1, 5};
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = substream(seed, {i, 7});
    const RandomInstance inst = random_tree_instance(rng, shape);
    const NetworkModel model = build_model(inst.spec);
    const std::size_t d = model.node_count();
    const std::size_t n = inst.horizon;
    std::vector<NodeId> order(d);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t r = pick(rng, 1, d);
    std::vector<NodeId> probed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r));
    std::vector<std::pair<NodeId, std::size_t>> fixed;
    for (std::size_t q = r; q < d; ++q) fixed.emplace_back(order[q], pick(rng, 1, n + 2));
    try {
      const ConstancyReport report =
          lemma2_constancy_check(model, inst.panel, n, probed, fixed, 4, 1e-10, budget_cells);
      stats.max_relative_deviation = std::max(stats.max_relative_deviation,
                                              report.max_relative_deviation);
      ++stats.instances;
    } catch (const BudgetError&) {
      ++stats.skipped;
    }
  }
  return stats;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  {
    const EquivalenceStats s = oracle_equivalence(options.instances, options.seed,
                                                  options.budget_cells);
    const bool ok = s.instances > 0 && s.max_relative_error <= 1e-9;
    add("oracle-equivalence", ok,
        std::to_string(s.instances) + " instances, " + std::to_string(s.skipped) +
            " over budget, max rel err " + fmt(s.max_relative_error) +
            (s.worst.empty() ? "" : " (" + s.worst + ")"));
  }
  {
    const ConstancyStats s = constancy_sweep(20, options.seed, options.budget_cells);
    add("tail-constancy", s.instances > 0 && s.max_relative_deviation <= 1e-10,
        std::to_string(s.instances) + " instances, max rel deviation " +
            fmt(s.max_relative_deviation));
  }
  {
    double worst = 0.0;
    bool converged = true;
    LoopyOptions tight;
    tight.tolerance = 1e-13;
    tight.max_iters = 1000;
    for (std::size_t i = 0; i < 20; ++i) {
      Rng rng = substream(options.seed, {i, 11});
      const RandomInstance inst = random_tree_instance(rng, {2, 6, 1, 8});
      const NetworkModel model = build_model(inst.spec);
      const MessageTable exact = run_tree_bp(model, inst.panel, inst.horizon);
      const MessageTable loopy = run_loopy_bp(model, inst.panel, inst.horizon, tight);
      converged = converged && loopy.converged();
      for (NodeId j = 0; j < model.node_count(); ++j) {
        const std::vector<double> a = node_posterior(exact, j);
        const std::vector<double> b = node_posterior(loopy, j);
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
      }
    }
    add("loopy-matches-tree", converged && worst <= 1e-9, "max abs diff " + fmt(worst));
  }
  {
    Rng rng = substream(options.seed, {13});
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
      const std::size_t len = pick(rng, 1, 40);
      std::vector<double> source(len), edge(len);
      for (double& v : source) v = uniform(rng, -30.0, 5.0);
      for (double& v : edge) v = uniform(rng, -30.0, 5.0);
      const LogVector a = detail::message_prefix(source, edge);
      const LogVector b = detail::message_naive(source, edge);
      for (std::size_t k = 0; k < len; ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(b[k])));
      }
    }
    add("linear-message", worst <= 1e-12, "max rel diff " + fmt(worst));
  }
  {
    const NetworkModel star = build_model(star_spec());
    const std::vector<NodeId> leaf{0};
    const std::vector<NodeId> pair{1, 0};
    const double s1 = asymptotic_slope(star, leaf);
    const double s2 = asymptotic_slope(star, pair);
    add("theory-constants", std::abs(s1 - 1.6519) <= 5e-5 && std::abs(s2 - 0.5845) <= 5e-5,
        "slope {leaf} " + fmt(s1) + ", slope {center, leaf} " + fmt(s2));
  }
  {
    double worst = 0.0;
    Rng rng = substream(options.seed, {17});
    for (std::size_t i = 0; i < 20; ++i) {
      const TwoPhaseDensity g = TwoPhaseDensity::gaussian(
          uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, 0.3, 3.0));
      worst = std::max(worst, std::abs(kl_divergence(g) - kl_divergence_quadrature(g)));
    }
    add("kl-quadrature", worst <= 1e-10, "max abs diff " + fmt(worst));
  }
  {
    Rng rng = substream(options.seed, {19});
    const RandomInstance inst = random_tree_instance(rng, {2, 3, 3, 4});
    const NetworkModel model = build_model(inst.spec);
    const std::vector<NodeId> all{0, 1};
    const MarginalLikelihoodRatio at_inf =
        marginal_lr(model, inst.panel, inst.horizon, all, std::nullopt, options.budget_cells);
    const MarginalLikelihoodRatio beyond =
        marginal_lr(model, inst.panel, inst.horizon, all, inst.horizon + 3, options.budget_cells);
    add("marginal-lr-baseline",
        at_inf.log_value == 0.0 && std::abs(beyond.log_value) <= 1e-10,
        "log D(inf) " + fmt(at_inf.log_value) + ", log D(n+3) " + fmt(beyond.log_value));
  }
  return report;
}

}  // namespace netcpd
