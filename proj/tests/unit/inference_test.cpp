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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <iostream>
#include <sstream>

#include "netcpd/error.hpp"
#include "netcpd/inference.hpp"
#include "netcpd/oracle.hpp"
#include "test_support.hpp"

namespace netcpd {
namespace {

using testing::kFlatGaussian;
using testing::kStarGaussian;
using testing::rel_err;
using testing::uniform_spec;

ObservationPanel simulate(const NetworkModel& model, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const ChangePointAssignment a = sample_change_points(model, rng);
  return sample_observations(model, a, n, rng);
}

TEST(TailAugmentedPrior, Examples) {
  const std::vector<double> p = tail_augmented_prior(GeometricPrior(0.1), 2);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 0.1, 1e-15);
  EXPECT_NEAR(p[1], 0.09, 1e-15);
  EXPECT_NEAR(p[2], 0.81, 1e-15);
  EXPECT_EQ(tail_augmented_prior(GeometricPrior(0.3), 0), std::vector<double>{1.0});
  const std::vector<double> q = tail_augmented_prior(GeometricPrior(0.5), 3);
  const double want[] = {0.5, 0.25, 0.125, 0.125};
  ASSERT_EQ(q.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(q[k], want[k], 1e-15);
}

TEST(LikelihoodProfile, Examples) {
  const TwoPhaseDensity b = TwoPhaseDensity::bernoulli(0.2, 0.8);
  EXPECT_EQ(likelihood_profile({}, b, 0), LogVector{0.0});
  const double stream[] = {1.0, 1.0};
  const LogVector p = likelihood_profile(stream, b, 2);
  EXPECT_NEAR(p[0], 2 * std::log(0.8), 1e-14);
  EXPECT_NEAR(p[1], std::log(0.2) + std::log(0.8), 1e-14);
  EXPECT_NEAR(p[2], 2 * std::log(0.2), 1e-14);

  const TwoPhaseDensity flat(kFlatGaussian);
  const double xs[] = {0.1, -2.0, 3.3, 0.0};
  const LogVector f = likelihood_profile(xs, flat, 4);
  for (double v : f) EXPECT_NEAR(v, f[0], 1e-12);
}

TEST(LikelihoodProfile, MatchesDirectProducts) {
  const TwoPhaseDensity g = TwoPhaseDensity::gaussian(0.3, -0.8, 1.7);
  const double xs[] = {0.4, -1.1, 2.0, 0.3, -0.5};
  const LogVector p = likelihood_profile(xs, g, 5);
  for (std::size_t k = 1; k <= 6; ++k) {
    double direct = 0.0;
    for (std::size_t t = 1; t <= 5; ++t) direct += t < k ? g.log_pre(xs[t - 1]) : g.log_post(xs[t - 1]);
    EXPECT_NEAR(p[k - 1], direct, 1e-12) << k;
  }
}

TEST(TreeBp, SingleNodeIsTheClassicalPosterior) {
  const NetworkModel model = build_model(uniform_spec(1, {}, 0.2, kStarGaussian));
  const ObservationPanel panel = simulate(model, 6, 11);
  const MessageTable table = run_tree_bp(model, panel, 6);
  const std::vector<double> post = node_posterior(table, 0);

  // Direct one-dimensional Bayes: prior(k) * prod g(t<k) f(t>=k), normalized.
  const TwoPhaseDensity& d = model.node_density(0);
  const auto xs = panel.node_stream(0);
  std::vector<double> w(7);
  for (std::size_t k = 1; k <= 7; ++k) {
    double lp = k <= 6 ? std::log(0.2) + (k - 1) * std::log(0.8) : 6 * std::log(0.8);
    for (std::size_t t = 1; t <= 6; ++t) lp += t < k ? d.log_pre(xs[t - 1]) : d.log_post(xs[t - 1]);
    w[k - 1] = std::exp(lp);
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_NEAR(post[k], w[k] / z, 1e-13);
}

TEST(TreeBp, TwoNodeChainHorizonOneByHand) {
  const ModelSpec spec = uniform_spec(2, {{0, 1}}, 0.3, BernoulliFamily{0.25, 0.6});
  const NetworkModel model = build_model(spec);
  const ObservationPanel panel({{1.0}, {0.0}}, {{1.0}});
  const MessageTable table = run_tree_bp(model, panel, 1);

  // k in {1 (changed), 2 (lumped)}; f = Bern(0.6), g = Bern(0.25).
  auto node_lik = [](std::size_t k, double x) {
    const double p = k == 1 ? 0.6 : 0.25;
    return x == 1.0 ? p : 1.0 - p;
  };
  const double prior[] = {0.3, 0.7};
  double joint[2][2];
  double z = 0.0;
  for (std::size_t a = 1; a <= 2; ++a) {
    for (std::size_t b = 1; b <= 2; ++b) {
      joint[a - 1][b - 1] = prior[a - 1] * prior[b - 1] * node_lik(a, 1.0) * node_lik(b, 0.0) *
                            node_lik(std::min(a, b), 1.0);
      z += joint[a - 1][b - 1];
    }
  }
  const PairPosterior pair = pair_posterior(table, 0, 1);
  for (std::size_t a = 1; a <= 2; ++a) {
    for (std::size_t b = 1; b <= 2; ++b) EXPECT_NEAR(pair.at(a, b), joint[a - 1][b - 1] / z, 1e-14);
  }
  EXPECT_NEAR(pair.gamma_min, 1.0 - joint[1][1] / z, 1e-14);
  EXPECT_NEAR(node_posterior(table, 0)[0], (joint[0][0] + joint[0][1]) / z, 1e-14);
}

TEST(TreeBp, FlatLikelihoodGivesPriors) {
  const NetworkModel model = build_model(
      uniform_spec(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}, 0.15, kFlatGaussian));
  const ObservationPanel panel = simulate(model, 7, 12);
  const MessageTable table = run_tree_bp(model, panel, 7);
  const std::vector<double> prior = tail_augmented_prior(GeometricPrior(0.15), 7);
  for (NodeId j = 0; j < 5; ++j) {
    const std::vector<double> post = node_posterior(table, j);
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(post[k], prior[k], 1e-13);
  }
  const PairPosterior pair = pair_posterior(table, 1, 3);
  for (std::size_t a = 1; a <= 8; ++a) {
    for (std::size_t b = 1; b <= 8; ++b) {
      EXPECT_NEAR(pair.at(a, b), prior[a - 1] * prior[b - 1], 1e-13);
    }
  }
}

TEST(TreeBp, HorizonZero) {
  const NetworkModel model = testing::star_model();
  const ObservationPanel panel(4, 3);
  const MessageTable table = run_tree_bp(model, panel, 0);
  for (NodeId j = 0; j < 4; ++j) {
    const std::vector<double> post = node_posterior(table, j);
    ASSERT_EQ(post.size(), 1u);
    EXPECT_NEAR(post[0], 1.0, 1e-15);
    EXPECT_EQ(cdf_at_horizon(post), 0.0);
  }
  const NodeId all[] = {0, 1, 2, 3};
  EXPECT_EQ(subset_min_cdf(model, panel, 0, all), 0.0);
}

TEST(TreeBp, RejectsCycles) {
  const NetworkModel model =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}, {0, 2}}, 0.2, kStarGaussian));
  const ObservationPanel panel = simulate(model, 3, 13);
  EXPECT_THROW(run_tree_bp(model, panel, 3), UnsupportedError);
}

TEST(TreeBp, StarMatchesOracle) {
  const NetworkModel model = testing::star_model();
  const ObservationPanel panel = simulate(model, 5, 14);
  const MessageTable table = run_tree_bp(model, panel, 5);
  const JointPosteriorTable joint = enumerate_joint_posterior(model, panel, 5);
  for (EdgeId e = 0; e < 3; ++e) {
    const Edge& edge = model.graph().edge(e);
    const PairPosterior bp = pair_posterior(table, edge.lo, edge.hi);
    const std::vector<double> ref = joint.pair_marginal(edge.lo, edge.hi);
    for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_LE(rel_err(bp.zeta[c], ref[c]), 1e-9);
  }
  const NodeId all[] = {0, 1, 2, 3};
  EXPECT_LE(rel_err(subset_min_cdf(model, panel, 5, all), joint.subset_min_cdf(all)), 1e-9);
}

TEST(TreeBp, RandomFiveNodeTreeMatchesOracle) {
  Rng rng(15);
  const RandomInstance inst = random_tree_instance(rng, {5, 5, 6, 6});
  const NetworkModel model = build_model(inst.spec);
  const MessageTable table = run_tree_bp(model, inst.panel, 6);
  const JointPosteriorTable joint = enumerate_joint_posterior(model, inst.panel, 6);
  for (NodeId j = 0; j < 5; ++j) {
    const std::vector<double> bp = node_posterior(table, j);
    const std::vector<double> ref = joint.node_marginal(j);
    for (std::size_t k = 0; k < bp.size(); ++k) EXPECT_LE(rel_err(bp[k], ref[k]), 1e-9);
  }
}

TEST(TreeBp, OracleEquivalenceOnRandomTrees) {
  const EquivalenceStats stats = oracle_equivalence(100, 99);
  EXPECT_EQ(stats.instances, 100u);
  EXPECT_LE(stats.max_relative_error, 1e-9) << stats.worst;
}

TEST(TreeBp, PairRowsSumToNodePosterior) {
  Rng rng(16);
  for (int rep = 0; rep < 10; ++rep) {
    const RandomInstance inst = random_tree_instance(rng, {2, 6, 1, 9});
    const NetworkModel model = build_model(inst.spec);
    const MessageTable table = run_tree_bp(model, inst.panel, inst.horizon);
    for (const Edge& e : model.graph().edges()) {
      const PairPosterior pair = pair_posterior(table, e.lo, e.hi);
      const std::vector<double> gi = node_posterior(table, e.lo);
      const std::vector<double> gj = node_posterior(table, e.hi);
      for (std::size_t a = 1; a <= pair.dim; ++a) {
        double row = 0.0;
        double col = 0.0;
        for (std::size_t b = 1; b <= pair.dim; ++b) {
          row += pair.at(a, b);
          col += pair.at(b, a);
        }
        EXPECT_NEAR(row, gi[a - 1], 1e-9);
        EXPECT_NEAR(col, gj[a - 1], 1e-9);
      }
    }
  }
}

TEST(TreeBp, MessageScalingInvariance) {
  Rng rng(17);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int rep = 0; rep < 10; ++rep) {
    const RandomInstance inst = random_tree_instance(rng, {2, 6, 1, 8});
    const NetworkModel model = build_model(inst.spec);
    const MessageTable table = run_tree_bp(model, inst.panel, inst.horizon);
    MessageTable scaled = table;
    for (const Edge& e : model.graph().edges()) {
      for (auto [from, to] : {std::pair{e.lo, e.hi}, std::pair{e.hi, e.lo}}) {
        const double c = shift(rng);
        for (double& v : scaled.mutable_message(from, to)) v += c;
      }
    }
    for (NodeId j = 0; j < model.node_count(); ++j) {
      const std::vector<double> a = node_posterior(table, j);
      const std::vector<double> b = node_posterior(scaled, j);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
    for (const Edge& e : model.graph().edges()) {
      const PairPosterior a = pair_posterior(table, e.lo, e.hi);
      const PairPosterior b = pair_posterior(scaled, e.lo, e.hi);
      for (std::size_t c = 0; c < a.zeta.size(); ++c) EXPECT_NEAR(a.zeta[c], b.zeta[c], 1e-12);
    }
  }
}

TEST(TreeBp, RootInvariance) {
  Rng rng(18);
  const RandomInstance inst = random_tree_instance(rng, {5, 5, 5, 5});
  const NetworkModel model = build_model(inst.spec);
  const MessageTable base = run_tree_bp(model, inst.panel, 5);
  for (NodeId root = 1; root < 5; ++root) {
    const MessageTable other = run_tree_bp(model, inst.panel, 5, root);
    for (NodeId j = 0; j < 5; ++j) {
      const std::vector<double> a = node_posterior(base, j);
      const std::vector<double> b = node_posterior(other, j);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    }
  }
}

TEST(TreeBp, DisconnectedNodeIsIrrelevant) {
  Rng rng(19);
  const RandomInstance inst = random_tree_instance(rng, {4, 4, 6, 6});
  const NetworkModel model = build_model(inst.spec);

  ModelSpec bigger = inst.spec;
  bigger.node_count = 5;
  bigger.rho.push_back(0.37);
  bigger.node_densities.push_back(GaussianFamily{2.0, -3.0, 0.4});
  const NetworkModel extended = build_model(bigger);
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> edges;
  for (NodeId j = 0; j < 4; ++j) {
    const auto s = inst.panel.node_stream(j);
    nodes.emplace_back(s.begin(), s.end());
  }
  nodes.push_back({5.0, -4.0, 0.1, 9.0, -2.0, 1.5});
  for (EdgeId e = 0; e < 3; ++e) {
    const auto s = inst.panel.edge_stream(e);
    edges.emplace_back(s.begin(), s.end());
  }
  const ObservationPanel panel(nodes, edges);

  const MessageTable a = run_tree_bp(model, inst.panel, 6);
  const MessageTable b = run_tree_bp(extended, panel, 6);
  for (NodeId j = 0; j < 4; ++j) {
    const std::vector<double> pa = node_posterior(a, j);
    const std::vector<double> pb = node_posterior(b, j);
    for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_NEAR(pa[k], pb[k], 1e-10);
  }
  const NodeId s[] = {0, 2};
  EXPECT_NEAR(subset_min_cdf(model, inst.panel, 6, s), subset_min_cdf(extended, panel, 6, s), 1e-10);
}

TEST(TreeBp, NodeRelabelingPermutesPosteriors) {
  Rng rng(20);
  const RandomInstance inst = random_tree_instance(rng, {5, 5, 5, 5});
  const NetworkModel model = build_model(inst.spec);
  const std::vector<NodeId> perm{3, 0, 4, 1, 2};  // old id -> new id

  ModelSpec relabeled = inst.spec;
  std::vector<std::vector<double>> nodes(5);
  std::vector<std::vector<double>> edges;
  for (NodeId j = 0; j < 5; ++j) {
    relabeled.rho[perm[j]] = inst.spec.rho[j];
    relabeled.node_densities[perm[j]] = inst.spec.node_densities[j];
    const auto s = inst.panel.node_stream(j);
    nodes[perm[j]].assign(s.begin(), s.end());
  }
  for (std::size_t e = 0; e < inst.spec.edges.size(); ++e) {
    relabeled.edges[e] = {perm[inst.spec.edges[e].first], perm[inst.spec.edges[e].second]};
    const auto s = inst.panel.edge_stream(e);
    edges.emplace_back(s.begin(), s.end());
  }
  const NetworkModel other = build_model(relabeled);
  const ObservationPanel panel(nodes, edges);

  const MessageTable a = run_tree_bp(model, inst.panel, 5);
  const MessageTable b = run_tree_bp(other, panel, 5);
  for (NodeId j = 0; j < 5; ++j) {
    const std::vector<double> pa = node_posterior(a, j);
    const std::vector<double> pb = node_posterior(b, perm[j]);
    for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_NEAR(pa[k], pb[k], 1e-12);
  }
}

TEST(SubsetMinCdf, AgreesWithNodeAndPairPaths) {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const RandomInstance inst = random_tree_instance(rng, {2, 6, 1, 10});
    const NetworkModel model = build_model(inst.spec);
    const std::size_t n = inst.horizon;
    const MessageTable table = run_tree_bp(model, inst.panel, n);
    for (NodeId j = 0; j < model.node_count(); ++j) {
      const NodeId s[] = {j};
      EXPECT_NEAR(subset_min_cdf(model, inst.panel, n, s), 1.0 - node_posterior(table, j)[n], 1e-10);
    }
    for (const Edge& e : model.graph().edges()) {
      const NodeId s[] = {e.lo, e.hi};
      EXPECT_NEAR(subset_min_cdf(model, inst.panel, n, s), pair_posterior(table, e.lo, e.hi).gamma_min,
                  1e-9);
    }
  }
}

TEST(SubsetMinCdf, MonotoneInTheSubset) {
  Rng rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const RandomInstance inst = random_tree_instance(rng, {3, 6, 1, 8});
    const NetworkModel model = build_model(inst.spec);
    const LocalEvidence ev = build_evidence(model, inst.panel, inst.horizon);
    std::vector<NodeId> growing;
    double last = 0.0;
    for (NodeId j = 0; j < model.node_count(); ++j) {
      growing.push_back(j);
      const double g = subset_min_cdf(ev, growing);
      EXPECT_GE(g, last - 1e-9);
      last = g;
    }
  }
}

TEST(SubsetMinCdf, ForestComponentsAreIndependent) {
  const NetworkModel model = build_model(uniform_spec(4, {{0, 1}, {2, 3}}, 0.2, kStarGaussian));
  const ObservationPanel panel = simulate(model, 5, 23);
  const JointPosteriorTable joint = enumerate_joint_posterior(model, panel, 5);
  const NodeId s[] = {1, 2};
  EXPECT_LE(rel_err(subset_min_cdf(model, panel, 5, s), joint.subset_min_cdf(s)), 1e-9);
}

TEST(LoopyBp, MatchesTreeBpOnTrees) {
  Rng rng(24);
  LoopyOptions tight;
  tight.tolerance = 1e-13;
  tight.max_iters = 1000;
  for (int rep = 0; rep < 5; ++rep) {
    const RandomInstance inst = random_tree_instance(rng, {2, 6, 1, 8});
    const NetworkModel model = build_model(inst.spec);
    const MessageTable exact = run_tree_bp(model, inst.panel, inst.horizon);
    const MessageTable loopy = run_loopy_bp(model, inst.panel, inst.horizon, tight);
    EXPECT_TRUE(loopy.converged());
    EXPECT_TRUE(loopy.approximate());
    EXPECT_FALSE(exact.approximate());
    for (NodeId j = 0; j < model.node_count(); ++j) {
      const std::vector<double> a = node_posterior(exact, j);
      const std::vector<double> b = node_posterior(loopy, j);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
    }
  }
}

TEST(LoopyBp, TriangleWithFlatLikelihoodGivesPriors) {
  const NetworkModel model =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}, {0, 2}}, 0.25, kFlatGaussian));
  const ObservationPanel panel = simulate(model, 4, 25);
  const MessageTable table = run_loopy_bp(model, panel, 4);
  EXPECT_TRUE(table.converged());
  const std::vector<double> prior = tail_augmented_prior(GeometricPrior(0.25), 4);
  for (NodeId j = 0; j < 3; ++j) {
    const std::vector<double> post = node_posterior(table, j);
    for (std::size_t k = 0; k < post.size(); ++k) EXPECT_NEAR(post[k], prior[k], 1e-10);
  }
}

TEST(LoopyBp, TriangleGapAgainstOracleIsReported) {
  const NetworkModel model =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}, {0, 2}}, 0.2, kStarGaussian));
  const ObservationPanel panel = simulate(model, 4, 26);
  const MessageTable table = run_loopy_bp(model, panel, 4);
  const JointPosteriorTable joint = enumerate_joint_posterior(model, panel, 4);
  double gap = 0.0;
  for (NodeId j = 0; j < 3; ++j) {
    const std::vector<double> a = node_posterior(table, j);
    const std::vector<double> b = joint.node_marginal(j);
    for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]));
  }
  RecordProperty("loopy_gap", std::to_string(gap));
  std::cout << "triangle loopy BP max abs gap vs enumeration: " << gap << '\n';
  EXPECT_TRUE(std::isfinite(gap));
}

TEST(Messages, PrefixFormMatchesDoubleLoop) {
  Rng rng(27);
  std::uniform_real_distribution<double> u(-40.0, 10.0);
  for (std::size_t len : {1u, 2u, 3u, 17u, 200u}) {
    LogVector source(len);
    LogVector edge(len);
    for (double& v : source) v = u(rng);
    for (double& v : edge) v = u(rng);
    const LogVector a = detail::message_prefix(source, edge);
    const LogVector b = detail::message_naive(source, edge);
    for (std::size_t k = 0; k < len; ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * std::max(1.0, std::abs(b[k])));
  }
}

TEST(PosteriorSet, DumpHasOneRowPerEntry) {
  const NetworkModel model = testing::star_model();
  const ObservationPanel panel = simulate(model, 2, 28);
  const MessageTable table = run_tree_bp(model, panel, 2);
  const std::vector<std::vector<NodeId>> subsets{{0, 1}};
  const PosteriorSet set = compute_posterior_set(table, subsets);
  std::ostringstream os;
  write_posterior_dump(os, set);
  std::size_t lines = 0;
  std::string line;
  std::istringstream in(os.str());
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1u + 4 * 3 + 3 * 9 + 1);
  EXPECT_NEAR(set.subset_cdf[0], pair_posterior(table, 0, 1).gamma_min, 1e-12);
}

TEST(PairPosterior, NonAdjacentIsUnsupported) {
  const NetworkModel model = testing::star_model();
  const ObservationPanel panel = simulate(model, 2, 29);
  const MessageTable table = run_tree_bp(model, panel, 2);
  EXPECT_THROW(pair_posterior(table, 0, 2), UnsupportedError);
}

}  // namespace
}  // namespace netcpd
