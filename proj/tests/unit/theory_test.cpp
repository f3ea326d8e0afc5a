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

#include <cmath>

#include "netcpd/error.hpp"
#include "netcpd/theory.hpp"
#include "test_support.hpp"

namespace netcpd {
namespace {

using testing::kStarGaussian;
using testing::uniform_spec;

TEST(KlDivergence, ClosedForms) {
  EXPECT_NEAR(kl_divergence(TwoPhaseDensity::gaussian(1, 0, 1)), 0.5, 1e-15);
  EXPECT_EQ(kl_divergence(TwoPhaseDensity::gaussian(0.7, 0.7, 2.0)), 0.0);
  EXPECT_EQ(kl_divergence(TwoPhaseDensity::bernoulli(0.4, 0.4)), 0.0);
  EXPECT_NEAR(kl_divergence(TwoPhaseDensity::bernoulli(0.2, 0.8)), 0.6 * std::log(4.0), 1e-14);
  EXPECT_NEAR(kl_divergence(TwoPhaseDensity::bernoulli(0.2, 0.8)), 0.831777, 5e-7);
}

TEST(KlDivergence, AgreesWithQuadratureSweep) {
  for (double mp : {-2.0, -0.5, 0.0, 1.0}) {
    for (double mq : {-1.0, 0.3, 2.5}) {
      for (double var : {0.25, 1.0, 4.0}) {
        const TwoPhaseDensity g = TwoPhaseDensity::gaussian(mp, mq, var);
        EXPECT_NEAR(kl_divergence(g), kl_divergence_quadrature(g), 1e-8);
      }
    }
  }
  for (double p : {0.05, 0.3, 0.5}) {
    for (double q : {0.1, 0.6, 0.95}) {
      const TwoPhaseDensity b = TwoPhaseDensity::bernoulli(p, q);
      EXPECT_NEAR(kl_divergence(b), kl_divergence_quadrature(b), 1e-12);
    }
  }
}

TEST(GaussHermite, IntegratesPolynomialsExactly) {
  std::vector<double> x;
  std::vector<double> w;
  gauss_hermite(10, x, w);
  // Integral of exp(-x^2) x^(2m) is Gamma(m + 1/2).
  for (int m = 0; m < 10; ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], 2 * m);
    EXPECT_NEAR(sum / std::tgamma(m + 0.5), 1.0, 1e-12) << m;
  }
}

TEST(InfoFunctional, EdgeTermsOnlyInsideTheSubset) {
  const NetworkModel chain =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}}, 0.1, kStarGaussian));
  const NodeId ends[] = {0, 2};
  EXPECT_NEAR(info_functional(chain, ends), 1.0, 1e-15);
  const NodeId adjacent[] = {0, 1};
  EXPECT_NEAR(info_functional(chain, adjacent), 1.5, 1e-15);

  const NetworkModel star = testing::star_model();
  const NodeId all[] = {0, 1, 2, 3};
  EXPECT_NEAR(info_functional(star, all), 3.5, 1e-15);
  const NodeId leaves[] = {0, 2};
  EXPECT_NEAR(info_functional(star, leaves), 1.0, 1e-15);
}

TEST(InfoFunctional, MonotoneInTheSubset) {
  const NetworkModel star = testing::star_model();
  const std::vector<std::vector<NodeId>> chain{{2}, {2, 1}, {2, 1, 0}, {2, 1, 0, 3}};
  double last = 0.0;
  for (const auto& s : chain) {
    const double v = info_functional(star, s);
    EXPECT_GE(v, last);
    last = v;
  }
}

TEST(InfoFunctional, SingleNodeIgnoresIncidentEdges) {
  const NetworkModel star = testing::star_model();
  const NetworkModel bare = build_model(uniform_spec(4, {}, 0.1, kStarGaussian));
  for (NodeId j = 0; j < 4; ++j) {
    const NodeId s[] = {j};
    EXPECT_EQ(info_functional(star, s), info_functional(bare, s));
  }
}

TEST(PriorExponent, Examples) {
  const NetworkModel star = testing::star_model();
  const NodeId one[] = {0};
  const NodeId two[] = {0, 1};
  EXPECT_NEAR(prior_exponent(star, one), 0.105361, 5e-7);
  EXPECT_NEAR(prior_exponent(star, two), 0.210721, 5e-7);
  const NetworkModel tiny = build_model(uniform_spec(1, {}, 1e-12, kStarGaussian));
  EXPECT_NEAR(prior_exponent(tiny, one), 0.0, 1e-11);
}

TEST(AsymptoticSlope, StarConstants) {
  const NetworkModel star = testing::star_model();
  const NodeId leaf[] = {0};
  const NodeId pair[] = {1, 0};
  EXPECT_NEAR(asymptotic_slope(star, leaf), 1.6519, 5e-5);
  EXPECT_NEAR(asymptotic_slope(star, pair), 0.5845, 5e-5);
  const NodeId all[] = {0, 1, 2, 3};
  EXPECT_NEAR(asymptotic_slope(star, all), 1.0 / (-4 * std::log(0.9) + 3.5), 1e-14);
}

TEST(AsymptoticSlope, EdgeInsideSubsetShortensDelay) {
  const NetworkModel with_edge = build_model(uniform_spec(2, {{0, 1}}, 0.1, kStarGaussian));
  const NetworkModel without = build_model(uniform_spec(2, {}, 0.1, kStarGaussian));
  const NodeId s[] = {0, 1};
  EXPECT_LT(asymptotic_slope(with_edge, s), asymptotic_slope(without, s));
}

TEST(SummarizeInformation, CollectsPerSubsetNumbers) {
  const NetworkModel star = testing::star_model();
  const std::vector<std::vector<NodeId>> subsets{{0}, {0, 1}};
  const InformationSummary s = summarize_information(star, subsets);
  ASSERT_EQ(s.node_info.size(), 4u);
  ASSERT_EQ(s.edge_info.size(), 3u);
  ASSERT_EQ(s.subsets.size(), 2u);
  EXPECT_NEAR(s.subsets[1].info, 1.5, 1e-15);
  EXPECT_NEAR(s.subsets[1].slope, 0.5845, 5e-5);
}

}  // namespace
}  // namespace netcpd
