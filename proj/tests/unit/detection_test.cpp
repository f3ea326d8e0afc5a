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

#include "netcpd/detection.hpp"
#include "netcpd/error.hpp"
#include "netcpd/oracle.hpp"
#include "test_support.hpp"

namespace netcpd {
namespace {

using testing::kFlatGaussian;
using testing::kStarGaussian;
using testing::uniform_spec;

StoppingRuleSpec spec_for(std::vector<NodeId> s, double alpha, RuleKind rule,
                          std::size_t cap = 2000) {
  StoppingRuleSpec spec;
  spec.subset = std::move(s);
  spec.alpha = alpha;
  spec.rule = rule;
  spec.max_horizon = cap;
  return spec;
}

TEST(StoppingOutcome, Classification) {
  const StoppingOutcome early = make_outcome(3, 5, 0.99);
  EXPECT_TRUE(early.false_alarm);
  EXPECT_EQ(early.delay, 0u);
  const StoppingOutcome on_time = make_outcome(5, 5, 0.99);
  EXPECT_FALSE(on_time.false_alarm);
  EXPECT_EQ(on_time.delay, 0u);
  const StoppingOutcome late = make_outcome(9, 5, 0.99);
  EXPECT_EQ(late.delay, 4u);
  const StoppingOutcome cut = make_outcome(std::nullopt, 5, 0.2);
  EXPECT_TRUE(cut.censored);
  EXPECT_FALSE(cut.false_alarm);
}

TEST(ValidateRule, Rejections) {
  const NetworkModel star = testing::star_model();
  EXPECT_THROW(validate_rule(star, spec_for({}, 0.1, RuleKind::kMessagePassing)), ValidationError);
  EXPECT_THROW(validate_rule(star, spec_for({0}, 1.0, RuleKind::kMessagePassing)), ValidationError);
  EXPECT_THROW(validate_rule(star, spec_for({0, 0}, 0.1, RuleKind::kMessagePassing)), ValidationError);
  EXPECT_THROW(validate_rule(star, spec_for({9}, 0.1, RuleKind::kMessagePassing)), ValidationError);
  EXPECT_THROW(validate_rule(star, spec_for({0, 1, 2}, 0.1, RuleKind::kSingle)), UnsupportedError);
  EXPECT_NO_THROW(validate_rule(star, spec_for({0, 1, 2}, 0.1, RuleKind::kMessagePassing)));

  const NetworkModel triangle =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}, {0, 2}}, 0.2, kStarGaussian));
  EXPECT_THROW(validate_rule(triangle, spec_for({0}, 0.1, RuleKind::kMessagePassing)),
               UnsupportedError);
  StoppingRuleSpec loopy = spec_for({0, 1}, 0.1, RuleKind::kMessagePassing);
  loopy.allow_loopy = true;
  EXPECT_NO_THROW(validate_rule(triangle, loopy));
  loopy.subset = {0, 1, 2};
  EXPECT_THROW(validate_rule(triangle, loopy), UnsupportedError);
}

TEST(MpRule, ThresholdNearZeroStopsImmediately) {
  const NetworkModel star = testing::star_model();
  Rng rng(51);
  const ChangePointAssignment lambda({1, 1, 4, 2});
  const StoppingOutcome out =
      run_mp_rule(star, lambda, spec_for({0}, 1.0 - 1e-12, RuleKind::kMessagePassing), rng);
  ASSERT_TRUE(out.stop_time.has_value());
  EXPECT_EQ(*out.stop_time, 1u);
  EXPECT_EQ(out.delay, 0u);
  EXPECT_FALSE(out.false_alarm);
}

TEST(MpRule, FlatLikelihoodStopsAtPriorQuantile) {
  const double rho = 0.1;
  const NetworkModel model = build_model(uniform_spec(3, {{0, 1}, {1, 2}}, rho, kFlatGaussian));
  const double alpha = 0.05;
  const std::vector<NodeId> s{0, 2};
  // P(phi <= n) = 1 - (1 - rho)^(2n): smallest n reaching 1 - alpha.
  const auto expected = static_cast<std::size_t>(
      std::ceil(std::log(alpha) / (2.0 * std::log(1.0 - rho)) - 1e-12));
  Rng rng(52);
  const ChangePointAssignment lambda({40, 3, 50});
  const StoppingOutcome out = run_mp_rule(model, lambda, spec_for(s, alpha, RuleKind::kMessagePassing), rng);
  ASSERT_TRUE(out.stop_time.has_value());
  EXPECT_EQ(*out.stop_time, expected);
  EXPECT_TRUE(out.false_alarm);
}

TEST(MpRule, MatchesOracleReplay) {
  const NetworkModel star = testing::star_model();
  const double alpha = 0.01;
  const std::vector<NodeId> s{1};
  const ChangePointAssignment lambda({7, 5, 9, 12});
  Rng a(54);
  const StoppingOutcome out = run_mp_rule(star, lambda, spec_for(s, alpha, RuleKind::kMessagePassing), a);
  ASSERT_TRUE(out.stop_time.has_value());

  Rng b(54);
  ObservationGenerator gen(star, lambda, b);
  ObservationPanel panel(4, 3);
  std::size_t oracle_stop = 0;
  for (std::size_t n = 1; n <= 40 && oracle_stop == 0; ++n) {
    panel.append(gen.next());
    const JointPosteriorTable joint = enumerate_joint_posterior(star, panel, n, 1e8);
    if (joint.subset_min_cdf(s) >= 1.0 - alpha) oracle_stop = n;
  }
  EXPECT_EQ(*out.stop_time, oracle_stop);
}

TEST(SingleRule, SingleNodeModelCoincidesWithMp) {
  const NetworkModel model = build_model(uniform_spec(1, {}, 0.1, kStarGaussian));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng lr(seed);
    const ChangePointAssignment lambda = sample_change_points(model, lr);
    Rng a(seed + 100);
    Rng b(seed + 100);
    const StoppingOutcome mp = run_mp_rule(model, lambda, spec_for({0}, 0.01, RuleKind::kMessagePassing), a);
    const StoppingOutcome single = run_single_rule(model, lambda, spec_for({0}, 0.01, RuleKind::kSingle), b);
    EXPECT_EQ(mp.stop_time, single.stop_time);
  }
}

TEST(SingleRule, PairStopsAtTheEarlierSingleStop) {
  const NetworkModel star = testing::star_model();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng lr(seed);
    const ChangePointAssignment lambda = sample_change_points(star, lr);
    auto run = [&](std::vector<NodeId> s) {
      Rng rng(seed + 1000);
      return run_single_rule(star, lambda, spec_for(std::move(s), 0.02, RuleKind::kSingle), rng);
    };
    const StoppingOutcome pair = run({0, 1});
    const StoppingOutcome first = run({0});
    const StoppingOutcome second = run({1});
    EXPECT_EQ(*pair.stop_time, std::min(*first.stop_time, *second.stop_time)) << seed;
  }
}

TEST(SingleRule, MpStopsNoLaterInMostTrials) {
  const NetworkModel star = testing::star_model();
  const std::vector<NodeId> s{0, 1};
  const double alpha = std::exp(-5.0);
  int mp_first = 0;
  int single_first = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng lr(seed);
    const ChangePointAssignment lambda = sample_change_points(star, lr);
    Rng a(seed + 7);
    Rng b(seed + 7);
    const StoppingOutcome mp = run_mp_rule(star, lambda, spec_for(s, alpha, RuleKind::kMessagePassing), a);
    const StoppingOutcome single = run_single_rule(star, lambda, spec_for(s, alpha, RuleKind::kSingle), b);
    if (*single.stop_time >= *mp.stop_time) ++mp_first;
    else ++single_first;
  }
  EXPECT_GT(mp_first, single_first);
}

TEST(RuleMulti, ThresholdMonotonicity) {
  const NetworkModel star = testing::star_model();
  const std::vector<NodeId> s{2};
  const std::vector<double> alphas{0.3, 0.1, 0.01, 0.001, 1e-5};
  const std::vector<std::size_t> caps(alphas.size(), 2000);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng lr(seed);
    const ChangePointAssignment lambda = sample_change_points(star, lr);
    Rng rng(seed + 5);
    const std::vector<StoppingOutcome> outs =
        run_rule_multi(star, lambda, s, RuleKind::kMessagePassing, alphas, caps, rng);
    for (std::size_t i = 1; i < outs.size(); ++i) {
      EXPECT_GE(*outs[i].stop_time, *outs[i - 1].stop_time);
    }
    // Each entry agrees with a dedicated single-alpha run on the same data.
    Rng again(seed + 5);
    const StoppingOutcome solo =
        run_mp_rule(star, lambda, spec_for(s, alphas[2], RuleKind::kMessagePassing), again);
    EXPECT_EQ(solo.stop_time, outs[2].stop_time);
  }
}

TEST(RuleMulti, SubsetMonotonicity) {
  const NetworkModel star = testing::star_model();
  const double alpha = 0.01;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng lr(seed);
    const ChangePointAssignment lambda = sample_change_points(star, lr);
    auto stop = [&](std::vector<NodeId> s) {
      Rng rng(seed + 9);
      return *run_mp_rule(star, lambda, spec_for(std::move(s), alpha, RuleKind::kMessagePassing), rng)
                  .stop_time;
    };
    EXPECT_LE(stop({0, 1, 3}), stop({0, 3}));
    EXPECT_LE(stop({0, 3}), stop({3}));
  }
}

TEST(RuleMulti, CensorsAtTheCap) {
  const NetworkModel model = build_model(uniform_spec(1, {}, 1e-6, kStarGaussian));
  Rng rng(55);
  const std::vector<NodeId> s{0};
  const double alphas[] = {1e-3};
  const std::size_t caps[] = {25};
  std::vector<double> trajectory;
  const std::vector<StoppingOutcome> outs =
      run_rule_multi(model, ChangePointAssignment({1000000}), s, RuleKind::kMessagePassing, alphas,
                     caps, rng, false, &trajectory);
  EXPECT_TRUE(outs[0].censored);
  EXPECT_FALSE(outs[0].stop_time.has_value());
  EXPECT_EQ(trajectory.size(), 25u);
}

TEST(DetectionSession, EmptyAdvanceKeepsState) {
  const NetworkModel star = testing::star_model();
  DetectionSession session(star, spec_for({1}, 0.01, RuleKind::kMessagePassing));
  Rng rng(56);
  ObservationGenerator gen(star, ChangePointAssignment({3, 3, 3, 3}), rng);
  session.advance(gen.next());
  const PosteriorSnapshot before = session.snapshot();
  session.advance(std::span<const TimeStep>{});
  EXPECT_EQ(session.snapshot().horizon, before.horizon);
  EXPECT_EQ(session.snapshot().gamma, before.gamma);
}

TEST(DetectionSession, ReplayEqualsRunAndStopIsSticky) {
  const NetworkModel star = testing::star_model();
  const StoppingRuleSpec spec = spec_for({0, 1}, 0.01, RuleKind::kMessagePassing);
  const ChangePointAssignment lambda({6, 9, 2, 14});
  Rng a(57);
  const StoppingOutcome direct = run_mp_rule(star, lambda, spec, a);

  Rng b(57);
  ObservationGenerator gen(star, lambda, b);
  DetectionSession session(star, spec);
  while (!session.snapshot().stopped) session.advance(gen.next());
  EXPECT_EQ(session.snapshot().stop_time, direct.stop_time);
  const std::size_t tau = *session.snapshot().stop_time;
  for (int i = 0; i < 5; ++i) {
    session.advance(gen.next());
    EXPECT_TRUE(session.snapshot().stopped);
    EXPECT_EQ(*session.snapshot().stop_time, tau);
  }
}

TEST(DetectionSession, RejectsMalformedStep) {
  const NetworkModel star = testing::star_model();
  DetectionSession session(star, spec_for({1}, 0.01, RuleKind::kMessagePassing));
  EXPECT_THROW(session.advance(TimeStep{{0.0, 1.0}, {}}), SchemaError);
}

TEST(DetectionSession, LoopySingleNodeOnTriangle) {
  const NetworkModel triangle =
      build_model(uniform_spec(3, {{0, 1}, {1, 2}, {0, 2}}, 0.2, kStarGaussian));
  StoppingRuleSpec spec = spec_for({0}, 0.01, RuleKind::kMessagePassing, 500);
  spec.allow_loopy = true;
  Rng rng(58);
  const StoppingOutcome out = run_mp_rule(triangle, ChangePointAssignment({4, 8, 12}), spec, rng);
  ASSERT_TRUE(out.stop_time.has_value());
  EXPECT_GE(*out.stop_time, 1u);
}

TEST(DefaultMaxHorizon, Formula) {
  const NetworkModel star = testing::star_model();
  const NodeId s[] = {0};
  const double alpha = std::exp(-8.0);
  const double slope = 1.0 / (-std::log(0.9) + 0.5);
  EXPECT_EQ(default_max_horizon(star, s, alpha),
            50u + static_cast<std::size_t>(std::ceil(20.0 * (10.0 + slope * 8.0))));
}

}  // namespace
}  // namespace netcpd
