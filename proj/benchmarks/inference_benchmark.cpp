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

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "netcpd/inference.hpp"
#include "netcpd/oracle.hpp"
#include "netcpd/validation.hpp"

namespace {

using namespace netcpd;

struct StarData {
  NetworkModel model = build_model(star_spec());
  ObservationPanel panel;

  explicit StarData(std::size_t horizon) {
    Rng rng = substream(42, {horizon});
    panel = sample_observations(model, ChangePointAssignment({150, 700, 1200, 90}), horizon, rng);
  }
};

void BM_DetectionStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const StarData data(n);
  const std::vector<NodeId> pair{0, 1};
  for (auto _ : state) {
    auto ev = std::make_shared<const LocalEvidence>(build_evidence(data.model, data.panel, n));
    const MessageTable table = run_tree_bp(ev);
    benchmark::DoNotOptimize(node_posterior(table, 1));
    benchmark::DoNotOptimize(subset_min_cdf(*ev, pair));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DetectionStep)->RangeMultiplier(2)->Range(100, 6400)->Complexity(benchmark::oN);

void BM_TreeBpOnly(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const StarData data(n);
  auto ev = std::make_shared<const LocalEvidence>(build_evidence(data.model, data.panel, n));
  for (auto _ : state) benchmark::DoNotOptimize(run_tree_bp(ev));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TreeBpOnly)->RangeMultiplier(2)->Range(100, 6400)->Complexity(benchmark::oN);

void BM_MessagePrefix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::uniform_real_distribution<double> u(-20.0, 0.0);
  LogVector source(n + 1);
  LogVector edge(n + 1);
  for (double& v : source) v = u(rng);
  for (double& v : edge) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(detail::message_prefix(source, edge));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MessagePrefix)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_MessageNaive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::uniform_real_distribution<double> u(-20.0, 0.0);
  LogVector source(n + 1);
  LogVector edge(n + 1);
  for (double& v : source) v = u(rng);
  for (double& v : edge) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(detail::message_naive(source, edge));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MessageNaive)->RangeMultiplier(4)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_OracleEnumeration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const StarData data(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_joint_posterior(data.model, data.panel, n));
  }
}
BENCHMARK(BM_OracleEnumeration)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
