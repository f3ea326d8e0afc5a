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

#include <cstdint>
#include <string>
#include <vector>

#include "netcpd/graph_model.hpp"
#include "netcpd/oracle.hpp"
#include "netcpd/rng.hpp"

namespace netcpd {

/// Four-node star with node 2 (id 1) at the center, rho = 0.1 on every node
/// and N(1, 1) -> N(0, 1) on every stream.
ModelSpec star_spec();

struct RandomInstance {
  ModelSpec spec;
  ObservationPanel panel;
  std::size_t horizon = 0;
};

struct InstanceShape {
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 5;
  std::size_t min_horizon = 1;
  std::size_t max_horizon = 6;
};

/// Random labeled tree with random priors, densities (Gaussian or Bernoulli,
/// chosen per instance) and data simulated from the model itself.
RandomInstance random_tree_instance(Rng& rng, const InstanceShape& shape = {});

struct EquivalenceStats {
  std::size_t instances = 0;
  std::size_t skipped = 0;        // over the oracle budget
  std::size_t comparisons = 0;
  double max_relative_error = 0.0;
  std::string worst;              // description of the worst comparison
};

/// Compares every node posterior, every edge pair posterior and gamma_S for
/// all singletons, all pairs and the full node set against enumeration.
EquivalenceStats oracle_equivalence(std::size_t instances, std::uint64_t seed,
                                    double budget_cells = kDefaultOracleBudget);

struct ConstancyStats {
  std::size_t instances = 0;
  std::size_t skipped = 0;
  double max_relative_deviation = 0.0;
};

ConstancyStats constancy_sweep(std::size_t instances, std::uint64_t seed,
                               double budget_cells = kDefaultOracleBudget);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  double budget_cells = kDefaultOracleBudget;
  std::size_t instances = 100;
  std::uint64_t seed = 20260101;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace netcpd
