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

// Experiment configuration files (YAML). Schema:
//
//   graph:
//     nodes: 4
//     edges: [[1, 2], [2, 3], [2, 4]]      # 1-based node labels
//   priors:
//     rho: 0.1                             # scalar broadcast or one value per node
//   densities:
//     nodes: {family: gaussian, mean_pre: 1, mean_post: 0, variance: 1}
//     edges: {family: bernoulli, p_pre: 0.3, p_post: 0.7}
//                                          # each: one mapping (broadcast) or a list
//   experiment:
//     functionals:
//       - {label: "2", subset: [2]}
//     alpha_grid: [0.1, 0.01]              # or neg_log_alpha_grid: [1, 2, 3]
//     rules: [MP, SINGLE]                  # default: both
//     trials: 1000
//     seed: 20120701
//     n_max: auto                          # or a positive integer
//     allow_loopy: false
//     output: results.csv
//
// Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netcpd/detection.hpp"
#include "netcpd/graph_model.hpp"

namespace netcpd {

struct FunctionalSpec {
  std::string label;
  std::vector<NodeId> subset;  // 0-based
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<FunctionalSpec> functionals;
  std::vector<double> alpha_grid;
  std::vector<RuleKind> rules;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_max;  // nullopt: default_max_horizon per (S, alpha)
  bool allow_loopy = false;
  std::string output = "results.csv";
};

/// Throws ValidationError naming the key on any schema or range violation.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// The configuration with every default spelled out, as YAML.
std::string resolved_config(const ExperimentConfig& config);

/// Parses "1,2,3" (1-based labels) into 0-based node ids.
std::vector<NodeId> parse_subset(const std::string& text, std::size_t node_count);

std::string subset_label(const std::vector<NodeId>& subset);

}  // namespace netcpd
