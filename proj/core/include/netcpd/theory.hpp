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

#include <span>
#include <vector>

#include "netcpd/graph_model.hpp"

namespace netcpd {

/// KL(f || g) in nats, closed form.
double kl_divergence(const TwoPhaseDensity& density);

/// KL(f || g) by quadrature: Gauss-Hermite for Gaussians, exact two-point sum
/// for Bernoulli. Cross-check only; the closed form is authoritative.
double kl_divergence_quadrature(const TwoPhaseDensity& density, int nodes = 32);

/// I_phi: sum of I_j over j in S plus I_e over edges with both ends in S.
double info_functional(const NetworkModel& model, std::span<const NodeId> subset);

/// q_phi = -sum_{j in S} log(1 - rho_j), the prior tail rate of min_{j in S} lambda_j.
double prior_exponent(const NetworkModel& model, std::span<const NodeId> subset);

/// 1 / (q_phi + I_phi): limiting expected delay per nat of |log alpha|.
/// Throws DomainError when q_phi + I_phi is 0.
double asymptotic_slope(const NetworkModel& model, std::span<const NodeId> subset);

struct SubsetInformation {
  std::vector<NodeId> subset;
  double info = 0.0;
  double prior_rate = 0.0;
  double slope = 0.0;
};

struct InformationSummary {
  std::vector<double> node_info;
  std::vector<double> edge_info;
  std::vector<SubsetInformation> subsets;
};

InformationSummary summarize_information(const NetworkModel& model,
                                         std::span<const std::vector<NodeId>> subsets);

/// Gauss-Hermite nodes and weights for the weight exp(-x^2).
void gauss_hermite(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace netcpd
