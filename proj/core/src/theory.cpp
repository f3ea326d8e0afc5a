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

#include "netcpd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "netcpd/error.hpp"

namespace netcpd {

double kl_divergence(const TwoPhaseDensity& density) {
  if (const auto* g = std::get_if<GaussianFamily>(&density.family())) {
    const double diff = g->mean_post - g->mean_pre;
    return diff * diff / (2.0 * g->variance);
  }
  const auto& b = std::get<BernoulliFamily>(density.family());
  if (b.p_post == b.p_pre) return 0.0;
  return b.p_post * std::log(b.p_post / b.p_pre) +
         (1.0 - b.p_post) * (std::log1p(-b.p_post) - std::log1p(-b.p_pre));
}

void gauss_hermite(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  // Newton iteration on the orthonormal Hermite recurrence.
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * count + 1.0) - 1.85575 * std::pow(2.0 * count + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(count), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * nodes[1];
    } else {
      z = 2.0 * z - nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * count) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    nodes[i] = z;
    nodes[count - 1 - i] = -z;
    weights[i] = 2.0 / (pp * pp);
    weights[count - 1 - i] = weights[i];
  }
}

double kl_divergence_quadrature(const TwoPhaseDensity& density, int nodes) {
  if (const auto* g = std::get_if<GaussianFamily>(&density.family())) {
    std::vector<double> x;
    std::vector<double> w;
    gauss_hermite(nodes, x, w);
    const double scale = std::sqrt(2.0 * g->variance);
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) acc += w[i] * density.log_lr(g->mean_post + scale * x[i]);
    return acc / std::sqrt(std::numbers::pi);
  }
  double acc = 0.0;
  for (double x : {0.0, 1.0}) acc += std::exp(density.log_post(x)) * density.log_lr(x);
  return acc;
}

double info_functional(const NetworkModel& model, std::span<const NodeId> subset) {
  if (subset.empty()) throw DomainError("subset must be nonempty");
  std::vector<bool> in(model.node_count(), false);
  for (NodeId j : subset) in.at(j) = true;
  double total = 0.0;
  for (NodeId j = 0; j < model.node_count(); ++j) {
    if (in[j]) total += kl_divergence(model.node_density(j));
  }
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.graph().edge(e);
    if (in[ed.lo] && in[ed.hi]) total += kl_divergence(model.edge_density(e));
  }
  return total;
}

double prior_exponent(const NetworkModel& model, std::span<const NodeId> subset) {
  if (subset.empty()) throw DomainError("subset must be nonempty");
  std::vector<bool> in(model.node_count(), false);
  for (NodeId j : subset) in.at(j) = true;
  double q = 0.0;
  for (NodeId j = 0; j < model.node_count(); ++j) {
    if (in[j]) q -= model.prior(j).log_survival_rate();
  }
  return q;
}

double asymptotic_slope(const NetworkModel& model, std::span<const NodeId> subset) {
  const double rate = prior_exponent(model, subset) + info_functional(model, subset);
  if (!(rate > 0.0)) throw DomainError("undefined slope: q_phi + I_phi = 0");
  return 1.0 / rate;
}

InformationSummary summarize_information(const NetworkModel& model,
                                         std::span<const std::vector<NodeId>> subsets) {
  InformationSummary out;
  for (NodeId j = 0; j < model.node_count(); ++j) {
    out.node_info.push_back(kl_divergence(model.node_density(j)));
  }
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    out.edge_info.push_back(kl_divergence(model.edge_density(e)));
  }
  for (const auto& s : subsets) {
    SubsetInformation row;
    row.subset = s;
    row.info = info_functional(model, s);
    row.prior_rate = prior_exponent(model, s);
    row.slope = asymptotic_slope(model, s);
    out.subsets.push_back(std::move(row));
  }
  return out;
}

}  // namespace netcpd
