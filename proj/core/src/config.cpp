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

#include "netcpd/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "netcpd/error.hpp"

namespace netcpd {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw ValidationError("config key '" + key + "': " + why);
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

YAML::Node require(const YAML::Node& node, const std::string& where, const char* key) {
  const YAML::Node child = node[key];
  if (!child) fail(where + "." + key, "missing");
  return child;
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(key, "cannot parse '" + node.Scalar() + "'");
  }
}

NodeId node_label(const YAML::Node& node, const std::string& key, std::size_t node_count) {
  const auto label = scalar<long long>(node, key);
  if (label < 1 || static_cast<std::size_t>(label) > node_count) {
    fail(key, "node label " + std::to_string(label) + " outside [1, " +
                  std::to_string(node_count) + "]");
  }
  return static_cast<NodeId>(label - 1);
}

DensityFamily parse_density(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) fail(key, "expected a density mapping");
  const auto family = scalar<std::string>(require(node, key, "family"), key + ".family");
  if (family == "gaussian") {
    check_keys(node, key, {"family", "mean_pre", "mean_post", "variance"});
    GaussianFamily g{scalar<double>(require(node, key, "mean_pre"), key + ".mean_pre"),
                     scalar<double>(require(node, key, "mean_post"), key + ".mean_post"),
                     scalar<double>(require(node, key, "variance"), key + ".variance")};
    if (!(g.variance > 0.0)) fail(key + ".variance", "must be > 0");
    return g;
  }
  if (family == "bernoulli") {
    check_keys(node, key, {"family", "p_pre", "p_post"});
    BernoulliFamily b{scalar<double>(require(node, key, "p_pre"), key + ".p_pre"),
                      scalar<double>(require(node, key, "p_post"), key + ".p_post")};
    if (!(b.p_pre > 0.0 && b.p_pre < 1.0)) fail(key + ".p_pre", "must lie in (0,1)");
    if (!(b.p_post > 0.0 && b.p_post < 1.0)) fail(key + ".p_post", "must lie in (0,1)");
    return b;
  }
  fail(key + ".family", "unknown family '" + family + "' (expected gaussian or bernoulli)");
}

std::vector<DensityFamily> parse_density_list(const YAML::Node& node, const std::string& key,
                                              std::size_t count) {
  if (node.IsMap()) return std::vector<DensityFamily>(count, parse_density(node, key));
  if (!node.IsSequence()) fail(key, "expected a density mapping or a list of them");
  if (node.size() != count) {
    fail(key, "expected " + std::to_string(count) + " entries, got " + std::to_string(node.size()));
  }
  std::vector<DensityFamily> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(parse_density(node[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ExperimentConfig parse_root(const YAML::Node& root) {
  check_keys(root, "", {"graph", "priors", "densities", "experiment"});
  ExperimentConfig cfg;
  ModelSpec& m = cfg.model;

  const YAML::Node graph = require(root, "", "graph");
  check_keys(graph, "graph", {"nodes", "edges"});
  const auto nodes = scalar<long long>(require(graph, "graph", "nodes"), "graph.nodes");
  if (nodes < 1) fail("graph.nodes", "must be >= 1");
  m.node_count = static_cast<std::size_t>(nodes);
  if (const YAML::Node edges = graph["edges"]) {
    if (!edges.IsSequence()) fail("graph.edges", "expected a list of [i, j] pairs");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string key = "graph.edges[" + std::to_string(e) + "]";
      if (!edges[e].IsSequence() || edges[e].size() != 2) fail(key, "expected [i, j]");
      m.edges.emplace_back(node_label(edges[e][0], key, m.node_count),
                           node_label(edges[e][1], key, m.node_count));
    }
  }

  const YAML::Node priors = require(root, "", "priors");
  check_keys(priors, "priors", {"rho"});
  const YAML::Node rho = require(priors, "priors", "rho");
  if (rho.IsSequence()) {
    if (rho.size() != m.node_count) {
      fail("priors.rho", "expected " + std::to_string(m.node_count) + " values");
    }
    for (std::size_t j = 0; j < rho.size(); ++j) {
      m.rho.push_back(scalar<double>(rho[j], "priors.rho[" + std::to_string(j) + "]"));
    }
  } else {
    m.rho.assign(m.node_count, scalar<double>(rho, "priors.rho"));
  }
  for (std::size_t j = 0; j < m.rho.size(); ++j) {
    if (!(m.rho[j] > 0.0 && m.rho[j] < 1.0)) {
      std::ostringstream os;
      os << "value " << m.rho[j] << " for node " << j + 1 << " outside (0,1)";
      fail("priors.rho", os.str());
    }
  }

  const YAML::Node dens = require(root, "", "densities");
  check_keys(dens, "densities", {"nodes", "edges"});
  m.node_densities =
      parse_density_list(require(dens, "densities", "nodes"), "densities.nodes", m.node_count);
  if (!m.edges.empty()) {
    m.edge_densities =
        parse_density_list(require(dens, "densities", "edges"), "densities.edges", m.edges.size());
  } else if (dens["edges"] && dens["edges"].IsSequence() && dens["edges"].size() != 0) {
    fail("densities.edges", "graph has no edges");
  }
  // Surface graph-level errors (self-loops, duplicates) with their names.
  build_model(m);

  const YAML::Node exp = require(root, "", "experiment");
  check_keys(exp, "experiment",
             {"functionals", "alpha_grid", "neg_log_alpha_grid", "rules", "trials", "seed",
              "n_max", "allow_loopy", "output"});

  const YAML::Node funcs = require(exp, "experiment", "functionals");
  if (!funcs.IsSequence() || funcs.size() == 0) {
    fail("experiment.functionals", "expected a nonempty list");
  }
  std::set<std::string> labels;
  for (std::size_t f = 0; f < funcs.size(); ++f) {
    const std::string key = "experiment.functionals[" + std::to_string(f) + "]";
    check_keys(funcs[f], key, {"label", "subset"});
    FunctionalSpec fs;
    const YAML::Node subset = require(funcs[f], key, "subset");
    if (!subset.IsSequence() || subset.size() == 0) fail(key + ".subset", "expected a nonempty list");
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      const NodeId j = node_label(subset[i], key + ".subset", m.node_count);
      if (!seen.insert(j).second) fail(key + ".subset", "repeated node " + std::to_string(j + 1));
      fs.subset.push_back(j);
    }
    fs.label = funcs[f]["label"] ? scalar<std::string>(funcs[f]["label"], key + ".label")
                                 : subset_label(fs.subset);
    if (!labels.insert(fs.label).second) fail(key + ".label", "duplicate label '" + fs.label + "'");
    cfg.functionals.push_back(std::move(fs));
  }

  const bool has_alpha = static_cast<bool>(exp["alpha_grid"]);
  const bool has_neg = static_cast<bool>(exp["neg_log_alpha_grid"]);
  if (has_alpha == has_neg) {
    fail("experiment.alpha_grid", "give exactly one of alpha_grid or neg_log_alpha_grid");
  }
  const std::string grid_key = has_alpha ? "experiment.alpha_grid" : "experiment.neg_log_alpha_grid";
  const YAML::Node grid = has_alpha ? exp["alpha_grid"] : exp["neg_log_alpha_grid"];
  if (!grid.IsSequence() || grid.size() == 0) fail(grid_key, "expected a nonempty list");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = scalar<double>(grid[i], grid_key);
    const double alpha = has_alpha ? v : std::exp(-v);
    if (!(alpha > 0.0 && alpha < 1.0)) {
      std::ostringstream os;
      os << "value " << v << " gives alpha " << alpha << " outside (0,1)";
      fail(grid_key, os.str());
    }
    if (std::find(cfg.alpha_grid.begin(), cfg.alpha_grid.end(), alpha) != cfg.alpha_grid.end()) {
      std::ostringstream os;
      os << "duplicate value " << v;
      fail(grid_key, os.str());
    }
    cfg.alpha_grid.push_back(alpha);
  }

  if (const YAML::Node rules = exp["rules"]) {
    if (!rules.IsSequence() || rules.size() == 0) fail("experiment.rules", "expected a nonempty list");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const auto text = scalar<std::string>(rules[i], "experiment.rules");
      RuleKind kind;
      try {
        kind = parse_rule_kind(text);
      } catch (const ValidationError& e) {
        fail("experiment.rules", e.what());
      }
      if (std::find(cfg.rules.begin(), cfg.rules.end(), kind) != cfg.rules.end()) {
        fail("experiment.rules", "duplicate rule " + text);
      }
      cfg.rules.push_back(kind);
    }
  } else {
    cfg.rules = {RuleKind::kMessagePassing, RuleKind::kSingle};
  }
  for (RuleKind r : cfg.rules) {
    if (r != RuleKind::kSingle) continue;
    for (const auto& f : cfg.functionals) {
      if (f.subset.size() > 2) {
        fail("experiment.rules", "SINGLE needs functionals of at most 2 nodes; '" + f.label +
                                     "' has " + std::to_string(f.subset.size()));
      }
    }
  }

  const auto trials = scalar<long long>(require(exp, "experiment", "trials"), "experiment.trials");
  if (trials < 0) fail("experiment.trials", "must be >= 0");
  cfg.trials = static_cast<std::size_t>(trials);
  cfg.seed = scalar<std::uint64_t>(require(exp, "experiment", "seed"), "experiment.seed");

  if (const YAML::Node nmax = exp["n_max"]) {
    if (scalar<std::string>(nmax, "experiment.n_max") != "auto") {
      const auto v = scalar<long long>(nmax, "experiment.n_max");
      if (v < 1) fail("experiment.n_max", "must be 'auto' or a positive integer");
      cfg.n_max = static_cast<std::size_t>(v);
    }
  }
  if (const YAML::Node loopy = exp["allow_loopy"]) {
    cfg.allow_loopy = scalar<bool>(loopy, "experiment.allow_loopy");
  }
  if (const YAML::Node out = exp["output"]) cfg.output = scalar<std::string>(out, "experiment.output");
  return cfg;
}

void emit_density(YAML::Emitter& em, const DensityFamily& d) {
  em << YAML::Flow << YAML::BeginMap;
  if (const auto* g = std::get_if<GaussianFamily>(&d)) {
    em << YAML::Key << "family" << YAML::Value << "gaussian";
    em << YAML::Key << "mean_pre" << YAML::Value << g->mean_pre;
    em << YAML::Key << "mean_post" << YAML::Value << g->mean_post;
    em << YAML::Key << "variance" << YAML::Value << g->variance;
  } else {
    const auto& b = std::get<BernoulliFamily>(d);
    em << YAML::Key << "family" << YAML::Value << "bernoulli";
    em << YAML::Key << "p_pre" << YAML::Value << b.p_pre;
    em << YAML::Key << "p_post" << YAML::Value << b.p_post;
  }
  em << YAML::EndMap;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config is not valid YAML: ") + e.what());
  }
  return parse_root(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string resolved_config(const ExperimentConfig& cfg) {
  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em << YAML::BeginMap;
  em << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
  em << YAML::Key << "nodes" << YAML::Value << cfg.model.node_count;
  em << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& [a, b] : cfg.model.edges) {
    em << YAML::Flow << YAML::BeginSeq << a + 1 << b + 1 << YAML::EndSeq;
  }
  em << YAML::EndSeq << YAML::EndMap;

  em << YAML::Key << "priors" << YAML::Value << YAML::BeginMap;
  em << YAML::Key << "rho" << YAML::Value << YAML::Flow << cfg.model.rho;
  em << YAML::EndMap;

  em << YAML::Key << "densities" << YAML::Value << YAML::BeginMap;
  em << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : cfg.model.node_densities) emit_density(em, d);
  em << YAML::EndSeq;
  em << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : cfg.model.edge_densities) emit_density(em, d);
  em << YAML::EndSeq << YAML::EndMap;

  em << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  em << YAML::Key << "functionals" << YAML::Value << YAML::BeginSeq;
  for (const auto& f : cfg.functionals) {
    em << YAML::Flow << YAML::BeginMap;
    em << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << f.label;
    em << YAML::Key << "subset" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (NodeId j : f.subset) em << j + 1;
    em << YAML::EndSeq << YAML::EndMap;
  }
  em << YAML::EndSeq;
  em << YAML::Key << "alpha_grid" << YAML::Value << YAML::Flow << cfg.alpha_grid;
  em << YAML::Key << "rules" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (RuleKind r : cfg.rules) em << to_string(r);
  em << YAML::EndSeq;
  em << YAML::Key << "trials" << YAML::Value << cfg.trials;
  em << YAML::Key << "seed" << YAML::Value << cfg.seed;
  em << YAML::Key << "n_max" << YAML::Value;
  if (cfg.n_max) {
    em << *cfg.n_max;
  } else {
    em << "auto";
  }
  em << YAML::Key << "allow_loopy" << YAML::Value << cfg.allow_loopy;
  em << YAML::Key << "output" << YAML::Value << cfg.output;
  em << YAML::EndMap << YAML::EndMap;
  return std::string(em.c_str()) + "\n";
}

std::vector<NodeId> parse_subset(const std::string& text, std::size_t node_count) {
  std::vector<NodeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long label = 0;
    try {
      label = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("subset '" + text + "': '" + item + "' is not a node label");
    }
    if (used != item.size() || label < 1 || static_cast<std::size_t>(label) > node_count) {
      throw ValidationError("subset '" + text + "': node '" + item + "' outside [1, " +
                            std::to_string(node_count) + "]");
    }
    const auto j = static_cast<NodeId>(label - 1);
    if (std::find(out.begin(), out.end(), j) != out.end()) {
      throw ValidationError("subset '" + text + "': repeated node " + item);
    }
    out.push_back(j);
  }
  if (out.empty()) throw ValidationError("subset must name at least one node");
  return out;
}

std::string subset_label(const std::vector<NodeId>& subset) {
  std::string out;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) out += "+";
    out += std::to_string(subset[i] + 1);
  }
  return out;
}

}  // namespace netcpd
