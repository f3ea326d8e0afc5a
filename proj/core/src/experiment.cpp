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

#include "netcpd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "netcpd/error.hpp"
#include "netcpd/rng.hpp"
#include "netcpd/theory.hpp"

namespace netcpd {
namespace {

constexpr std::uint64_t kObservationStream = 1;

struct Cell {
  std::size_t functional;
  RuleKind rule;
};

struct TrialResult {
  std::vector<std::size_t> lambda;
  std::vector<std::vector<StoppingOutcome>> per_cell;  // [cell][alpha]
};

double theory_slope_or_nan(const NetworkModel& model, std::span<const NodeId> subset) {
  try {
    return asymptotic_slope(model, subset);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

AggregateRow aggregate(const std::string& functional, RuleKind rule, double alpha,
                       std::span<const StoppingOutcome> outcomes, double theory_slope) {
  AggregateRow row;
  row.functional = functional;
  row.rule = rule;
  row.alpha = alpha;
  row.trials = outcomes.size();
  row.theory_slope = theory_slope;

  double sum = 0.0;
  double sum_all = 0.0;
  std::size_t finished = 0;
  for (const StoppingOutcome& o : outcomes) {
    if (o.censored) {
      ++row.censored;
      continue;
    }
    ++finished;
    sum_all += static_cast<double>(o.delay);
    if (o.false_alarm) {
      ++row.false_alarms;
    } else {
      ++row.completed;
      sum += static_cast<double>(o.delay);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.false_alarm_rate =
      row.trials > 0 ? static_cast<double>(row.false_alarms) / static_cast<double>(row.trials)
                     : nan;
  row.mean_delay = finished > 0 ? sum_all / static_cast<double>(finished) : nan;
  if (row.completed == 0) {
    row.mean_cond_delay = nan;
    row.se_delay = nan;
    row.slope = nan;
    return row;
  }
  const double count = static_cast<double>(row.completed);
  row.mean_cond_delay = sum / count;
  if (row.completed > 1) {
    double ss = 0.0;
    for (const StoppingOutcome& o : outcomes) {
      if (o.censored || o.false_alarm) continue;
      const double dev = static_cast<double>(o.delay) - row.mean_cond_delay;
      ss += dev * dev;
    }
    row.se_delay = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  } else {
    row.se_delay = nan;
  }
  row.slope = row.mean_cond_delay / std::abs(std::log(alpha));
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const NetworkModel model = build_model(config.model);

  std::vector<Cell> cells;
  for (std::size_t f = 0; f < config.functionals.size(); ++f) {
    for (RuleKind rule : config.rules) {
      if (rule == RuleKind::kSingle && config.functionals[f].subset.size() > 2) continue;
      cells.push_back({f, rule});
    }
  }

  std::vector<std::vector<std::size_t>> horizons(config.functionals.size());
  for (std::size_t f = 0; f < config.functionals.size(); ++f) {
    for (double alpha : config.alpha_grid) {
      horizons[f].push_back(config.n_max ? *config.n_max
                                         : default_max_horizon(model, config.functionals[f].subset,
                                                               alpha));
    }
    for (const Cell& cell : cells) {
      if (cell.functional != f) continue;
      for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
        validate_rule(model, StoppingRuleSpec{config.functionals[f].subset, config.alpha_grid[a],
                                              cell.rule, horizons[f][a], config.allow_loopy, {}});
      }
    }
  }

  std::vector<TrialResult> results(config.trials);
  auto run_trial = [&](std::size_t t) {
    Rng lambda_rng = substream(config.seed, {t});
    const ChangePointAssignment assignment = sample_change_points(model, lambda_rng);
    TrialResult& result = results[t];
    result.lambda.assign(assignment.values().begin(), assignment.values().end());
    result.per_cell.reserve(cells.size());
    for (const Cell& cell : cells) {
      // Every cell replays the same observation stream for this trial.
      Rng obs_rng = substream(config.seed, {t, kObservationStream});
      result.per_cell.push_back(run_rule_multi(model, assignment,
                                               config.functionals[cell.functional].subset,
                                               cell.rule, config.alpha_grid,
                                               horizons[cell.functional], obs_rng,
                                               config.allow_loopy));
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(options.threads, std::max<std::size_t>(1, config.trials)));
  if (threads == 1) {
    for (std::size_t t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
          try {
            run_trial(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(config.trials);
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentResult out;
  if (config.trials == 0) return out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const FunctionalSpec& functional = config.functionals[cells[c].functional];
    const double theory = theory_slope_or_nan(model, functional.subset);
    for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
      std::vector<StoppingOutcome> outcomes;
      outcomes.reserve(config.trials);
      for (std::size_t t = 0; t < config.trials; ++t) {
        outcomes.push_back(results[t].per_cell[c][a]);
      }
      AggregateRow row =
          aggregate(functional.label, cells[c].rule, config.alpha_grid[a], outcomes, theory);
      out.censored_total += row.censored;
      out.rows.push_back(std::move(row));
      if (options.keep_trial_log) {
        for (std::size_t t = 0; t < config.trials; ++t) {
          out.trial_log.push_back(TrialRecord{t, functional.label, cells[c].rule,
                                              config.alpha_grid[a], results[t].lambda,
                                              outcomes[t]});
        }
      }
    }
  }
  return out;
}

}  // namespace netcpd
