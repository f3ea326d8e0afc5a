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

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "netcpd/experiment.hpp"

namespace netcpd {

inline constexpr const char* kAggregateHeader =
    "functional,rule,alpha,neg_log_alpha,trials,completed,censored,false_alarm_rate,"
    "mean_cond_delay,se_delay,slope,theory_slope";

/// 6 significant digits, locale independent; non-finite values print as nan/inf.
std::string format_sig6(double value);
/// Shortest representation that parses back to the same double.
std::string format_exact(double value);

void write_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
/// Throws Error when \p path cannot be written.
void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

/// Reads a file written by emit_csv. Counts not stored in the file
/// (false_alarms, mean_delay) are reconstructed or left at zero.
std::vector<AggregateRow> read_csv(const std::filesystem::path& path);

/// trial,functional,rule,alpha,lambda,phi,tau,delay,false_alarm,censored
void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& records);

}  // namespace netcpd
