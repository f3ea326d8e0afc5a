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

#include "netcpd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "netcpd/error.hpp"

namespace netcpd {
namespace {

std::string format_with(double value, std::chars_format fmt, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = precision < 0 ? std::to_chars(buf, buf + sizeof buf, value)
                                 : std::to_chars(buf, buf + sizeof buf, value, fmt, precision);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw SchemaError("csv: malformed number '" + text + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text) {
  std::size_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw SchemaError("csv: malformed count '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_sig6(double value) { return format_with(value, std::chars_format::general, 6); }

std::string format_exact(double value) { return format_with(value, std::chars_format::general, -1); }

void write_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const AggregateRow& r : rows) {
    out << r.functional << ',' << to_string(r.rule) << ',' << format_exact(r.alpha) << ','
        << format_exact(-std::log(r.alpha)) << ',' << r.trials << ',' << r.completed << ','
        << r.censored << ',' << format_sig6(r.false_alarm_rate) << ','
        << format_sig6(r.mean_cond_delay) << ',' << format_sig6(r.se_delay) << ','
        << format_sig6(r.slope) << ',' << format_sig6(r.theory_slope) << '\n';
  }
}

void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<AggregateRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kAggregateHeader) {
    throw SchemaError("csv: unexpected header in '" + path.string() + "'");
  }
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != 12) throw SchemaError("csv: expected 12 fields, got " + std::to_string(f.size()));
    AggregateRow r;
    r.functional = f[0];
    r.rule = parse_rule_kind(f[1]);
    r.alpha = parse_double(f[2]);
    r.trials = parse_count(f[4]);
    r.completed = parse_count(f[5]);
    r.censored = parse_count(f[6]);
    r.false_alarm_rate = parse_double(f[7]);
    r.mean_cond_delay = parse_double(f[8]);
    r.se_delay = parse_double(f[9]);
    r.slope = parse_double(f[10]);
    r.theory_slope = parse_double(f[11]);
    r.false_alarms = r.trials - r.completed - r.censored;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial,functional,rule,alpha,lambda,phi,tau,delay,false_alarm,censored\n";
  for (const TrialRecord& r : records) {
    out << r.trial << ',' << r.functional << ',' << to_string(r.rule) << ','
        << format_exact(r.alpha) << ',';
    for (std::size_t i = 0; i < r.lambda.size(); ++i) {
      if (i > 0) out << ' ';
      out << r.lambda[i];
    }
    out << ',' << r.outcome.truth << ',';
    if (r.outcome.stop_time) out << *r.outcome.stop_time;
    out << ',' << r.outcome.delay << ',' << (r.outcome.false_alarm ? 1 : 0) << ','
        << (r.outcome.censored ? 1 : 0) << '\n';
  }
}

}  // namespace netcpd
