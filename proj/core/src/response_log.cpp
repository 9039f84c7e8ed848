// Copyright 2026 The Adaptest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adaptest/response_log.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "adaptest/errors.hpp"

namespace adaptest {

namespace csv {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::int64_t parse_int(std::string_view field, std::string_view name,
                       std::size_t row) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty()) {
    throw ParseError("bad integer in column " + std::string(name) + ": '" +
                         std::string(field) + "'",
                     row);
  }
  return value;
}

double parse_double(std::string_view field, std::string_view name,
                    std::size_t row) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      field.empty() || !std::isfinite(value)) {
    throw ParseError("bad number in column " + std::string(name) + ": '" +
                         std::string(field) + "'",
                     row);
  }
  return value;
}

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

}  // namespace csv

std::vector<ResponseRecord> session_records(const AdaptiveSession& session,
                                            ExamineeId examinee_id,
                                            std::int64_t session_id,
                                            std::string_view period_tag) {
  std::vector<ResponseRecord> out;
  out.reserve(session.state().trace.size());
  for (const auto& entry : session.state().trace) {
    out.push_back({examinee_id, session_id, entry.position, entry.item_id,
                   entry.params, entry.outcome, entry.theta_hat,
                   std::string(period_tag)});
  }
  return out;
}

void validate_log(std::span<const ResponseRecord> log) {
  std::set<std::tuple<ExamineeId, std::int64_t, int>> keys;
  for (const auto& r : log) {
    if (!keys.emplace(r.examinee_id, r.session_id, r.position).second) {
      throw InvalidArgument(
          "duplicate (examinee, session, position) = (" +
          std::to_string(r.examinee_id) + ", " + std::to_string(r.session_id) +
          ", " + std::to_string(r.position) + ")");
    }
    if (!std::isfinite(r.theta_after)) {
      throw InvalidArgument("theta_after must be finite");
    }
    if (r.period_tag.find_first_of(",\r\n") != std::string::npos) {
      throw InvalidArgument("period tag may not contain commas or newlines");
    }
  }
}

void write_response_log_csv(std::ostream& out,
                            std::span<const ResponseRecord> log) {
  out << kResponseLogHeader << '\n';
  for (const auto& r : log) {
    out << r.examinee_id << ',' << r.session_id << ',' << r.position << ','
        << r.item_id << ',' << csv::fixed6(r.params.a) << ','
        << csv::fixed6(r.params.b) << ',' << outcome_code(r.outcome) << ','
        << csv::fixed6(r.theta_after) << ',' << r.period_tag << '\n';
  }
}

std::string response_log_csv(std::span<const ResponseRecord> log) {
  std::ostringstream out;
  write_response_log_csv(out, log);
  return out.str();
}

ResponseLog read_response_log_csv(std::istream& in) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", row);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResponseLogHeader) {
    throw ParseError("unexpected header '" + line + "'", row);
  }
  ResponseLog log;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 9) {
      throw ParseError("expected 9 fields, found " + std::to_string(f.size()),
                       row);
    }
    ResponseRecord r;
    r.examinee_id = csv::parse_int(f[0], "examinee_id", row);
    r.session_id = csv::parse_int(f[1], "session_id", row);
    r.position = static_cast<int>(csv::parse_int(f[2], "position", row));
    r.item_id = csv::parse_int(f[3], "item_id", row);
    r.params.a = csv::parse_double(f[4], "a", row);
    r.params.b = csv::parse_double(f[5], "b", row);
    if (f[6].size() != 1) throw ParseError("bad outcome code", row);
    try {
      r.outcome = outcome_from_code(f[6][0]);
      validate(r.params);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), row);
    }
    if (r.position < 1) throw ParseError("position must be >= 1", row);
    r.theta_after = csv::parse_double(f[7], "theta_after", row);
    r.period_tag = std::string(f[8]);
    log.push_back(std::move(r));
  }
  validate_log(log);
  return log;
}

}  // namespace adaptest
