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

#ifndef ADAPTEST_RESPONSE_LOG_HPP
#define ADAPTEST_RESPONSE_LOG_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptest/irt.hpp"
#include "adaptest/item_bank.hpp"
#include "adaptest/session.hpp"

namespace adaptest {

using ExamineeId = std::int64_t;

/// One examinee-item encounter.
struct ResponseRecord {
  ExamineeId examinee_id = 0;
  std::int64_t session_id = 0;
  int position = 0;
  ItemId item_id = 0;
  ItemParams params;
  Outcome outcome = Outcome::Incorrect;
  double theta_after = 0.0;
  std::string period_tag;

  friend bool operator==(const ResponseRecord&,
                         const ResponseRecord&) = default;
};

using ResponseLog = std::vector<ResponseRecord>;

inline constexpr std::string_view kResponseLogHeader =
    "examinee_id,session_id,position,item_id,a,b,outcome,theta_after,"
    "period_tag";

/// Trace of a session as log records, one per answered item.
std::vector<ResponseRecord> session_records(const AdaptiveSession& session,
                                            ExamineeId examinee_id,
                                            std::int64_t session_id,
                                            std::string_view period_tag);

/// Throws InvalidArgument on a repeated (examinee, session, position) key, a
/// non-finite theta_after or a period tag containing a comma or newline.
void validate_log(std::span<const ResponseRecord> log);

/// CSV with header kResponseLogHeader; outcome as C/I/A; floats with six
/// decimals. Rows are written in the given order.
void write_response_log_csv(std::ostream& out,
                            std::span<const ResponseRecord> log);
std::string response_log_csv(std::span<const ResponseRecord> log);

/// Throws ParseError carrying the 1-based line number of the bad row.
ResponseLog read_response_log_csv(std::istream& in);

namespace csv {

/// Splits one CSV line on commas. Quoting is not supported.
std::vector<std::string_view> split(std::string_view line);

std::int64_t parse_int(std::string_view field, std::string_view name,
                       std::size_t row);
double parse_double(std::string_view field, std::string_view name,
                    std::size_t row);

/// printf("%.6f") formatting shared by every CSV writer.
std::string fixed6(double value);

}  // namespace csv

}  // namespace adaptest

#endif  // ADAPTEST_RESPONSE_LOG_HPP
