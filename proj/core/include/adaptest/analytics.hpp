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

// Statistics over response logs.
//
// CAR (correct answer rate) is correct answers over attempted items, where
// abandoned items count as attempted. mu_all(j) is the mean post-response
// ability estimate over every record of item j; mu_final(j) restricts that
// mean to records at the last position k of a session.

#ifndef ADAPTEST_ANALYTICS_HPP
#define ADAPTEST_ANALYTICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "adaptest/item_bank.hpp"
#include "adaptest/response_log.hpp"
#include "adaptest/session.hpp"

namespace adaptest {

enum class IntervalMethod { Wald, Wilson };

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct CarResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double sd = 0.0;  // sqrt(rate (1 - rate) / total)
};

/// Throws InvalidArgument if total == 0 or correct > total.
double car(std::size_t correct, std::size_t total);

/// Two-sided normal quantile for a central interval, e.g. 1.95996 at 0.95.
double z_for_level(double level);

/// Wald: p +/- z sqrt(p (1 - p) / n), clamped to [0, 1].
Interval car_ci(std::size_t correct, std::size_t total, double level = 0.95,
                IntervalMethod method = IntervalMethod::Wald);

CarResult car_result(std::size_t correct, std::size_t total,
                     double level = 0.95,
                     IntervalMethod method = IntervalMethod::Wald);

/// Throws InvalidArgument if the item has no records.
double mu_all(std::span<const ResponseRecord> log, ItemId item_id);

/// Empty if the item never appeared at position k.
std::optional<double> mu_final(std::span<const ResponseRecord> log,
                               ItemId item_id, int k);

/// Streaming mean (Welford update).
class RunningMean {
 public:
  void add(double x) noexcept {
    ++count_;
    mean_ += (x - mean_) / static_cast<double>(count_);
  }
  double mean() const noexcept { return mean_; }
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
};

/// Pearson correlation. Throws UndefinedCorrelation for fewer than two
/// pairs or zero variance in either coordinate.
double pearson(std::span<const std::pair<double, double>> pairs);

/// Pearson r over (b_j, mu_all(j)) for the responded items of a section.
/// Section membership comes from the bank; b from the log records.
double difficulty_ability_correlation(std::span<const ResponseRecord> log,
                                      const ItemBank& bank, SectionId section);

using GroupKey = std::variant<std::int64_t, std::string>;
using Grouping = std::function<GroupKey(const ResponseRecord&)>;

std::string to_string(const GroupKey& key);

struct GroupRow {
  GroupKey key;
  CarResult car;
};

/// Partition of the log by key, rows in ascending key order.
/// Throws InvalidArgument for an empty log.
std::vector<GroupRow> grouped_car(std::span<const ResponseRecord> log,
                                  const Grouping& grouping,
                                  double level = 0.95,
                                  IntervalMethod method = IntervalMethod::Wald);

namespace grouping {

Grouping by_position();
Grouping by_period();
Grouping by_item();
/// Items absent from the bank (or a null bank) map to section 0.
Grouping by_section(const ItemBank* bank);

}  // namespace grouping

/// Replays each examinee's sessions in log order through award_points.
/// Ledgers are returned in ascending examinee id.
std::vector<PointsLedger> ledgers_from_log(std::span<const ResponseRecord> log,
                                           std::uint64_t base_points = 1);

/// Points descending, ties by examinee id ascending, at most top_n rows.
std::vector<PointsLedger> leaderboard(std::span<const PointsLedger> ledgers,
                                      std::size_t top_n);

struct ItemStats {
  ItemId item_id = 0;
  SectionId section_id = 0;
  ItemParams params;
  std::size_t n_responses = 0;
  std::size_t n_correct = 0;
  double car = 0.0;
  double mu_all = 0.0;
  std::optional<double> mu_final;
};

/// One row per responded item in item_id order. Parameters and section come
/// from the bank when it has the item, otherwise from the log and section 0.
std::vector<ItemStats> per_item_report(std::span<const ResponseRecord> log,
                                       const ItemBank* bank, int k);

/// Round to `digits` decimals, ties to even.
double round_half_even(double value, int digits = 3);

/// round_half_even(value, 3) printed with exactly three decimals.
std::string display3(double value);

}  // namespace adaptest

#endif  // ADAPTEST_ANALYTICS_HPP
