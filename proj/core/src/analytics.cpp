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

#include "adaptest/analytics.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include <boost/math/distributions/normal.hpp>

#include "adaptest/errors.hpp"

namespace adaptest {

namespace {

void check_counts(std::size_t correct, std::size_t total) {
  if (total == 0) throw InvalidArgument("CAR needs at least one response");
  if (correct > total) {
    throw InvalidArgument("correct count exceeds total count");
  }
}

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
  RunningMean theta;
};

}  // namespace

double car(std::size_t correct, std::size_t total) {
  check_counts(correct, total);
  return static_cast<double>(correct) / static_cast<double>(total);
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("confidence level must be in (0, 1)");
  }
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + 0.5 * level);
}

Interval car_ci(std::size_t correct, std::size_t total, double level,
                IntervalMethod method) {
  const double p = car(correct, total);
  const double n = static_cast<double>(total);
  const double z = z_for_level(level);
  if (method == IntervalMethod::Wald) {
    const double half = z * std::sqrt(p * (1.0 - p) / n);
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
  }
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

CarResult car_result(std::size_t correct, std::size_t total, double level,
                     IntervalMethod method) {
  CarResult out;
  out.correct = correct;
  out.total = total;
  out.rate = car(correct, total);
  const auto ci = car_ci(correct, total, level, method);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  out.sd = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(total));
  return out;
}

double mu_all(std::span<const ResponseRecord> log, ItemId item_id) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : log) {
    if (r.item_id != item_id) continue;
    sum += r.theta_after;
    ++n;
  }
  if (n == 0) {
    throw InvalidArgument("item " + std::to_string(item_id) +
                          " has no records");
  }
  return sum / static_cast<double>(n);
}

std::optional<double> mu_final(std::span<const ResponseRecord> log,
                               ItemId item_id, int k) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : log) {
    if (r.item_id != item_id || r.position != k) continue;
    sum += r.theta_after;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double pearson(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw UndefinedCorrelation("correlation needs at least two points");
  }
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw UndefinedCorrelation("correlation undefined for zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double difficulty_ability_correlation(std::span<const ResponseRecord> log,
                                      const ItemBank& bank,
                                      SectionId section) {
  std::map<ItemId, std::pair<double, RunningMean>> items;
  for (const auto& r : log) {
    const Item* item = bank.find(r.item_id);
    if (item == nullptr || item->section_id != section) continue;
    auto& [b, mean] = items[r.item_id];
    b = r.params.b;
    mean.add(r.theta_after);
  }
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(items.size());
  for (const auto& [id, entry] : items) {
    pairs.emplace_back(entry.first, entry.second.mean());
  }
  return pearson(pairs);
}

std::string to_string(const GroupKey& key) {
  if (const auto* i = std::get_if<std::int64_t>(&key)) {
    return std::to_string(*i);
  }
  return std::get<std::string>(key);
}

std::vector<GroupRow> grouped_car(std::span<const ResponseRecord> log,
                                  const Grouping& grouping, double level,
                                  IntervalMethod method) {
  if (log.empty()) throw InvalidArgument("grouped CAR needs a nonempty log");
  std::map<GroupKey, std::pair<std::size_t, std::size_t>> tallies;
  for (const auto& r : log) {
    auto& [correct, total] = tallies[grouping(r)];
    correct += static_cast<std::size_t>(score(r.outcome));
    ++total;
  }
  std::vector<GroupRow> rows;
  rows.reserve(tallies.size());
  for (const auto& [key, counts] : tallies) {
    rows.push_back({key, car_result(counts.first, counts.second, level, method)});
  }
  return rows;
}

namespace grouping {

Grouping by_position() {
  return [](const ResponseRecord& r) -> GroupKey {
    return static_cast<std::int64_t>(r.position);
  };
}

Grouping by_period() {
  return [](const ResponseRecord& r) -> GroupKey { return r.period_tag; };
}

Grouping by_item() {
  return [](const ResponseRecord& r) -> GroupKey { return r.item_id; };
}

Grouping by_section(const ItemBank* bank) {
  return [bank](const ResponseRecord& r) -> GroupKey {
    if (bank == nullptr) return std::int64_t{0};
    const Item* item = bank->find(r.item_id);
    return item == nullptr ? std::int64_t{0} : item->section_id;
  };
}

}  // namespace grouping

std::vector<PointsLedger> ledgers_from_log(std::span<const ResponseRecord> log,
                                           std::uint64_t base_points) {
  // Sessions keep first-appearance order per examinee; outcomes within a
  // session are ordered by position.
  struct SessionOutcomes {
    std::vector<std::pair<int, Outcome>> answers;
  };
  std::map<ExamineeId, std::vector<std::int64_t>> session_order;
  std::map<std::pair<ExamineeId, std::int64_t>, SessionOutcomes> sessions;
  for (const auto& r : log) {
    const auto key = std::make_pair(r.examinee_id, r.session_id);
    auto [it, inserted] = sessions.try_emplace(key);
    if (inserted) session_order[r.examinee_id].push_back(r.session_id);
    it->second.answers.emplace_back(r.position, r.outcome);
  }
  std::vector<PointsLedger> ledgers;
  ledgers.reserve(session_order.size());
  for (const auto& [examinee, order] : session_order) {
    PointsLedger ledger{examinee, 0, 0};
    for (const auto session_id : order) {
      auto answers = sessions.at({examinee, session_id}).answers;
      std::sort(answers.begin(), answers.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      std::vector<Outcome> outcomes;
      outcomes.reserve(answers.size());
      for (const auto& [position, outcome] : answers) {
        outcomes.push_back(outcome);
      }
      ledger = award_points(ledger, outcomes, base_points);
    }
    ledgers.push_back(ledger);
  }
  return ledgers;
}

std::vector<PointsLedger> leaderboard(std::span<const PointsLedger> ledgers,
                                      std::size_t top_n) {
  if (top_n < 1) throw InvalidArgument("leaderboard needs top_n >= 1");
  std::vector<PointsLedger> ranked(ledgers.begin(), ledgers.end());
  std::sort(ranked.begin(), ranked.end(),
            [](const PointsLedger& x, const PointsLedger& y) {
              return std::tie(y.points, x.examinee_id) <
                     std::tie(x.points, y.examinee_id);
            });
  if (ranked.size() > top_n) ranked.resize(top_n);
  return ranked;
}

std::vector<ItemStats> per_item_report(std::span<const ResponseRecord> log,
                                       const ItemBank* bank, int k) {
  if (log.empty()) throw InvalidArgument("item report needs a nonempty log");
  struct Accumulator {
    ItemParams params;
    std::size_t correct = 0;
    std::size_t total = 0;
    RunningMean all;
    RunningMean final;
  };
  std::map<ItemId, Accumulator> items;
  for (const auto& r : log) {
    auto& acc = items[r.item_id];
    acc.params = r.params;
    acc.correct += static_cast<std::size_t>(score(r.outcome));
    ++acc.total;
    acc.all.add(r.theta_after);
    if (r.position == k) acc.final.add(r.theta_after);
  }
  std::vector<ItemStats> rows;
  rows.reserve(items.size());
  for (const auto& [id, acc] : items) {
    ItemStats row;
    row.item_id = id;
    row.params = acc.params;
    if (const Item* item = bank ? bank->find(id) : nullptr) {
      row.section_id = item->section_id;
      row.params = item->params;
    }
    row.n_responses = acc.total;
    row.n_correct = acc.correct;
    row.car = car(acc.correct, acc.total);
    row.mu_all = acc.all.mean();
    if (acc.final.count() > 0) row.mu_final = acc.final.mean();
    rows.push_back(row);
  }
  return rows;
}

double round_half_even(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double rounded = std::nearbyint(value * scale) / scale;
  std::fesetround(saved);
  return rounded;
}

std::string display3(double value) {
  char buffer[64];
  double rounded = round_half_even(value, 3);
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0
  std::snprintf(buffer, sizeof buffer, "%.3f", rounded);
  return buffer;
}

}  // namespace adaptest
