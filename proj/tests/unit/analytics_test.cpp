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

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "adaptest/errors.hpp"

namespace adaptest {
namespace {

ResponseRecord record(ExamineeId who, int position, ItemId item, double b,
                      Outcome outcome, double theta,
                      std::int64_t session = 1, std::string period = "p") {
  return {who, session, position, item, {1.0, b}, outcome, theta, period};
}

TEST(Car, Values) {
  EXPECT_EQ(display3(car(48829, 138143)), "0.353");
  EXPECT_EQ(car(0, 17), 0.0);
  EXPECT_EQ(car(17, 17), 1.0);
  EXPECT_THROW(car(0, 0), InvalidArgument);
  EXPECT_THROW(car(5, 4), InvalidArgument);
}

TEST(CarCi, ReferenceInterval) {
  const auto ci = car_ci(48829, 138143, 0.95);
  EXPECT_EQ(display3(ci.low), "0.351");
  EXPECT_EQ(display3(ci.high), "0.356");
  // Unrounded bounds computed offline at 30 digits.
  EXPECT_NEAR(ci.low, 0.350946, 5e-7);
  EXPECT_NEAR(ci.high, 0.355988, 5e-7);
}

TEST(CarCi, HandComputedCases) {
  const auto zero = car_ci(0, 50, 0.95);
  EXPECT_EQ(zero.low, 0.0);
  EXPECT_EQ(zero.high, 0.0);
  const auto half = car_ci(500, 1000, 0.95);
  EXPECT_EQ(display3(half.low), "0.469");
  EXPECT_EQ(display3(half.high), "0.531");
  EXPECT_NEAR(z_for_level(0.95), 1.959963984540054, 1e-12);
  EXPECT_THROW(car_ci(1, 0, 0.95), InvalidArgument);
  EXPECT_THROW(z_for_level(1.0), InvalidArgument);
}

TEST(CarCi, WidthShrinksWithRootN) {
  const double w2 = car_ci(30, 100).high - car_ci(30, 100).low;
  const double w4 = car_ci(3000, 10000).high - car_ci(3000, 10000).low;
  const double w6 =
      car_ci(300000, 1000000).high - car_ci(300000, 1000000).low;
  EXPECT_NEAR(w2 / w4, 10.0, 1e-9);
  EXPECT_NEAR(w4 / w6, 10.0, 1e-9);
}

TEST(CarCi, Wilson) {
  const auto ci = car_ci(0, 50, 0.95, IntervalMethod::Wilson);
  EXPECT_NEAR(ci.low, 0.0, 1e-15);
  EXPECT_GT(ci.high, 0.0);
  const auto big = car_ci(48829, 138143, 0.95, IntervalMethod::Wilson);
  EXPECT_EQ(display3(big.low), "0.351");
  EXPECT_EQ(display3(big.high), "0.356");
}

TEST(CarResult, Fields) {
  const auto r = car_result(300, 1000);
  EXPECT_DOUBLE_EQ(r.rate, 0.3);
  EXPECT_NEAR(r.sd, 0.0144914, 1e-7);
  EXPECT_LE(r.ci_low, r.rate);
  EXPECT_GE(r.ci_high, r.rate);
}

TEST(MuAll, Means) {
  const ResponseLog log{record(1, 1, 7, 0.0, Outcome::Correct, 0.2),
                        record(2, 3, 7, 0.0, Outcome::Incorrect, 0.4),
                        record(2, 1, 8, 0.0, Outcome::Correct, -0.7)};
  EXPECT_NEAR(mu_all(log, 7), 0.3, 1e-15);
  EXPECT_EQ(mu_all(log, 8), -0.7);
  EXPECT_THROW(mu_all(log, 9), InvalidArgument);
}

TEST(MuFinal, Means) {
  const ResponseLog log{record(1, 1, 7, 0.0, Outcome::Correct, 0.2),
                        record(1, 5, 8, 0.0, Outcome::Correct, 1.1),
                        record(2, 4, 7, 0.0, Outcome::Correct, 0.9)};
  EXPECT_FALSE(mu_final(log, 7, 5).has_value());
  EXPECT_EQ(mu_final(log, 8, 5), 1.1);
  const ResponseLog finals{record(1, 5, 7, 0.0, Outcome::Correct, 0.2),
                           record(2, 5, 7, 0.0, Outcome::Correct, 0.5),
                           record(3, 5, 8, 0.0, Outcome::Correct, -1.0)};
  for (ItemId id : {7, 8}) {
    EXPECT_EQ(mu_final(finals, id, 5), mu_all(finals, id));
  }
}

TEST(MuAll, StreamingMatchesBatch) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> dist(0.3, 1.2);
  ResponseLog log;
  RunningMean running;
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = dist(gen);
    log.push_back(record(i, 1, 1, 0.0, Outcome::Correct, t));
    running.add(t);
    sum += t;
  }
  EXPECT_NEAR(running.mean(), sum / 10000.0, 1e-12);
  EXPECT_NEAR(mu_all(log, 1), sum / 10000.0, 1e-12);
}

TEST(Pearson, Values) {
  const std::vector<std::pair<double, double>> up{{1, 2}, {2, 4}, {3, 6}};
  const std::vector<std::pair<double, double>> down{{1, -1}, {2, -2}, {3, -3}};
  EXPECT_NEAR(pearson(up), 1.0, 1e-15);
  EXPECT_NEAR(pearson(down), -1.0, 1e-15);
  const std::vector<std::pair<double, double>> flat{{1, 2}, {2, 2}};
  EXPECT_THROW(pearson(flat), UndefinedCorrelation);
  EXPECT_THROW(pearson(std::vector<std::pair<double, double>>{{1, 2}}),
               UndefinedCorrelation);
}

TEST(Pearson, AffineInvariant) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> dist;
  std::vector<std::pair<double, double>> pairs, moved;
  for (int i = 0; i < 50; ++i) {
    const double x = dist(gen);
    const double y = 0.5 * x + dist(gen);
    pairs.emplace_back(x, y);
    moved.emplace_back(2.5 * x - 3.0, 2.5 * y - 3.0);
  }
  EXPECT_NEAR(pearson(pairs), pearson(moved), 1e-12);
}

TEST(DifficultyAbilityCorrelation, UsesSectionItems) {
  const ItemBank bank({{1, 1, {1.0, -1.0}}, {2, 1, {1.0, 0.0}},
                       {3, 1, {1.0, 1.0}}, {4, 2, {1.0, 5.0}}});
  const ResponseLog log{record(1, 1, 1, -1.0, Outcome::Correct, -2.0),
                        record(1, 2, 2, 0.0, Outcome::Correct, 0.0),
                        record(1, 3, 3, 1.0, Outcome::Correct, 2.0),
                        record(1, 4, 4, 5.0, Outcome::Correct, -9.0)};
  EXPECT_NEAR(difficulty_ability_correlation(log, bank, 1), 1.0, 1e-12);
  EXPECT_THROW(difficulty_ability_correlation(log, bank, 2),
               UndefinedCorrelation);
}

ResponseLog campaign_like_log() {
  ResponseLog log;
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.4);
  for (ExamineeId who = 1; who <= 100; ++who) {
    for (int position = 1; position <= 5; ++position) {
      const ItemId item = 1 + (who * 7 + position) % 9;
      log.push_back(record(who, position, item, 0.1 * item,
                           coin(gen) ? Outcome::Correct : Outcome::Incorrect,
                           0.01 * who, 1, who % 3 ? "before" : "after"));
    }
  }
  return log;
}

TEST(GroupedCar, ByPositionPartitions) {
  const auto log = campaign_like_log();
  const auto rows = grouped_car(log, grouping::by_position());
  ASSERT_EQ(rows.size(), 5u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(std::get<std::int64_t>(rows[i].key),
              static_cast<std::int64_t>(i + 1));
    EXPECT_EQ(rows[i].car.total, 100u);
    total += rows[i].car.total;
  }
  EXPECT_EQ(total, log.size());
}

TEST(GroupedCar, OtherKeysPartition) {
  const auto log = campaign_like_log();
  std::vector<Item> items;
  for (ItemId id = 1; id <= 9; ++id) items.push_back({id, id <= 4 ? 1 : 2, {1.0, 0.1 * id}});
  const ItemBank bank(items);
  for (const auto& g : {grouping::by_period(), grouping::by_item(),
                        grouping::by_section(&bank),
                        grouping::by_section(nullptr)}) {
    std::size_t total = 0;
    for (const auto& row : grouped_car(log, g)) total += row.car.total;
    EXPECT_EQ(total, log.size());
  }
  const auto periods = grouped_car(log, grouping::by_period());
  ASSERT_EQ(periods.size(), 2u);
  EXPECT_EQ(to_string(periods[0].key), "after");
  EXPECT_EQ(grouped_car(log, grouping::by_section(&bank)).size(), 2u);
  EXPECT_THROW(grouped_car(ResponseLog{}, grouping::by_item()),
               InvalidArgument);
}

TEST(GroupedCar, SingleGroupHandCase) {
  ResponseLog log;
  for (int i = 0; i < 1000; ++i) {
    log.push_back(record(i, 1, 1, 0.0,
                         i < 300 ? Outcome::Correct : Outcome::Abandoned, 0.0));
  }
  const auto rows = grouped_car(log, grouping::by_item());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(display3(rows[0].car.rate), "0.300");
  EXPECT_NEAR(rows[0].car.sd, 0.0145, 5e-5);
}

TEST(Leaderboard, Ordering) {
  const std::vector<PointsLedger> ledgers{{1, 5, 0}, {2, 9, 0}, {3, 1, 0}};
  const auto top = leaderboard(ledgers, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].points, 9u);
  EXPECT_EQ(top[1].points, 5u);
  const std::vector<PointsLedger> tie{{2, 7, 0}, {1, 7, 0}};
  EXPECT_EQ(leaderboard(tie, 5).front().examinee_id, 1);
  EXPECT_EQ(leaderboard(ledgers, 10).size(), 3u);
  EXPECT_THROW(leaderboard(ledgers, 0), InvalidArgument);
}

TEST(LedgersFromLog, ReplaysSessionsInOrder) {
  ResponseLog log;
  auto session = [&](ExamineeId who, std::int64_t id, bool perfect) {
    for (int p = 1; p <= 3; ++p) {
      const bool ok = perfect || p != 2;
      log.push_back(record(who, p, p, 0.0,
                           ok ? Outcome::Correct : Outcome::Incorrect, 0.0, id));
    }
  };
  session(4, 1, true);
  session(4, 2, true);
  session(4, 3, true);
  session(2, 1, true);
  session(2, 2, false);
  session(2, 3, true);
  const auto ledgers = ledgers_from_log(log);
  ASSERT_EQ(ledgers.size(), 2u);
  EXPECT_EQ(ledgers[0].examinee_id, 2);
  EXPECT_EQ(ledgers[0].points, 2u);
  EXPECT_EQ(ledgers[0].consecutive_perfect_sessions, 1u);
  EXPECT_EQ(ledgers[1].points, 7u);
  EXPECT_EQ(ledgers_from_log(log, 3)[1].points, 21u);
}

TEST(PerItemReport, RowsAndConsistency) {
  const auto log = campaign_like_log();
  const auto rows = per_item_report(log, nullptr, 5);
  ASSERT_EQ(rows.size(), 9u);
  std::size_t correct = 0, total = 0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].item_id, static_cast<ItemId>(i + 1));
    EXPECT_EQ(rows[i].car, car(rows[i].n_correct, rows[i].n_responses));
    EXPECT_NEAR(rows[i].mu_all, mu_all(log, rows[i].item_id), 1e-12);
    EXPECT_EQ(rows[i].mu_final.has_value(),
              mu_final(log, rows[i].item_id, 5).has_value());
    correct += rows[i].n_correct;
    total += rows[i].n_responses;
    weighted += rows[i].car * static_cast<double>(rows[i].n_responses);
  }
  const auto all = grouped_car(log, grouping::by_section(nullptr));
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(static_cast<double>(correct) / static_cast<double>(total),
            all[0].car.rate);
  EXPECT_NEAR(weighted / static_cast<double>(total), all[0].car.rate, 1e-12);
  EXPECT_THROW(per_item_report(ResponseLog{}, nullptr, 5), InvalidArgument);
}

TEST(PerItemReport, ThreeItems) {
  const ItemBank bank({{1, 4, {1.3, 0.2}}, {2, 4, {1.0, 0.0}},
                       {3, 4, {1.0, 0.5}}});
  const ResponseLog log{record(1, 1, 2, 0.0, Outcome::Correct, 0.5),
                        record(1, 2, 3, 0.5, Outcome::Incorrect, 0.1),
                        record(1, 3, 1, 0.2, Outcome::Correct, 0.3),
                        record(1, 4, 99, 1.5, Outcome::Correct, 0.6)};
  const auto rows = per_item_report(log, &bank, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].params.a, 1.3);
  EXPECT_EQ(rows[0].section_id, 4);
  EXPECT_EQ(rows[3].section_id, 0);
  EXPECT_EQ(rows[3].params.b, 1.5);
  EXPECT_EQ(rows[3].mu_final, 0.6);
}

TEST(Rounding, HalfEven) {
  EXPECT_EQ(round_half_even(0.5, 0), 0.0);
  EXPECT_EQ(round_half_even(1.5, 0), 2.0);
  EXPECT_EQ(round_half_even(2.5, 0), 2.0);
  EXPECT_EQ(round_half_even(-2.5, 0), -2.0);
  EXPECT_EQ(display3(0.0625), "0.062");
  EXPECT_EQ(display3(0.1875), "0.188");
  EXPECT_EQ(display3(-0.0001), "0.000");
  EXPECT_EQ(display3(0.35346706), "0.353");
}

}  // namespace
}  // namespace adaptest
