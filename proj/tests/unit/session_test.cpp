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


#include "adaptest/session.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "adaptest/errors.hpp"

namespace adaptest {
namespace {

// Section 1: one default item plus a spread of difficulties.
ItemBank spread_bank() {
  std::vector<Item> items{{1, 1, {1.0, 0.0}}};
  for (int i = 0; i < 48; ++i) {
    items.push_back({10 + i, 1, {0.8 + 0.01 * i, -2.4 + 0.1 * i}});
  }
  return ItemBank(items);
}

SessionConfig config_with(int k, std::uint64_t seed = 17) {
  SessionConfig c;
  c.k = k;
  c.section = 1;
  c.seed = seed;
  return c;
}

std::vector<Outcome> run(AdaptiveSession& s, const std::vector<Outcome>& script) {
  for (Outcome o : script) s.submit(o);
  return script;
}

TEST(StartSession, DefaultItemIsFirst) {
  const auto bank = spread_bank();
  const auto s = start_session(bank, config_with(5));
  EXPECT_EQ(s.current_item().item_id, 1);
  EXPECT_EQ(s.state().position, 1);
  EXPECT_TRUE(s.state().trace.empty());
  EXPECT_FALSE(s.finished());
}

TEST(StartSession, Validation) {
  const auto bank = spread_bank();
  EXPECT_THROW(start_session(bank, config_with(2)), InvalidArgument);
  auto bad_prior = config_with(5);
  bad_prior.prior.sd = 0.0;
  EXPECT_THROW(start_session(bank, bad_prior), InvalidArgument);
  auto missing = config_with(5);
  missing.section = 42;
  EXPECT_THROW(start_session(bank, missing), InvalidArgument);
  EXPECT_THROW(start_session(bank, config_with(50)), SelectionExhausted);
}

TEST(StartSession, SameSeedSameFirstItem) {
  std::vector<Item> items;
  for (int i = 0; i < 10; ++i) items.push_back({i, 1, {1.2, -0.2 + 0.04 * i}});
  const ItemBank bank(items);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(start_session(bank, config_with(5, seed)).current_item().item_id,
              start_session(bank, config_with(5, seed)).current_item().item_id);
  }
}

TEST(Submit, SecondItemFollowsFirstAnswer) {
  const auto bank = spread_bank();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto up = start_session(bank, config_with(5, seed));
    up.submit(Outcome::Correct);
    EXPECT_GE(up.current_item().params.b, 0.5);
    EXPECT_LE(up.current_item().params.b, 1.0);
    EXPECT_EQ(up.state().current_rule, SelectionRule::HarderRange);

    auto down = start_session(bank, config_with(5, seed));
    down.submit(Outcome::Abandoned);
    EXPECT_GE(down.current_item().params.b, -1.0);
    EXPECT_LE(down.current_item().params.b, -0.5);
    EXPECT_EQ(down.state().current_rule, SelectionRule::EasierRange);
  }
}

TEST(Submit, TraceMatchesSequentialEstimates) {
  const auto bank = spread_bank();
  for (Estimator method : {Estimator::MAP, Estimator::EAP}) {
    auto config = config_with(7);
    config.estimator = method;
    auto s = start_session(bank, config);
    run(s, {Outcome::Correct, Outcome::Incorrect, Outcome::Correct,
            Outcome::Abandoned, Outcome::Correct, Outcome::Correct,
            Outcome::Incorrect});
    std::vector<Response> responses;
    for (const auto& e : s.state().trace) {
      responses.push_back({e.outcome, e.params});
    }
    const auto trace = sequential_trace(responses, config.prior, method);
    ASSERT_EQ(trace.size(), 7u);
    for (std::size_t l = 0; l < trace.size(); ++l) {
      EXPECT_NEAR(s.state().trace[l].theta_hat, trace[l].value, 1e-12);
      EXPECT_EQ(s.state().trace[l].position, static_cast<int>(l + 1));
    }
  }
}

TEST(Submit, LaterItemsAreNearestUnused) {
  const auto bank = spread_bank();
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.5);
  for (int rep = 0; rep < 200; ++rep) {
    auto s = start_session(bank, config_with(10, rep));
    UsedSet used;
    double last_theta = 0.0;
    while (!s.finished()) {
      const Item item = s.current_item();
      EXPECT_FALSE(used.contains(item.item_id));
      if (s.state().position >= 3) {
        for (const auto& other : bank.section(1)) {
          if (used.contains(other.item_id)) continue;
          EXPECT_LE(std::abs(item.params.b - last_theta),
                    std::abs(other.params.b - last_theta));
        }
      }
      used.insert(item.item_id);
      last_theta = s.submit(coin(gen) ? Outcome::Correct : Outcome::Incorrect)
                       .theta_hat;
    }
    EXPECT_EQ(s.state().used.size(), 10u);
  }
}

TEST(Submit, CorrectNeverLeadsToEasierNextItemThanIncorrect) {
  const auto bank = spread_bank();
  std::mt19937_64 gen(8);
  std::bernoulli_distribution coin(0.5);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Outcome> prefix;
    for (int i = 0; i < 2 + rep % 4; ++i) {
      prefix.push_back(coin(gen) ? Outcome::Correct : Outcome::Incorrect);
    }
    auto up = start_session(bank, config_with(8, rep));
    auto down = start_session(bank, config_with(8, rep));
    run(up, prefix);
    run(down, prefix);
    up.submit(Outcome::Correct);
    down.submit(Outcome::Incorrect);
    EXPECT_GE(up.current_item().params.b, down.current_item().params.b);
  }
}

TEST(Submit, FinishedSessionRejectsInput) {
  const auto bank = spread_bank();
  auto s = start_session(bank, config_with(3));
  EXPECT_THROW(s.result(), StateError);
  run(s, {Outcome::Correct, Outcome::Correct, Outcome::Correct});
  EXPECT_TRUE(s.finished());
  EXPECT_FALSE(s.state().current_item.has_value());
  EXPECT_THROW(s.current_item(), StateError);
  EXPECT_THROW(s.submit(Outcome::Correct), StateError);
}

TEST(Submit, ReproducibleForSeedAndScript) {
  const auto bank = spread_bank();
  const std::vector<Outcome> script{Outcome::Incorrect, Outcome::Correct,
                                    Outcome::Correct, Outcome::Incorrect,
                                    Outcome::Correct};
  auto x = start_session(bank, config_with(5, 99));
  auto y = start_session(bank, config_with(5, 99));
  run(x, script);
  run(y, script);
  for (std::size_t i = 0; i < script.size(); ++i) {
    EXPECT_EQ(x.state().trace[i].item_id, y.state().trace[i].item_id);
    EXPECT_EQ(x.state().trace[i].theta_hat, y.state().trace[i].theta_hat);
  }
}

TEST(SessionResult, Counts) {
  const auto bank = spread_bank();
  auto perfect = start_session(bank, config_with(5));
  run(perfect, std::vector<Outcome>(5, Outcome::Correct));
  auto r = perfect.result();
  EXPECT_EQ(r.correct_count, 5);
  EXPECT_EQ(r.total_count, 5);

  auto mixed = start_session(bank, config_with(5));
  run(mixed, {Outcome::Correct, Outcome::Abandoned, Outcome::Correct,
              Outcome::Correct, Outcome::Correct});
  r = mixed.result();
  EXPECT_EQ(r.total_count, 5);
  EXPECT_EQ(r.correct_count, 4);

  std::vector<Response> all;
  for (const auto& e : r.trace) all.push_back({e.outcome, e.params});
  EXPECT_NEAR(r.final_estimate.value, estimate_map(all).value, 1e-12);
  EXPECT_EQ(r.final_estimate.value, r.trace.back().theta_hat);
  EXPECT_EQ(r.final_estimate.n_responses, 5u);
}

TEST(AwardPoints, DoublingStreak) {
  const std::vector<Outcome> perfect(5, Outcome::Correct);
  const std::vector<Outcome> slip{Outcome::Correct, Outcome::Incorrect,
                                  Outcome::Correct, Outcome::Correct,
                                  Outcome::Correct};
  PointsLedger ledger{7, 0, 0};
  ledger = award_points(ledger, perfect, 1);
  EXPECT_EQ(ledger.points, 1u);
  ledger = award_points(ledger, perfect, 1);
  EXPECT_EQ(ledger.points, 3u);
  ledger = award_points(ledger, perfect, 1);
  EXPECT_EQ(ledger.points, 7u);  // third in a row is worth 4
  EXPECT_EQ(ledger.consecutive_perfect_sessions, 3u);
  ledger = award_points(ledger, slip, 1);
  EXPECT_EQ(ledger.points, 7u);
  EXPECT_EQ(ledger.consecutive_perfect_sessions, 0u);
  ledger = award_points(ledger, perfect, 10);
  EXPECT_EQ(ledger.points, 17u);
  EXPECT_EQ(ledger.examinee_id, 7);
}

TEST(AwardPoints, AbandonedBreaksStreakAndBaseMustBePositive) {
  PointsLedger ledger{1, 5, 2};
  const std::vector<Outcome> quit{Outcome::Correct, Outcome::Abandoned,
                                  Outcome::Correct};
  ledger = award_points(ledger, quit, 1);
  EXPECT_EQ(ledger.points, 5u);
  EXPECT_EQ(ledger.consecutive_perfect_sessions, 0u);
  EXPECT_THROW(award_points(ledger, quit, 0), InvalidArgument);
}

TEST(AwardPoints, SaturatesInsteadOfWrapping) {
  PointsLedger ledger{1, 0, 70};
  const std::vector<Outcome> perfect(3, Outcome::Correct);
  ledger = award_points(ledger, perfect, 1);
  EXPECT_EQ(ledger.points, std::numeric_limits<std::uint64_t>::max());
  const auto again = award_points(ledger, perfect, 1);
  EXPECT_GE(again.points, ledger.points);
}

TEST(AwardPoints, FromSession) {
  const auto bank = spread_bank();
  auto s = start_session(bank, config_with(3));
  EXPECT_THROW(award_points({}, s, 1), StateError);
  run(s, std::vector<Outcome>(3, Outcome::Correct));
  EXPECT_EQ(award_points({}, s, 2).points, 2u);
}

}  // namespace
}  // namespace adaptest
