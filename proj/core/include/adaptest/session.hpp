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

// Per-examinee adaptive test.
//
// Question 1 is drawn by ItemBank::pick_initial, question 2 by
// ItemBank::pick_second keyed on the first answer, and every later question
// by ItemBank::pick_nearest around the previous ability estimate. After each
// answer the ability is re-estimated over all answers so far.

#ifndef ADAPTEST_SESSION_HPP
#define ADAPTEST_SESSION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adaptest/ability.hpp"
#include "adaptest/item_bank.hpp"
#include "adaptest/random.hpp"

namespace adaptest {

inline constexpr int kMinSessionLength = 3;

struct SessionConfig {
  int k = 5;
  SectionId section = 0;
  Estimator estimator = Estimator::MAP;
  Prior prior;
  std::uint64_t seed = 0;
  int eap_nodes = kDefaultQuadratureNodes;

  /// Throws InvalidArgument if k < 3 or the prior is invalid.
  void validate() const;
};

struct TraceEntry {
  int position = 0;  // 1-based
  ItemId item_id = 0;
  ItemParams params;
  Outcome outcome = Outcome::Incorrect;
  double theta_hat = 0.0;
  SelectionRule rule = SelectionRule::NearestDifficulty;
};

struct SessionState {
  int position = 1;  // position of the current (unanswered) item
  UsedSet used;
  std::optional<Item> current_item;
  SelectionRule current_rule = SelectionRule::InitialRange;
  std::vector<TraceEntry> trace;
  bool finished = false;
};

struct SessionResult {
  AbilityEstimate final_estimate;
  std::vector<TraceEntry> trace;
  int correct_count = 0;
  int total_count = 0;  // includes abandoned items
};

/// One examinee working through k items of one section. Holds a pointer to
/// the bank, which must outlive the session. Not thread-safe; distinct
/// sessions share no mutable state.
class AdaptiveSession {
 public:
  /// Selects question 1. Throws InvalidArgument for a bad config or section
  /// and SelectionExhausted if the section has no eligible first item.
  AdaptiveSession(const ItemBank& bank, SessionConfig config);

  const SessionConfig& config() const noexcept { return config_; }
  const SessionState& state() const noexcept { return state_; }
  bool finished() const noexcept { return state_.finished; }

  /// Throws StateError once the session is finished.
  const Item& current_item() const;

  /// Records the answer to the current item, re-estimates ability and
  /// selects the next item unless k answers have been given.
  const TraceEntry& submit(Outcome outcome);

  /// Throws StateError unless finished.
  SessionResult result() const;

 private:
  void select_next();

  const ItemBank* bank_;
  SessionConfig config_;
  Rng rng_;
  SessionState state_;
  std::vector<Response> responses_;
  AbilityEstimate last_estimate_;
};

inline AdaptiveSession start_session(const ItemBank& bank,
                                     const SessionConfig& config) {
  return AdaptiveSession(bank, config);
}

// Point system: a session with every answer correct extends the streak s and
// earns base_points * 2^(s - 1); any other session resets the streak.

struct PointsLedger {
  std::int64_t examinee_id = 0;
  std::uint64_t points = 0;
  std::uint32_t consecutive_perfect_sessions = 0;
};

PointsLedger award_points(PointsLedger ledger,
                          std::span<const Outcome> session_outcomes,
                          std::uint64_t base_points);

/// Throws StateError if the session is unfinished.
PointsLedger award_points(PointsLedger ledger, const AdaptiveSession& session,
                          std::uint64_t base_points);

}  // namespace adaptest

#endif  // ADAPTEST_SESSION_HPP
