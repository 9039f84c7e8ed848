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

#include <algorithm>
#include <limits>
#include <string>

#include "adaptest/errors.hpp"

namespace adaptest {

void SessionConfig::validate() const {
  if (k < kMinSessionLength) {
    throw InvalidArgument("session length k must be at least " +
                          std::to_string(kMinSessionLength) + ", got " +
                          std::to_string(k));
  }
  adaptest::validate(prior);
  if (estimator == Estimator::EAP && eap_nodes < kMinQuadratureNodes) {
    throw InvalidArgument("EAP needs at least " +
                          std::to_string(kMinQuadratureNodes) + " nodes");
  }
}

AdaptiveSession::AdaptiveSession(const ItemBank& bank, SessionConfig config)
    : bank_(&bank), config_(config), rng_(config.seed) {
  config_.validate();
  const auto section_size = bank_->section(config_.section).size();
  if (section_size < static_cast<std::size_t>(config_.k)) {
    throw SelectionExhausted(
        "section " + std::to_string(config_.section) + " has " +
        std::to_string(section_size) + " items, fewer than k = " +
        std::to_string(config_.k));
  }
  const auto first = bank_->pick_initial(config_.section, rng_);
  state_.current_item = first.item;
  state_.current_rule = first.rule;
  responses_.reserve(static_cast<std::size_t>(config_.k));
  state_.trace.reserve(static_cast<std::size_t>(config_.k));
}

const Item& AdaptiveSession::current_item() const {
  if (state_.finished || !state_.current_item) {
    throw StateError("session is finished; no current item");
  }
  return *state_.current_item;
}

const TraceEntry& AdaptiveSession::submit(Outcome outcome) {
  const Item item = current_item();
  responses_.push_back({outcome, item.params});
  last_estimate_ = estimate(responses_, config_.prior, config_.estimator,
                            config_.eap_nodes);

  state_.used.insert(item.item_id);
  state_.trace.push_back({state_.position, item.item_id, item.params, outcome,
                          last_estimate_.value, state_.current_rule});
  state_.current_item.reset();

  if (static_cast<int>(state_.trace.size()) == config_.k) {
    state_.finished = true;
  } else {
    ++state_.position;
    select_next();
  }
  return state_.trace.back();
}

void AdaptiveSession::select_next() {
  const Selection next =
      state_.position == 2
          ? bank_->pick_second(config_.section,
                               score(state_.trace.front().outcome) == 1,
                               state_.used, rng_)
          : bank_->pick_nearest(config_.section, last_estimate_.value,
                                state_.used, rng_);
  state_.current_item = next.item;
  state_.current_rule = next.rule;
}

SessionResult AdaptiveSession::result() const {
  if (!state_.finished) throw StateError("session is not finished");
  SessionResult out;
  out.final_estimate = last_estimate_;
  out.trace = state_.trace;
  out.total_count = static_cast<int>(state_.trace.size());
  out.correct_count = static_cast<int>(
      std::count_if(state_.trace.begin(), state_.trace.end(),
                    [](const TraceEntry& e) { return score(e.outcome) == 1; }));
  return out;
}

PointsLedger award_points(PointsLedger ledger,
                          std::span<const Outcome> session_outcomes,
                          std::uint64_t base_points) {
  if (base_points == 0) throw InvalidArgument("base_points must be positive");
  const bool perfect =
      !session_outcomes.empty() &&
      std::all_of(session_outcomes.begin(), session_outcomes.end(),
                  [](Outcome o) { return o == Outcome::Correct; });
  if (!perfect) {
    ledger.consecutive_perfect_sessions = 0;
    return ledger;
  }
  ++ledger.consecutive_perfect_sessions;
  // Saturate rather than wrap once the doubling leaves 64 bits.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const unsigned shift = ledger.consecutive_perfect_sessions - 1;
  std::uint64_t award = kMax;
  if (shift < 64 && base_points <= (kMax >> shift)) {
    award = base_points << shift;
  }
  ledger.points = (ledger.points > kMax - award) ? kMax : ledger.points + award;
  return ledger;
}

PointsLedger award_points(PointsLedger ledger, const AdaptiveSession& session,
                          std::uint64_t base_points) {
  if (!session.finished()) {
    throw StateError("points are awarded only for finished sessions");
  }
  std::vector<Outcome> outcomes;
  outcomes.reserve(session.state().trace.size());
  for (const auto& entry : session.state().trace) {
    outcomes.push_back(entry.outcome);
  }
  return award_points(ledger, outcomes, base_points);
}

}  // namespace adaptest
