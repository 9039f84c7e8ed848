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

#include "adaptest/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "adaptest/errors.hpp"
#include "parallel.hpp"

namespace adaptest {

namespace {

// Stream purposes for derive_seed.
constexpr std::uint64_t kSelectionStream = 1;
constexpr std::uint64_t kOutcomeStream = 2;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p < 1.0; }

}  // namespace

std::vector<Examinee> generate_population(const PopulationConfig& config) {
  if (config.n < 1) throw InvalidArgument("population needs n >= 1");
  if (!std::isfinite(config.theta_mean) || !std::isfinite(config.theta_sd) ||
      !(config.theta_sd > 0.0)) {
    throw InvalidArgument("population needs finite mean and positive sd");
  }
  Rng rng(config.seed);
  std::vector<Examinee> out;
  out.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    out.push_back({static_cast<ExamineeId>(i + 1),
                   rng.normal(config.theta_mean, config.theta_sd)});
  }
  return out;
}

void BehaviorConfig::validate() const {
  if (!is_probability(guess_floor)) {
    throw InvalidArgument("guess_floor must be in [0, 1)");
  }
  // abandon_prob = 1 is accepted: every item is abandoned.
  if (!(is_probability(abandon_prob) || abandon_prob == 1.0)) {
    throw InvalidArgument("abandon_prob must be in [0, 1]");
  }
}

Outcome simulate_outcome(double true_theta, const ItemParams& item,
                         const BehaviorConfig& behavior, Rng& rng) {
  const double quit = rng.uniform();
  const double answer = rng.uniform();
  if (quit < behavior.abandon_prob) return Outcome::Abandoned;
  const double p = std::max(icc(true_theta, item), behavior.guess_floor);
  return answer < p ? Outcome::Correct : Outcome::Incorrect;
}

ResponseLog run_campaign(const ItemBank& bank,
                         std::span<const Examinee> population,
                         const SessionConfig& session_config,
                         const BehaviorConfig& behavior,
                         const CampaignOptions& options) {
  session_config.validate();
  behavior.validate();
  std::vector<SectionId> sections = options.sections;
  if (sections.empty()) sections.push_back(session_config.section);
  for (const auto s : sections) {
    if (!bank.has_section(s)) {
      throw InvalidArgument("unknown section " + std::to_string(s));
    }
  }

  std::vector<ResponseLog> per_examinee(population.size());
  detail::parallel_for(population.size(), options.threads, [&](std::size_t n) {
    const Examinee& who = population[n];
    auto& records = per_examinee[n];
    records.reserve(sections.size() *
                    static_cast<std::size_t>(session_config.k));
    for (std::size_t s = 0; s < sections.size(); ++s) {
      const auto stream = static_cast<std::uint64_t>(who.examinee_id);
      SessionConfig config = session_config;
      config.section = sections[s];
      config.seed = derive_seed(session_config.seed, stream,
                                kSelectionStream + 16 * s);
      Rng outcomes(derive_seed(session_config.seed, stream,
                               kOutcomeStream + 16 * s));
      AdaptiveSession session(bank, config);
      while (!session.finished()) {
        session.submit(simulate_outcome(
            who.true_theta, session.current_item().params, behavior, outcomes));
      }
      auto rows = session_records(session, who.examinee_id,
                                  static_cast<std::int64_t>(s + 1),
                                  options.period_tag);
      records.insert(records.end(), rows.begin(), rows.end());
    }
  });

  ResponseLog log;
  log.reserve(population.size() * sections.size() *
              static_cast<std::size_t>(session_config.k));
  for (auto& records : per_examinee) {
    std::move(records.begin(), records.end(), std::back_inserter(log));
  }
  return log;
}

}  // namespace adaptest
