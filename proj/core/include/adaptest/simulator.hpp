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

#ifndef ADAPTEST_SIMULATOR_HPP
#define ADAPTEST_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adaptest/item_bank.hpp"
#include "adaptest/random.hpp"
#include "adaptest/response_log.hpp"
#include "adaptest/session.hpp"

namespace adaptest {

struct PopulationConfig {
  std::size_t n = 1;
  double theta_mean = 0.0;
  double theta_sd = 1.0;
  std::uint64_t seed = 0;
};

struct Examinee {
  ExamineeId examinee_id = 0;
  double true_theta = 0.0;
};

/// n draws from Normal(theta_mean, theta_sd); ids run 1..n.
std::vector<Examinee> generate_population(const PopulationConfig& config);

/// Simulated examinee behaviour on top of the response model.
struct BehaviorConfig {
  /// Lower bound on the probability of a correct answer (blind guessing).
  double guess_floor = 0.01;
  /// Probability of quitting an item, independent of ability and item;
  /// in [0, 1].
  double abandon_prob = 0.0;

  void validate() const;
};

/// Abandoned with probability abandon_prob; otherwise Correct with
/// probability max(icc(true_theta, item), guess_floor). Always consumes
/// exactly two uniforms from `rng`.
Outcome simulate_outcome(double true_theta, const ItemParams& item,
                         const BehaviorConfig& behavior, Rng& rng);

struct CampaignOptions {
  /// Sections each examinee is tested in, one session per section in this
  /// order. Empty means only SessionConfig::section.
  std::vector<SectionId> sections;
  std::string period_tag = "sim";
  int threads = 1;  // <= 0 uses hardware concurrency
};

/// Runs one k-item adaptive session per examinee per section. The master
/// seed is session_config.seed; each examinee's selection and outcome
/// streams are derived from (master seed, examinee id, section index), so
/// the log is identical for any thread count. Records are ordered by
/// examinee, then session, then position. session_id is the 1-based index
/// into the section list.
ResponseLog run_campaign(const ItemBank& bank,
                         std::span<const Examinee> population,
                         const SessionConfig& session_config,
                         const BehaviorConfig& behavior,
                         const CampaignOptions& options = {});

}  // namespace adaptest

#endif  // ADAPTEST_SIMULATOR_HPP
