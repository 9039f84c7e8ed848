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

// The adaptest command line: calibrate, simulate and analyze.
//
// Every command computes all of its outputs in memory first, then writes
// them next to their final names and renames them into place. A failing
// command leaves the output directory as it was.

#ifndef ADAPTEST_TOOLS_CLI_HPP
#define ADAPTEST_TOOLS_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adaptest/analytics.hpp"
#include "adaptest/calibration.hpp"
#include "adaptest/errors.hpp"
#include "adaptest/simulator.hpp"

namespace adaptest::cli {

enum class Command { Calibrate, Simulate, Analyze };

/// Bad flags, bad config keys or inconsistent settings. Exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  Command command = Command::Analyze;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  int threads = 1;  // <= 0 uses hardware concurrency

  // calibrate: response log CSV or compact matrix CSV; optional bank for
  // section membership.
  std::filesystem::path input;
  std::filesystem::path bank;
  CalibrationConfig calibration;

  // simulate
  PopulationConfig population;
  SessionConfig session;
  BehaviorConfig behavior;
  CampaignOptions campaign;  // empty sections: every section of the bank

  // analyze
  std::filesystem::path log;
  double level = 0.95;
  IntervalMethod interval = IntervalMethod::Wald;
  std::size_t top_n = 10;
  std::uint64_t base_points = 1;
  std::optional<int> final_position;  // defaults to the largest position

  /// Throws UsageError for a missing seed on simulate, missing inputs or
  /// paths that collide with each other or with an output file.
  void validate() const;
};

/// One output file, by name inside RunConfig::out.
struct Artifact {
  std::string name;
  std::string content;
};

inline constexpr const char* kBankFile = "bank.json";
inline constexpr const char* kCalibrationReportFile = "calibration_report.csv";
inline constexpr const char* kResponseLogFile = "response_log.csv";
inline constexpr const char* kItemsFile = "items.csv";
inline constexpr const char* kSectionsFile = "sections.csv";
inline constexpr const char* kPositionsFile = "positions.csv";
inline constexpr const char* kPeriodsFile = "periods.csv";
inline constexpr const char* kCorrelationsFile = "correlations.csv";
inline constexpr const char* kLeaderboardFile = "leaderboard.csv";
inline constexpr const char* kSummaryFile = "summary.json";

std::vector<std::string> output_files(Command command);

/// The artifacts of each command. Diagnostics and summaries go to `out`.
std::vector<Artifact> calibrate_artifacts(const RunConfig& config,
                                          std::ostream& out);
std::vector<Artifact> simulate_artifacts(const RunConfig& config,
                                         std::ostream& out);
std::vector<Artifact> analyze_artifacts(const RunConfig& config,
                                        std::ostream& out);

/// Writes every artifact to a temporary sibling, then renames all of them.
/// Temporaries are removed if any write fails.
void write_atomically(const std::filesystem::path& dir,
                      const std::vector<Artifact>& artifacts);

/// Runs a command and writes its artifacts. Returns the exit status: 0 on
/// success, 1 on a runtime error, 2 on a usage error.
int cmd_calibrate(const RunConfig& config, std::ostream& out,
                  std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out,
                 std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out,
                std::ostream& err);

/// Parses the command line (args excludes the program name), reading
/// `--config FILE` first so that flags override file values.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace adaptest::cli

#endif  // ADAPTEST_TOOLS_CLI_HPP
