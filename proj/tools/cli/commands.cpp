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

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "cli.hpp"
#include "json.hpp"

namespace adaptest::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string first_line(const std::string& text) {
  std::string line = text.substr(0, text.find('\n'));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

fs::path normalised(const fs::path& path) {
  std::error_code ec;
  const auto full = fs::weakly_canonical(path, ec);
  return ec ? fs::absolute(path).lexically_normal() : full;
}

const char* interval_name(IntervalMethod method) {
  return method == IntervalMethod::Wald ? "wald" : "wilson";
}

CarResult overall_car(const ResponseLog& log, const RunConfig& config) {
  std::size_t correct = 0;
  for (const auto& r : log) correct += static_cast<std::size_t>(score(r.outcome));
  return car_result(correct, log.size(), config.level, config.interval);
}

std::string car_line(const CarResult& c) {
  return "car " + display3(c.rate) + " [" + display3(c.ci_low) + ", " +
         display3(c.ci_high) + "] (" + std::to_string(c.correct) + "/" +
         std::to_string(c.total) + ")";
}

json car_json(const CarResult& c) {
  return {{"correct", c.correct}, {"total", c.total}, {"car", c.rate},
          {"ci_low", c.ci_low},   {"ci_high", c.ci_high}, {"sd", c.sd}};
}

std::string grouped_csv(const std::string& key_name,
                        const std::vector<GroupRow>& rows) {
  std::string text =
      key_name + ",n_correct,n_responses,car,ci_low,ci_high,sd\n";
  for (const auto& row : rows) {
    const auto& c = row.car;
    text += to_string(row.key) + "," + std::to_string(c.correct) + "," +
            std::to_string(c.total) + "," + display3(c.rate) + "," +
            display3(c.ci_low) + "," + display3(c.ci_high) + "," +
            display3(c.sd) + "\n";
  }
  return text;
}

// Items of the log in first-appearance order, all in section 0.
ItemBank bank_from_log(const ResponseLog& log) {
  std::vector<Item> items;
  std::set<ItemId> seen;
  for (const auto& r : log) {
    if (seen.insert(r.item_id).second) items.push_back({r.item_id, 0, r.params});
  }
  return ItemBank(std::move(items));
}

struct SectionCorrelation {
  SectionId section_id = 0;
  std::size_t n_items = 0;
  std::size_t n_responses = 0;
  std::optional<double> r;
};

std::vector<SectionCorrelation> correlations(const ResponseLog& log,
                                             const ItemBank& bank) {
  std::map<SectionId, std::pair<std::set<ItemId>, std::size_t>> seen;
  for (const auto& r : log) {
    const Item* item = bank.find(r.item_id);
    auto& [items, responses] = seen[item ? item->section_id : 0];
    items.insert(r.item_id);
    ++responses;
  }
  std::vector<SectionCorrelation> rows;
  for (const auto& [section, entry] : seen) {
    SectionCorrelation row{section, entry.first.size(), entry.second, {}};
    if (bank.has_section(section)) {
      try {
        row.r = difficulty_ability_correlation(log, bank, section);
      } catch (const UndefinedCorrelation&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

int report_failure(std::ostream& err, const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) != nullptr) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  if (dynamic_cast<const SelectionExhausted*>(&e) != nullptr) {
    err << "error: selection exhausted: " << e.what() << "\n";
    return 1;
  }
  err << "error: " << e.what() << "\n";
  return 1;
}

template <typename Build>
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err,
                Build build) {
  try {
    config.validate();
    write_atomically(config.out, build(config, out));
    return 0;
  } catch (const std::exception& e) {
    return report_failure(err, e);
  }
}

}  // namespace

std::vector<std::string> output_files(Command command) {
  switch (command) {
    case Command::Calibrate:
      return {kBankFile, kCalibrationReportFile};
    case Command::Simulate:
      return {kResponseLogFile};
    case Command::Analyze:
      return {kItemsFile,        kSectionsFile,    kPositionsFile,
              kPeriodsFile,      kCorrelationsFile, kLeaderboardFile,
              kSummaryFile};
  }
  return {};
}

void RunConfig::validate() const {
  std::vector<std::pair<std::string, fs::path>> inputs;
  switch (command) {
    case Command::Calibrate:
      if (input.empty()) throw UsageError("calibrate needs --input");
      inputs.emplace_back("input", input);
      if (!bank.empty()) inputs.emplace_back("bank", bank);
      break;
    case Command::Simulate:
      if (!seed) throw UsageError("simulate needs --seed");
      if (bank.empty()) throw UsageError("simulate needs --bank");
      inputs.emplace_back("bank", bank);
      break;
    case Command::Analyze:
      if (log.empty()) throw UsageError("analyze needs --log");
      inputs.emplace_back("log", log);
      if (!bank.empty()) inputs.emplace_back("bank", bank);
      break;
  }
  std::map<fs::path, std::string> used;
  for (const auto& [what, path] : inputs) {
    const auto [it, fresh] = used.emplace(normalised(path), what);
    if (!fresh) {
      throw UsageError("--" + what + " and --" + it->second +
                       " name the same file");
    }
  }
  for (const auto& name : output_files(command)) {
    const auto target = normalised(out / name);
    if (const auto it = used.find(target); it != used.end()) {
      throw UsageError("--" + it->second + " would be overwritten by output " +
                       name);
    }
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw UsageError("level must be in (0, 1)");
  }
  if (top_n < 1) throw UsageError("top-n must be at least 1");
}

std::vector<Artifact> calibrate_artifacts(const RunConfig& config,
                                          std::ostream& out) {
  std::map<ItemId, SectionId> sections;
  if (!config.bank.empty()) {
    const auto bank = ItemBank::load(config.bank);
    for (const auto s : bank.section_ids()) {
      for (const auto& item : bank.section(s)) sections[item.item_id] = s;
    }
  }
  const std::string text = read_file(config.input);
  if (text.empty()) throw ParseError("empty input", 1);
  std::istringstream in(text);
  const ResponseMatrix matrix =
      first_line(text) == kMatrixCsvHeader
          ? read_response_matrix_csv(in, std::move(sections))
          : ResponseMatrix::from_log(read_response_log_csv(in),
                                     std::move(sections));

  CalibrationConfig calibration = config.calibration;
  calibration.threads = config.threads;
  const auto result = calibrate(matrix, calibration);
  for (const auto& warning : result.warnings) {
    out << "warning: " << warning << "\n";
  }
  out << "calibrated " << result.items.size() << " items from "
      << result.abilities.size() << " examinees in " << result.sweeps
      << " sweeps\n";
  return {{kBankFile, result.to_bank().to_json()},
          {kCalibrationReportFile, result.report_csv()}};
}

std::vector<Artifact> simulate_artifacts(const RunConfig& config,
                                         std::ostream& out) {
  const auto bank = ItemBank::load(config.bank);
  PopulationConfig population = config.population;
  population.seed = derive_seed(*config.seed, 0, 0);
  SessionConfig session = config.session;
  session.seed = *config.seed;
  CampaignOptions campaign = config.campaign;
  campaign.threads = config.threads;
  if (campaign.sections.empty()) campaign.sections = bank.section_ids();
  session.section = campaign.sections.front();

  const auto examinees = generate_population(population);
  const auto log = run_campaign(bank, examinees, session, config.behavior,
                                campaign);
  out << "records " << log.size() << "\n" << car_line(overall_car(log, config))
      << "\n";
  return {{kResponseLogFile, response_log_csv(log)}};
}

std::vector<Artifact> analyze_artifacts(const RunConfig& config,
                                        std::ostream& out) {
  const std::string text = read_file(config.log);
  if (text.empty()) throw ParseError("empty input", 1);
  std::istringstream in(text);
  const ResponseLog log = read_response_log_csv(in);
  if (log.empty()) throw Error("log has no records");
  validate_log(log);

  const ItemBank bank =
      config.bank.empty() ? bank_from_log(log) : ItemBank::load(config.bank);
  int k = 0;
  for (const auto& r : log) k = std::max(k, r.position);
  if (config.final_position) k = *config.final_position;

  std::vector<Artifact> artifacts;

  std::string items =
      "item_id,section_id,a,b,n_responses,n_correct,car,mu_all,mu_final\n";
  for (const auto& row : per_item_report(log, &bank, k)) {
    items += std::to_string(row.item_id) + "," +
             std::to_string(row.section_id) + "," + display3(row.params.a) +
             "," + display3(row.params.b) + "," +
             std::to_string(row.n_responses) + "," +
             std::to_string(row.n_correct) + "," + display3(row.car) + "," +
             display3(row.mu_all) + "," +
             (row.mu_final ? display3(*row.mu_final) : "NA") + "\n";
  }
  artifacts.push_back({kItemsFile, items});

  const auto sections = grouped_car(log, grouping::by_section(&bank),
                                    config.level, config.interval);
  artifacts.push_back({kSectionsFile, grouped_csv("section_id", sections)});
  artifacts.push_back(
      {kPositionsFile,
       grouped_csv("position", grouped_car(log, grouping::by_position(),
                                           config.level, config.interval))});
  artifacts.push_back(
      {kPeriodsFile,
       grouped_csv("period_tag", grouped_car(log, grouping::by_period(),
                                             config.level, config.interval))});

  const auto corr = correlations(log, bank);
  std::string corr_csv = "section_id,n_items,n_responses,r,status\n";
  for (const auto& row : corr) {
    corr_csv += std::to_string(row.section_id) + "," +
                std::to_string(row.n_items) + "," +
                std::to_string(row.n_responses) + "," +
                (row.r ? display3(*row.r) + ",ok" : "NA,undefined") + "\n";
  }
  artifacts.push_back({kCorrelationsFile, corr_csv});

  const auto ledgers = ledgers_from_log(log, config.base_points);
  std::string board = "rank,examinee_id,points,consecutive_perfect_sessions\n";
  std::size_t rank = 0;
  for (const auto& ledger : leaderboard(ledgers, config.top_n)) {
    board += std::to_string(++rank) + "," +
             std::to_string(ledger.examinee_id) + "," +
             std::to_string(ledger.points) + "," +
             std::to_string(ledger.consecutive_perfect_sessions) + "\n";
  }
  artifacts.push_back({kLeaderboardFile, board});

  const auto overall = overall_car(log, config);
  json summary;
  summary["level"] = config.level;
  summary["interval"] = interval_name(config.interval);
  summary["final_position"] = k;
  summary["overall"] = car_json(overall);
  summary["sections"] = json::array();
  for (std::size_t i = 0; i < sections.size(); ++i) {
    json entry = car_json(sections[i].car);
    entry["section_id"] = std::get<std::int64_t>(sections[i].key);
    const auto& c = corr[i];
    entry["n_items"] = c.n_items;
    entry["r"] = c.r ? json(*c.r) : json(nullptr);
    summary["sections"].push_back(entry);
  }
  artifacts.push_back({kSummaryFile, summary.dump(2) + "\n"});

  out << car_line(overall) << "\n";
  return artifacts;
}

void write_atomically(const fs::path& dir,
                      const std::vector<Artifact>& artifacts) {
  fs::create_directories(dir);
  std::vector<fs::path> temporaries;
  auto cleanup = [&] {
    std::error_code ignored;
    for (const auto& t : temporaries) fs::remove(t, ignored);
  };
  try {
    for (const auto& artifact : artifacts) {
      const fs::path tmp = dir / ("." + artifact.name + ".tmp");
      temporaries.push_back(tmp);
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      file << artifact.content;
      file.close();
      if (!file) throw Error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
      fs::rename(temporaries[i], dir / artifacts[i].name);
    }
  } catch (...) {
    cleanup();
    throw;
  }
}

int cmd_calibrate(const RunConfig& config, std::ostream& out,
                  std::ostream& err) {
  return run_command(config, out, err, calibrate_artifacts);
}

int cmd_simulate(const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
  return run_command(config, out, err, simulate_artifacts);
}

int cmd_analyze(const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  return run_command(config, out, err, analyze_artifacts);
}

}  // namespace adaptest::cli
