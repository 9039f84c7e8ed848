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
#include <map>

#include "CLI11.hpp"
#include "cli.hpp"

namespace adaptest::cli {

namespace {

// "--theta-mean" also answers to "--theta_mean", which is how the key is
// spelled in a config file.
std::string names(std::string flag) {
  std::string underscored = flag;
  std::replace(underscored.begin(), underscored.end(), '-', '_');
  if (underscored == flag) return "--" + flag;
  return "--" + flag + ",--" + underscored;
}

template <typename T>
CLI::Option* add(CLI::App& app, const std::string& flag, T& value,
                 const std::string& help) {
  return app.add_option(names(flag), value, help)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig config;
  CLI::App app{"Adaptive testing: calibrate items, simulate campaigns, "
               "analyze response logs.",
               "adaptest"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (simulate)");
  add(app, "out", config.out, "Output directory");
  add(app, "threads", config.threads, "Worker threads, 0 = all cores");

  add(app, "input", config.input, "calibrate: response log or matrix CSV");
  add(app, "bank", config.bank, "Item bank JSON");
  auto& cal = config.calibration;
  std::optional<SectionId> scope_section;
  app.add_option(names("scope-section"), scope_section,
                 "calibrate: only this section's items");
  add(app, "prior-b-mean", cal.prior_b.mean, "calibrate: prior mean of b");
  add(app, "prior-b-sd", cal.prior_b.sd, "calibrate: prior sd of b");
  add(app, "prior-log-a-mean", cal.prior_log_a.mean,
      "calibrate: prior mean of log a");
  add(app, "prior-log-a-sd", cal.prior_log_a.sd,
      "calibrate: prior sd of log a");
  add(app, "prior-theta-mean", cal.prior_theta.mean,
      "calibrate: population mean");
  add(app, "prior-theta-sd", cal.prior_theta.sd, "calibrate: population sd");
  add(app, "tol", cal.tol, "calibrate: convergence tolerance");
  add(app, "max-iter", cal.max_iter, "calibrate: maximum sweeps");
  add(app, "quadrature-nodes", cal.quadrature_nodes,
      "calibrate: ability grid size");

  add(app, "n", config.population.n, "simulate: examinees");
  add(app, "theta-mean", config.population.theta_mean,
      "simulate: ability mean");
  add(app, "theta-sd", config.population.theta_sd, "simulate: ability sd");
  add(app, "k", config.session.k, "simulate: items per session");
  add(app, "sections", config.campaign.sections,
      "simulate: sections, default all")
      ->delimiter(',');
  const std::map<std::string, Estimator> estimators{{"map", Estimator::MAP},
                                                    {"eap", Estimator::EAP}};
  app.add_option(names("estimator"), config.session.estimator,
                 "simulate: map or eap")
      ->transform(CLI::CheckedTransformer(estimators, CLI::ignore_case))
      ->default_str("map");
  add(app, "eap-nodes", config.session.eap_nodes,
      "simulate: EAP quadrature nodes");
  add(app, "guess-floor", config.behavior.guess_floor,
      "simulate: minimum P(correct)");
  add(app, "abandon-prob", config.behavior.abandon_prob,
      "simulate: P(abandon an item)");
  add(app, "period-tag", config.campaign.period_tag, "simulate: period tag");

  add(app, "log", config.log, "analyze: response log CSV");
  add(app, "level", config.level, "analyze: confidence level");
  const std::map<std::string, IntervalMethod> intervals{
      {"wald", IntervalMethod::Wald}, {"wilson", IntervalMethod::Wilson}};
  app.add_option(names("interval"), config.interval, "analyze: wald or wilson")
      ->transform(CLI::CheckedTransformer(intervals, CLI::ignore_case))
      ->default_str("wald");
  add(app, "top-n", config.top_n, "analyze: leaderboard rows");
  add(app, "base-points", config.base_points, "analyze: points per session");
  std::optional<int> final_position;
  app.add_option(names("final-position"), final_position,
                 "analyze: position counted as final for mu_final");

  auto* calibrate = app.add_subcommand("calibrate", "Fit item parameters");
  auto* simulate = app.add_subcommand("simulate", "Run a seeded campaign");
  auto* analyze = app.add_subcommand("analyze", "Report on a response log");
  for (auto* sub : {calibrate, simulate, analyze}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  if (seed_opt->count() > 0) config.seed = seed;
  cal.scope = scope_section ? Scope::section_items(*scope_section)
                            : Scope::all_items();
  config.final_position = final_position;

  if (calibrate->parsed()) {
    config.command = Command::Calibrate;
    return cmd_calibrate(config, out, err);
  }
  if (simulate->parsed()) {
    config.command = Command::Simulate;
    return cmd_simulate(config, out, err);
  }
  config.command = Command::Analyze;
  return cmd_analyze(config, out, err);
}

}  // namespace adaptest::cli
