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

#include "adaptest/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "adaptest/errors.hpp"
#include "parallel.hpp"

namespace adaptest {

namespace {

// Two-variable Newton ascent with a negative-definite fallback curvature and
// backtracking, shared by the item block and the rescaling block.

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>;  // row major

struct Eval2 {
  double f;
  Vec2 grad;
  Mat2 hess;      // exact second derivatives
  Mat2 fallback;  // negative definite, used when hess is not
};

bool negative_definite(const Mat2& m) {
  return m[0] < 0.0 && m[0] * m[3] - m[1] * m[2] > 0.0;
}

Vec2 solve_ascent(const Mat2& m, const Vec2& g) {
  // Solve m d = -g.
  const double det = m[0] * m[3] - m[1] * m[2];
  return {-(m[3] * g[0] - m[1] * g[1]) / det,
          -(-m[2] * g[0] + m[0] * g[1]) / det};
}

template <typename F>
Vec2 maximize_2d(Vec2 x, F&& eval, int max_iter, double grad_tol) {
  Eval2 cur = eval(x);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::max(std::abs(cur.grad[0]), std::abs(cur.grad[1])) < grad_tol) {
      break;
    }
    const Mat2& curvature =
        negative_definite(cur.hess) ? cur.hess : cur.fallback;
    const Vec2 dir = solve_ascent(curvature, cur.grad);
    double step = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Vec2 trial{x[0] + step * dir[0], x[1] + step * dir[1]};
      Eval2 next = eval(trial);
      if (std::isfinite(next.f) && next.f >= cur.f) {
        x = trial;
        cur = next;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return x;
}

double log_normal_kernel(double x, const Prior& p) {
  const double z = (x - p.mean) / p.sd;
  return -0.5 * z * z;
}

// Compressed row storage: entries of row r are [offsets[r], offsets[r + 1]).
struct Cell {
  std::size_t other;
  bool correct;
};

struct Compressed {
  std::vector<std::size_t> offsets;
  std::vector<Cell> cells;

  std::span<const Cell> row(std::size_t r) const {
    return std::span<const Cell>(cells).subspan(offsets[r],
                                                offsets[r + 1] - offsets[r]);
  }
};

Compressed compress(std::size_t rows,
                    const std::vector<std::pair<std::size_t, Cell>>& entries) {
  Compressed out;
  out.offsets.assign(rows + 1, 0);
  for (const auto& [r, cell] : entries) ++out.offsets[r + 1];
  for (std::size_t r = 0; r < rows; ++r) out.offsets[r + 1] += out.offsets[r];
  out.cells.resize(entries.size());
  auto fill = out.offsets;
  for (const auto& [r, cell] : entries) out.cells[fill[r]++] = cell;
  return out;
}

class MarginalMap {
 public:
  MarginalMap(const ResponseMatrix& matrix, const CalibrationConfig& config)
      : config_(config),
        items_(matrix.items().begin(), matrix.items().end()),
        examinees_(matrix.examinees().begin(), matrix.examinees().end()),
        n_nodes_(static_cast<std::size_t>(config.quadrature_nodes)) {
    std::unordered_map<ItemId, std::size_t> item_index;
    std::unordered_map<ExamineeId, std::size_t> examinee_index;
    for (std::size_t j = 0; j < items_.size(); ++j) item_index[items_[j]] = j;
    for (std::size_t i = 0; i < examinees_.size(); ++i) {
      examinee_index[examinees_[i]] = i;
    }
    std::vector<std::pair<std::size_t, Cell>> by_item;
    std::vector<std::pair<std::size_t, Cell>> by_examinee;
    by_item.reserve(matrix.size());
    by_examinee.reserve(matrix.size());
    for (const auto& obs : matrix.observations()) {
      const auto j = item_index.at(obs.item_id);
      const auto i = examinee_index.at(obs.examinee_id);
      by_item.push_back({j, {i, obs.correct}});
      by_examinee.push_back({i, {j, obs.correct}});
    }
    by_item_ = compress(items_.size(), by_item);
    by_examinee_ = compress(examinees_.size(), by_examinee);

    n_correct_.assign(items_.size(), 0);
    for (std::size_t j = 0; j < items_.size(); ++j) {
      for (const auto& cell : by_item_.row(j)) n_correct_[j] += cell.correct;
    }

    const Prior& prior = config_.prior_theta;
    nodes_.resize(n_nodes_);
    log_node_weights_.resize(n_nodes_);
    const double step = 10.0 * prior.sd / static_cast<double>(n_nodes_ - 1);
    double total = 0.0;
    for (std::size_t q = 0; q < n_nodes_; ++q) {
      nodes_[q] = prior.mean - 5.0 * prior.sd + step * static_cast<double>(q);
      total += std::exp(log_normal_kernel(nodes_[q], prior));
    }
    for (std::size_t q = 0; q < n_nodes_; ++q) {
      log_node_weights_[q] = log_normal_kernel(nodes_[q], prior) - std::log(total);
    }
    posterior_.resize(examinees_.size() * n_nodes_);
    examinee_log_lik_.resize(examinees_.size());
    log_p_.resize(items_.size() * n_nodes_);
    log_q_.resize(items_.size() * n_nodes_);
  }

  CalibrationResult run() {
    initialise();
    CalibrationResult result;
    log_posterior_ = expectation();
    result.log_posterior_trace.push_back(log_posterior_);

    double max_change = std::numeric_limits<double>::infinity();
    int sweep = 0;
    while (sweep < config_.max_iter) {
      ++sweep;
      const auto start_log_a = log_a_;
      const auto start_b = b_;
      result.log_posterior_trace.push_back(accelerated_sweep());
      max_change = 0.0;
      for (std::size_t j = 0; j < b_.size(); ++j) {
        max_change = std::max(max_change, std::abs(b_[j] - start_b[j]));
        max_change = std::max(max_change, std::abs(std::exp(log_a_[j]) -
                                                   std::exp(start_log_a[j])));
      }
      if (max_change < config_.tol) break;
    }
    if (!(max_change < config_.tol)) {
      std::ostringstream msg;
      msg << "calibration did not converge: " << sweep
          << " sweeps, last max parameter change " << max_change;
      throw CalibrationError(msg.str(), sweep, max_change);
    }

    result.sweeps = sweep;
    result.max_gradient = max_gradient();
    const auto abilities = map_abilities();
    for (std::size_t i = 0; i < examinees_.size(); ++i) {
      result.abilities[examinees_[i]] = abilities[i];
    }
    for (std::size_t j = 0; j < items_.size(); ++j) {
      CalibratedItem item;
      item.item_id = items_[j];
      item.params = {std::exp(log_a_[j]), b_[j]};
      item.n_obs = by_item_.row(j).size();
      item.n_correct = n_correct_[j];
      if (item.n_correct == item.n_obs) {
        item.flag = ItemFlag::AllCorrect;
      } else if (item.n_correct == 0) {
        item.flag = ItemFlag::AllIncorrect;
      }
      if (item.flag != ItemFlag::Ok) {
        result.warnings.push_back(
            "item " + std::to_string(item.item_id) + " is degenerate (" +
            to_string(item.flag) + ", " + std::to_string(item.n_obs) +
            " observations); estimate is prior-dominated");
      }
      result.params[item.item_id] = item.params;
      result.items.push_back(item);
    }
    return result;
  }

 private:
  struct NodeCounts {
    std::vector<double> total;
    std::vector<double> correct;
  };

  void initialise() {
    log_a_.assign(items_.size(), config_.prior_log_a.mean);
    b_.resize(items_.size());
    for (std::size_t j = 0; j < items_.size(); ++j) {
      const double n = static_cast<double>(by_item_.row(j).size());
      const double p = (static_cast<double>(n_correct_[j]) + 0.5) / (n + 1.0);
      b_[j] = std::clamp(-std::log(p / (1.0 - p)) / kLogisticScale, -4.0, 4.0);
    }
  }

  // Ability block: posterior over the grid for every examinee. Returns the
  // log posterior at the current item parameters.
  double expectation() {
    detail::parallel_for(items_.size(), config_.threads, [&](std::size_t j) {
      const double slope = kLogisticScale * std::exp(log_a_[j]);
      for (std::size_t q = 0; q < n_nodes_; ++q) {
        const double z = slope * (nodes_[q] - b_[j]);
        log_p_[j * n_nodes_ + q] = detail::log_sigmoid(z);
        log_q_[j * n_nodes_ + q] = detail::log_sigmoid(-z);
      }
    });
    detail::parallel_for(examinees_.size(), config_.threads, [&](std::size_t i) {
      double* w = posterior_.data() + i * n_nodes_;
      std::copy(log_node_weights_.begin(), log_node_weights_.end(), w);
      for (const auto& cell : by_examinee_.row(i)) {
        const double* table =
            (cell.correct ? log_p_ : log_q_).data() + cell.other * n_nodes_;
        for (std::size_t q = 0; q < n_nodes_; ++q) w[q] += table[q];
      }
      const double peak = *std::max_element(w, w + n_nodes_);
      double mass = 0.0;
      for (std::size_t q = 0; q < n_nodes_; ++q) {
        w[q] = std::exp(w[q] - peak);
        mass += w[q];
      }
      for (std::size_t q = 0; q < n_nodes_; ++q) w[q] /= mass;
      examinee_log_lik_[i] = peak + std::log(mass);
    });
    double total = 0.0;
    for (const double ll : examinee_log_lik_) total += ll;
    for (std::size_t j = 0; j < items_.size(); ++j) {
      total += log_normal_kernel(log_a_[j], config_.prior_log_a) +
               log_normal_kernel(b_[j], config_.prior_b);
    }
    return total;
  }

  NodeCounts node_counts(std::size_t j) const {
    NodeCounts counts{std::vector<double>(n_nodes_, 0.0),
                      std::vector<double>(n_nodes_, 0.0)};
    for (const auto& cell : by_item_.row(j)) {
      const double* w = posterior_.data() + cell.other * n_nodes_;
      for (std::size_t q = 0; q < n_nodes_; ++q) counts.total[q] += w[q];
      if (cell.correct) {
        for (std::size_t q = 0; q < n_nodes_; ++q) counts.correct[q] += w[q];
      }
    }
    return counts;
  }

  // Expected complete-data log posterior of one item at x = (log a, b).
  Eval2 item_objective(const NodeCounts& counts, const Vec2& x) const {
    const double alpha = x[0];
    const double b = x[1];
    const double slope = kLogisticScale * std::exp(alpha);
    Eval2 e{};
    e.f = log_normal_kernel(alpha, config_.prior_log_a) +
          log_normal_kernel(b, config_.prior_b);
    double pq_zz = 0.0, pq = 0.0, pq_z = 0.0, resid_z = 0.0, resid = 0.0;
    for (std::size_t q = 0; q < n_nodes_; ++q) {
      const double n = counts.total[q];
      const double r = counts.correct[q];
      const double z = slope * (nodes_[q] - b);
      const double p = detail::sigmoid(z);
      const double npq = n * p * detail::sigmoid(-z);
      const double d = r - n * p;
      e.f += r * detail::log_sigmoid(z) + (n - r) * detail::log_sigmoid(-z);
      pq_zz += npq * z * z;
      pq += npq;
      pq_z += npq * z;
      resid_z += d * z;
      resid += d;
    }
    const double va = config_.prior_log_a.sd * config_.prior_log_a.sd;
    const double vb = config_.prior_b.sd * config_.prior_b.sd;
    e.grad = {resid_z - (alpha - config_.prior_log_a.mean) / va,
              -slope * resid - (b - config_.prior_b.mean) / vb};
    // d z / d alpha = z, d z / d b = -slope, d2 z / d alpha d b = -slope.
    const double h_aa = -pq_zz + resid_z - 1.0 / va;
    const double h_bb = -slope * slope * pq - 1.0 / vb;
    const double h_ab = slope * pq_z - slope * resid;
    e.hess = {h_aa, h_ab, h_ab, h_bb};
    const double f_ab = slope * pq_z;
    e.fallback = {-pq_zz - 1.0 / va, f_ab, f_ab, h_bb};
    return e;
  }

  double em_step() {
    maximisation();
    return expectation();
  }

  // Two EM steps, then a squared extrapolation along their path followed by
  // a stabilising EM step (SQUAREM). The extrapolated point is kept only if
  // it beats the plain second EM step, so a sweep never lowers the log
  // posterior. Expects the posteriors of the current point; leaves the
  // posteriors of the new point.
  double accelerated_sweep() {
    const auto x0 = packed();
    em_step();
    const auto x1 = packed();
    const double f2 = em_step();
    const auto x2 = packed();

    double rr = 0.0, vv = 0.0;
    for (std::size_t k = 0; k < x0.size(); ++k) {
      const double r = x1[k] - x0[k];
      const double v = x2[k] - 2.0 * x1[k] + x0[k];
      rr += r * r;
      vv += v * v;
    }
    log_posterior_ = f2;
    if (!(vv > 0.0)) return log_posterior_;
    const double alpha = std::min(-1.0, -std::sqrt(rr / vv));
    std::vector<double> jump(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k) {
      const double r = x1[k] - x0[k];
      const double v = x2[k] - 2.0 * x1[k] + x0[k];
      jump[k] = x0[k] - 2.0 * alpha * r + alpha * alpha * v;
    }
    unpack(jump);
    const double f_jump = expectation();
    const double f3 = std::isfinite(f_jump) ? em_step() : f_jump;
    if (std::isfinite(f3) && f3 >= f2) {
      log_posterior_ = f3;
    } else {
      unpack(x2);
      log_posterior_ = expectation();
    }
    return log_posterior_;
  }

  std::vector<double> packed() const {
    std::vector<double> x(log_a_);
    x.insert(x.end(), b_.begin(), b_.end());
    return x;
  }

  void unpack(const std::vector<double>& x) {
    const auto n = static_cast<std::ptrdiff_t>(log_a_.size());
    std::copy(x.begin(), x.begin() + n, log_a_.begin());
    std::copy(x.begin() + n, x.end(), b_.begin());
  }

  // Item block.
  void maximisation() {
    detail::parallel_for(items_.size(), config_.threads, [&](std::size_t j) {
      const NodeCounts counts = node_counts(j);
      const Vec2 x = maximize_2d(
          {log_a_[j], b_[j]},
          [&](const Vec2& v) { return item_objective(counts, v); }, 50,
          1e-10);
      log_a_[j] = x[0];
      b_[j] = x[1];
    });
  }

  // By the Fisher identity the gradient of the marginal log posterior equals
  // the gradient of the item objective at the current posteriors.
  double max_gradient() const {
    std::vector<double> worst(items_.size(), 0.0);
    detail::parallel_for(items_.size(), config_.threads, [&](std::size_t j) {
      const auto e = item_objective(node_counts(j), {log_a_[j], b_[j]});
      worst[j] = std::max(std::abs(e.grad[0]), std::abs(e.grad[1]));
    });
    return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
  }

  std::vector<double> map_abilities() const {
    std::vector<double> out(examinees_.size());
    detail::parallel_for(examinees_.size(), config_.threads, [&](std::size_t i) {
      std::vector<Response> responses;
      for (const auto& cell : by_examinee_.row(i)) {
        responses.push_back(
            {cell.correct ? Outcome::Correct : Outcome::Incorrect,
             {std::exp(log_a_[cell.other]), b_[cell.other]}});
      }
      out[i] = estimate_map(responses, config_.prior_theta).value;
    });
    return out;
  }

  const CalibrationConfig& config_;
  std::vector<ItemId> items_;
  std::vector<ExamineeId> examinees_;
  std::size_t n_nodes_;
  Compressed by_item_;
  std::vector<std::size_t> n_correct_;
  Compressed by_examinee_;
  std::vector<double> nodes_;
  std::vector<double> log_node_weights_;
  std::vector<double> posterior_;  // examinee-major, n_nodes_ per examinee
  std::vector<double> examinee_log_lik_;
  std::vector<double> log_p_;  // item-major log P at each node
  std::vector<double> log_q_;
  std::vector<double> log_a_;
  std::vector<double> b_;
  double log_posterior_ = 0.0;
};

}  // namespace

ResponseMatrix::ResponseMatrix(std::vector<Observation> observations,
                               std::map<ItemId, SectionId> item_sections)
    : observations_(std::move(observations)),
      item_sections_(std::move(item_sections)) {
  std::set<std::pair<ExamineeId, ItemId>> cells;
  std::set<ItemId> items;
  std::set<ExamineeId> examinees;
  for (const auto& obs : observations_) {
    if (!cells.emplace(obs.examinee_id, obs.item_id).second) {
      throw InvalidArgument("duplicate response matrix cell (examinee " +
                            std::to_string(obs.examinee_id) + ", item " +
                            std::to_string(obs.item_id) + ")");
    }
    items.insert(obs.item_id);
    examinees.insert(obs.examinee_id);
  }
  items_.assign(items.begin(), items.end());
  examinees_.assign(examinees.begin(), examinees.end());
}

ResponseMatrix ResponseMatrix::from_log(std::span<const ResponseRecord> log,
                                        std::map<ItemId, SectionId> sections) {
  std::vector<Observation> observations;
  observations.reserve(log.size());
  for (const auto& r : log) {
    observations.push_back({r.examinee_id, r.item_id, score(r.outcome) == 1});
  }
  return ResponseMatrix(std::move(observations), std::move(sections));
}

ResponseMatrix read_response_matrix_csv(
    std::istream& in, std::map<ItemId, SectionId> item_sections) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", row);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMatrixCsvHeader) {
    throw ParseError("unexpected header '" + line + "'", row);
  }
  std::vector<Observation> observations;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 3) {
      throw ParseError("expected 3 fields, found " + std::to_string(f.size()),
                       row);
    }
    Observation obs;
    obs.examinee_id = csv::parse_int(f[0], "examinee_id", row);
    obs.item_id = csv::parse_int(f[1], "item_id", row);
    const auto delta = csv::parse_int(f[2], "delta", row);
    if (delta != 0 && delta != 1) throw ParseError("delta must be 0 or 1", row);
    obs.correct = delta == 1;
    observations.push_back(obs);
  }
  return ResponseMatrix(std::move(observations), std::move(item_sections));
}

std::optional<SectionId> ResponseMatrix::section_of(ItemId item) const {
  const auto it = item_sections_.find(item);
  if (it == item_sections_.end()) return std::nullopt;
  return it->second;
}

ResponseMatrix scope_filter(const ResponseMatrix& matrix, const Scope& scope) {
  if (!scope.section) return matrix;
  std::vector<Observation> kept;
  for (const auto& obs : matrix.observations()) {
    if (matrix.section_of(obs.item_id) == scope.section) kept.push_back(obs);
  }
  std::map<ItemId, SectionId> sections;
  for (const auto& [item, section] : matrix.item_sections()) {
    if (section == *scope.section) sections.emplace(item, section);
  }
  return ResponseMatrix(std::move(kept), std::move(sections));
}

const char* to_string(ItemFlag flag) noexcept {
  switch (flag) {
    case ItemFlag::Ok:
      return "ok";
    case ItemFlag::AllCorrect:
      return "all_correct";
    case ItemFlag::AllIncorrect:
      return "all_incorrect";
  }
  return "unknown";
}

ItemBank CalibrationResult::to_bank() const {
  std::vector<Item> bank_items;
  bank_items.reserve(items.size());
  for (const auto& item : items) {
    bank_items.push_back({item.item_id, item.section_id, item.params});
  }
  return ItemBank(std::move(bank_items));
}

std::string CalibrationResult::report_csv() const {
  std::ostringstream out;
  out << "item_id,a,b,n_obs,flag\n";
  for (const auto& item : items) {
    out << item.item_id << ',' << csv::fixed6(item.params.a) << ','
        << csv::fixed6(item.params.b) << ',' << item.n_obs << ','
        << to_string(item.flag) << '\n';
  }
  return out.str();
}

CalibrationResult calibrate(const ResponseMatrix& matrix,
                            const CalibrationConfig& config) {
  validate(config.prior_b);
  validate(config.prior_log_a);
  validate(config.prior_theta);
  if (!(config.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (config.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (config.quadrature_nodes < kMinQuadratureNodes) {
    throw InvalidArgument("calibration needs at least " +
                          std::to_string(kMinQuadratureNodes) +
                          " quadrature nodes");
  }

  const ResponseMatrix scoped = scope_filter(matrix, config.scope);
  if (scoped.empty()) {
    throw InvalidArgument("response matrix has no observations in scope");
  }
  CalibrationResult result = MarginalMap(scoped, config).run();
  for (auto& item : result.items) {
    item.section_id = scoped.section_of(item.item_id).value_or(0);
  }
  return result;
}

}  // namespace adaptest
