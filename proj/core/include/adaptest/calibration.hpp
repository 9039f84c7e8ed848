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

// Item calibration from an incomplete response matrix.
//
// Item parameters are MAP estimates under the marginal posterior, with each
// examinee's ability integrated over the prior_theta population:
//
//   sum_i log integral prod_{j observed for i} P_ij^delta (1 - P_ij)^(1-delta)
//                      N(theta; prior_theta) d theta
//   + sum_j [log N(b_j; prior_b) + log N(log a_j; prior_log_a)]
//
// Missing cells contribute nothing. The integral uses a fixed grid on
// prior_theta mean +/- 5 sd. The optimiser alternates two blocks (EM): the
// ability block replaces every examinee's ability by its posterior over the
// grid, and the item block maximises each (log a_j, b_j) against those
// posteriors. A sweep is two such rounds plus a squared extrapolation along
// their path (SQUAREM), kept only when it improves on the plain rounds, so
// the log posterior never decreases across sweeps. Reported abilities are
// MAP estimates given the final item parameters.

#ifndef ADAPTEST_CALIBRATION_HPP
#define ADAPTEST_CALIBRATION_HPP

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptest/ability.hpp"
#include "adaptest/item_bank.hpp"
#include "adaptest/response_log.hpp"

namespace adaptest {

struct Observation {
  ExamineeId examinee_id = 0;
  ItemId item_id = 0;
  bool correct = false;
};

/// Sparse examinee x item matrix of 0/1 outcomes. Only observed cells are
/// stored; every stored item and examinee has at least one observation.
class ResponseMatrix {
 public:
  ResponseMatrix() = default;

  /// Throws InvalidArgument on a repeated (examinee, item) cell.
  /// `item_sections` records section membership for scope filtering.
  explicit ResponseMatrix(std::vector<Observation> observations,
                          std::map<ItemId, SectionId> item_sections = {});

  /// Abandoned responses become 0. A repeated (examinee, item) pair in the
  /// log is an error.
  static ResponseMatrix from_log(std::span<const ResponseRecord> log,
                                 std::map<ItemId, SectionId> item_sections = {});

  std::span<const Observation> observations() const noexcept {
    return observations_;
  }
  /// Sorted ascending.
  std::span<const ItemId> items() const noexcept { return items_; }
  std::span<const ExamineeId> examinees() const noexcept { return examinees_; }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }

  std::optional<SectionId> section_of(ItemId item) const;
  const std::map<ItemId, SectionId>& item_sections() const noexcept {
    return item_sections_;
  }

 private:
  std::vector<Observation> observations_;
  std::vector<ItemId> items_;
  std::vector<ExamineeId> examinees_;
  std::map<ItemId, SectionId> item_sections_;
};

/// All items, or the items of one section.
inline constexpr std::string_view kMatrixCsvHeader = "examinee_id,item_id,delta";

/// Reads the compact matrix CSV: header examinee_id,item_id,delta then one
/// row per observed cell with delta 0 or 1. Throws ParseError (with the
/// 1-based row) on malformed input and InvalidArgument on repeated cells.
ResponseMatrix read_response_matrix_csv(
    std::istream& in, std::map<ItemId, SectionId> item_sections = {});

struct Scope {
  std::optional<SectionId> section;

  static Scope all_items() { return {}; }
  static Scope section_items(SectionId id) { return {id}; }
};

/// SectionItems(s) keeps the columns of section s and drops examinees left
/// without observations. Items with unknown section never match.
ResponseMatrix scope_filter(const ResponseMatrix& matrix, const Scope& scope);

struct CalibrationConfig {
  Prior prior_b{0.0, 1.0};
  Prior prior_log_a{0.0, 0.5};
  Prior prior_theta{0.0, 1.0};
  Scope scope;
  double tol = 1e-6;  // max parameter change per sweep
  int max_iter = 100;  // sweeps
  int quadrature_nodes = 61;
  int threads = 1;  // <= 0 uses hardware concurrency
};

/// The (a, b) every item carries before calibration: a = 1, b = 0.
constexpr ItemParams default_params() noexcept { return {1.0, 0.0}; }

enum class ItemFlag { Ok, AllCorrect, AllIncorrect };

const char* to_string(ItemFlag flag) noexcept;

struct CalibratedItem {
  ItemId item_id = 0;
  SectionId section_id = 0;
  ItemParams params;
  std::size_t n_obs = 0;
  std::size_t n_correct = 0;
  ItemFlag flag = ItemFlag::Ok;
};

struct CalibrationResult {
  std::map<ItemId, ItemParams> params;
  std::vector<CalibratedItem> items;  // ascending item_id
  std::map<ExamineeId, double> abilities;
  int sweeps = 0;
  /// Log posterior after initialisation, then after every sweep.
  std::vector<double> log_posterior_trace;
  /// Largest |partial derivative| of the log posterior with respect to any
  /// (log a_j, b_j) at the returned point.
  double max_gradient = 0.0;
  std::vector<std::string> warnings;

  /// Items missing from the section map are placed in section 0.
  ItemBank to_bank() const;

  /// CSV: item_id,a,b,n_obs,flag
  std::string report_csv() const;
};

/// Throws InvalidArgument for an empty (post-scope) matrix or bad config and
/// CalibrationError when max_iter sweeps pass without convergence.
/// Items whose outcomes are all identical are kept, flagged, and listed in
/// `warnings`; their estimates are dominated by the priors.
CalibrationResult calibrate(const ResponseMatrix& matrix,
                            const CalibrationConfig& config = {});

}  // namespace adaptest

#endif  // ADAPTEST_CALIBRATION_HPP
