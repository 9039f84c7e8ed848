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

// Two-parameter logistic item response model.
//
//   P(correct | theta) = 1 / (1 + exp(-1.7 a (theta - b)))
//
// Abandoned responses are graded as incorrect everywhere a likelihood is
// formed.

#ifndef ADAPTEST_IRT_HPP
#define ADAPTEST_IRT_HPP

#include <cstdint>
#include <span>

namespace adaptest {

/// Fixed logistic scaling constant of the model.
inline constexpr double kLogisticScale = 1.7;

struct ItemParams {
  double a = 1.0;  ///< discrimination, > 0
  double b = 0.0;  ///< difficulty, ability-scale units

  friend bool operator==(const ItemParams&, const ItemParams&) = default;
};

/// Throws InvalidArgument unless a > 0 and both are finite.
void validate(const ItemParams& params);

enum class Outcome : std::uint8_t { Correct, Incorrect, Abandoned };

/// Scoring indicator: 1 for Correct, 0 for Incorrect and Abandoned.
constexpr int score(Outcome outcome) noexcept {
  return outcome == Outcome::Correct ? 1 : 0;
}

/// Single-letter code used in CSV files: C, I or A.
char outcome_code(Outcome outcome) noexcept;
Outcome outcome_from_code(char code);

struct Response {
  Outcome outcome;
  ItemParams item;
};

/// Probability of a correct response. Strictly inside (0, 1) for every
/// finite input; saturates to the nearest representable value for extreme
/// logits instead of overflowing.
double icc(double theta, const ItemParams& params);

/// 1 - icc, computed without cancellation.
double icc_complement(double theta, const ItemParams& params);

/// Fisher information 1.7^2 a^2 P (1 - P).
double item_information(double theta, const ItemParams& params);

double log_likelihood(std::span<const Response> responses, double theta);

/// d/dtheta of log_likelihood: sum of 1.7 a (delta - P).
double log_likelihood_grad(std::span<const Response> responses, double theta);

/// d2/dtheta2 of log_likelihood: -sum of (1.7 a)^2 P Q. Always negative.
double log_likelihood_hessian(std::span<const Response> responses,
                              double theta);

namespace detail {

// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept;

// log of the logistic function at z.
inline double log_sigmoid(double z) noexcept { return -softplus(-z); }

double sigmoid(double z) noexcept;

}  // namespace detail

}  // namespace adaptest

#endif  // ADAPTEST_IRT_HPP
