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

#include "adaptest/irt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adaptest/errors.hpp"

namespace adaptest {

namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
const double kProbCeiling = std::nextafter(1.0, 0.0);

void require_finite(double theta, const ItemParams& params) {
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  validate(params);
}

double logit(double theta, const ItemParams& p) {
  return kLogisticScale * p.a * (theta - p.b);
}

void require_nonempty(std::span<const Response> responses) {
  if (responses.empty()) {
    throw InvalidArgument("likelihood needs at least one response");
  }
}

}  // namespace

void validate(const ItemParams& params) {
  if (!std::isfinite(params.a) || !std::isfinite(params.b)) {
    throw InvalidArgument("item parameters must be finite");
  }
  if (!(params.a > 0.0)) {
    throw InvalidArgument("discrimination must be positive, got " +
                          std::to_string(params.a));
  }
}

char outcome_code(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Correct:
      return 'C';
    case Outcome::Incorrect:
      return 'I';
    case Outcome::Abandoned:
      return 'A';
  }
  return '?';
}

Outcome outcome_from_code(char code) {
  switch (code) {
    case 'C':
      return Outcome::Correct;
    case 'I':
      return Outcome::Incorrect;
    case 'A':
      return Outcome::Abandoned;
    default:
      throw InvalidArgument(std::string("unknown outcome code '") + code + "'");
  }
}

namespace detail {

double softplus(double x) noexcept {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

double icc(double theta, const ItemParams& params) {
  require_finite(theta, params);
  const double p = detail::sigmoid(logit(theta, params));
  return std::clamp(p, kProbFloor, kProbCeiling);
}

double icc_complement(double theta, const ItemParams& params) {
  require_finite(theta, params);
  const double q = detail::sigmoid(-logit(theta, params));
  return std::clamp(q, kProbFloor, kProbCeiling);
}

double item_information(double theta, const ItemParams& params) {
  require_finite(theta, params);
  const double z = logit(theta, params);
  const double p = detail::sigmoid(z);
  const double q = detail::sigmoid(-z);
  const double slope = kLogisticScale * params.a;
  return slope * slope * p * q;
}

double log_likelihood(std::span<const Response> responses, double theta) {
  require_nonempty(responses);
  double total = 0.0;
  for (const auto& r : responses) {
    require_finite(theta, r.item);
    const double z = logit(theta, r.item);
    total += score(r.outcome) ? detail::log_sigmoid(z)
                              : detail::log_sigmoid(-z);
  }
  return total;
}

double log_likelihood_grad(std::span<const Response> responses, double theta) {
  require_nonempty(responses);
  double total = 0.0;
  for (const auto& r : responses) {
    require_finite(theta, r.item);
    const double p = detail::sigmoid(logit(theta, r.item));
    total += kLogisticScale * r.item.a * (score(r.outcome) - p);
  }
  return total;
}

double log_likelihood_hessian(std::span<const Response> responses,
                              double theta) {
  require_nonempty(responses);
  double total = 0.0;
  for (const auto& r : responses) {
    total -= item_information(theta, r.item);
  }
  return total;
}

}  // namespace adaptest
