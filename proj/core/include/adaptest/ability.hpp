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

// Ability estimation from short response sequences under a normal prior.
//
// MAP is the posterior mode, found by damped Newton-Raphson safeguarded by a
// bisection bracket on the gradient. EAP is the posterior mean computed on a
// fixed grid of equally spaced nodes over mean +/- 5 sd. Both are finite for
// all-correct and all-incorrect patterns.

#ifndef ADAPTEST_ABILITY_HPP
#define ADAPTEST_ABILITY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "adaptest/irt.hpp"

namespace adaptest {

struct Prior {
  double mean = 0.0;
  double sd = 1.0;
};

void validate(const Prior& prior);

enum class Estimator { MAP, EAP };

struct AbilityEstimate {
  double value = 0.0;
  Estimator method = Estimator::MAP;
  std::size_t n_responses = 0;
};

/// Search and clamp domain for MAP estimates.
inline constexpr double kThetaMin = -6.0;
inline constexpr double kThetaMax = 6.0;

inline constexpr int kDefaultQuadratureNodes = 61;
inline constexpr int kMinQuadratureNodes = 21;

struct MapOptions {
  int max_iter = 100;
  double gradient_tol = 1e-8;
  double max_step = 1.0;
};

/// Unnormalized log posterior: log-likelihood plus the log prior density.
/// Accepts an empty response list.
double log_posterior(std::span<const Response> responses, const Prior& prior,
                     double theta);
double log_posterior_grad(std::span<const Response> responses,
                          const Prior& prior, double theta);

/// Posterior mode. When the mode lies outside [kThetaMin, kThetaMax] the
/// nearest bound is returned. Throws EstimationFailure after max_iter
/// iterations without reaching gradient_tol.
AbilityEstimate estimate_map(std::span<const Response> responses,
                             const Prior& prior = {},
                             const MapOptions& options = {});

/// Posterior mean by trapezoid quadrature with n_quadrature nodes.
AbilityEstimate estimate_eap(std::span<const Response> responses,
                             const Prior& prior = {},
                             int n_quadrature = kDefaultQuadratureNodes);

AbilityEstimate estimate(std::span<const Response> responses,
                         const Prior& prior, Estimator method,
                         int n_quadrature = kDefaultQuadratureNodes);

/// Element l (0-based) is the estimate over the first l + 1 responses.
/// Estimation failures are rethrown with the 1-based position attached.
std::vector<AbilityEstimate> sequential_trace(
    std::span<const Response> ordered_responses, const Prior& prior,
    Estimator method, int n_quadrature = kDefaultQuadratureNodes);

}  // namespace adaptest

#endif  // ADAPTEST_ABILITY_HPP
