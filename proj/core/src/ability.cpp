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

#include "adaptest/ability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "adaptest/errors.hpp"

namespace adaptest {

namespace {

double log_prior(const Prior& prior, double theta) {
  const double z = (theta - prior.mean) / prior.sd;
  return -0.5 * z * z - std::log(prior.sd) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

double log_posterior_hessian(std::span<const Response> responses,
                             const Prior& prior, double theta) {
  const double prior_term = -1.0 / (prior.sd * prior.sd);
  if (responses.empty()) return prior_term;
  return log_likelihood_hessian(responses, theta) + prior_term;
}

}  // namespace

void validate(const Prior& prior) {
  if (!std::isfinite(prior.mean) || !std::isfinite(prior.sd) ||
      !(prior.sd > 0.0)) {
    throw InvalidArgument("prior needs a finite mean and a positive sd");
  }
}

double log_posterior(std::span<const Response> responses, const Prior& prior,
                     double theta) {
  const double prior_term = log_prior(prior, theta);
  if (responses.empty()) return prior_term;
  return log_likelihood(responses, theta) + prior_term;
}

double log_posterior_grad(std::span<const Response> responses,
                          const Prior& prior, double theta) {
  const double prior_term = -(theta - prior.mean) / (prior.sd * prior.sd);
  if (responses.empty()) return prior_term;
  return log_likelihood_grad(responses, theta) + prior_term;
}

AbilityEstimate estimate_map(std::span<const Response> responses,
                             const Prior& prior, const MapOptions& options) {
  validate(prior);
  AbilityEstimate result{0.0, Estimator::MAP, responses.size()};

  // The log posterior is strictly concave, so its gradient is decreasing and
  // [lo, hi] always brackets the mode.
  double lo = kThetaMin;
  double hi = kThetaMax;
  if (log_posterior_grad(responses, prior, lo) <= 0.0) {
    result.value = lo;
    return result;
  }
  if (log_posterior_grad(responses, prior, hi) >= 0.0) {
    result.value = hi;
    return result;
  }

  double theta = std::clamp(prior.mean, lo, hi);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double g = log_posterior_grad(responses, prior, theta);
    if (std::abs(g) < options.gradient_tol) {
      result.value = theta;
      return result;
    }
    if (g > 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    const double h = log_posterior_hessian(responses, prior, theta);
    const double step =
        std::clamp(-g / h, -options.max_step, options.max_step);
    double next = theta + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta) break;
    theta = next;
  }
  throw EstimationFailure("MAP ability estimate did not converge after " +
                              std::to_string(options.max_iter) +
                              " iterations",
                          theta);
}

AbilityEstimate estimate_eap(std::span<const Response> responses,
                             const Prior& prior, int n_quadrature) {
  validate(prior);
  if (n_quadrature < kMinQuadratureNodes) {
    throw InvalidArgument("EAP needs at least " +
                          std::to_string(kMinQuadratureNodes) +
                          " quadrature nodes");
  }
  const auto n = static_cast<std::size_t>(n_quadrature);
  const double lo = prior.mean - 5.0 * prior.sd;
  const double step = 10.0 * prior.sd / static_cast<double>(n - 1);

  std::vector<double> nodes(n);
  std::vector<double> log_weights(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = lo + step * static_cast<double>(i);
    log_weights[i] = log_posterior(responses, prior, nodes[i]);
    max_log = std::max(max_log, log_weights[i]);
  }

  double mass = 0.0;
  double first_moment = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double end_factor = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    const double w = end_factor * std::exp(log_weights[i] - max_log);
    mass += w;
    first_moment += w * nodes[i];
  }
  return {first_moment / mass, Estimator::EAP, responses.size()};
}

AbilityEstimate estimate(std::span<const Response> responses,
                         const Prior& prior, Estimator method,
                         int n_quadrature) {
  return method == Estimator::MAP ? estimate_map(responses, prior)
                                  : estimate_eap(responses, prior, n_quadrature);
}

std::vector<AbilityEstimate> sequential_trace(
    std::span<const Response> ordered_responses, const Prior& prior,
    Estimator method, int n_quadrature) {
  if (ordered_responses.empty()) {
    throw InvalidArgument("sequential trace needs at least one response");
  }
  std::vector<AbilityEstimate> trace;
  trace.reserve(ordered_responses.size());
  for (std::size_t l = 1; l <= ordered_responses.size(); ++l) {
    try {
      trace.push_back(estimate(ordered_responses.first(l), prior, method,
                               n_quadrature));
    } catch (const EstimationFailure& e) {
      throw EstimationFailure(
          std::string(e.what()) + " at position " + std::to_string(l),
          e.last_iterate(), l);
    }
  }
  return trace;
}

}  // namespace adaptest
