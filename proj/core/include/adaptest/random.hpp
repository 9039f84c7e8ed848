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

#ifndef ADAPTEST_RANDOM_HPP
#define ADAPTEST_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace adaptest {

/// Seeded random source used everywhere a draw is made.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions below are implemented here so that draws are
/// identical across standard library implementations; <random>'s
/// distributions leave their algorithms unspecified.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). `n` must be positive.
  std::size_t index(std::size_t n);

  double normal(double mean = 0.0, double sd = 1.0);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Mixes a master seed with stream coordinates into an independent seed.
/// Used to give every examinee and purpose its own stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t purpose = 0);

}  // namespace adaptest

#endif  // ADAPTEST_RANDOM_HPP
