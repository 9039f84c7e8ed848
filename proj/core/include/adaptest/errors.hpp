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

#ifndef ADAPTEST_ERRORS_HPP
#define ADAPTEST_ERRORS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace adaptest {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Ability estimation did not converge. Carries the last iterate and, when
/// raised from a sequential trace, the 1-based response position.
class EstimationFailure : public Error {
 public:
  EstimationFailure(const std::string& what, double last_iterate,
                    std::optional<std::size_t> position = std::nullopt)
      : Error(what), last_iterate_(last_iterate), position_(position) {}

  double last_iterate() const noexcept { return last_iterate_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  double last_iterate_;
  std::optional<std::size_t> position_;
};

/// No eligible item remains for a selection rule.
class SelectionExhausted : public Error {
 public:
  using Error::Error;
};

/// Operation invalid for the current session state.
class StateError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, int sweeps, double max_change)
      : Error(what), sweeps_(sweeps), max_change_(max_change) {}

  int sweeps() const noexcept { return sweeps_; }
  double max_change() const noexcept { return max_change_; }

 private:
  int sweeps_;
  double max_change_;
};

/// Malformed input text. `row()` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptest

#endif  // ADAPTEST_ERRORS_HPP
