// Copyright 2026 The eitcool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace eitcool {

/// Coarse failure class, mapped one-to-one onto CLI exit codes.
enum class ErrorCategory {
  config = 2,    ///< malformed or invalid input
  domain = 3,    ///< physically meaningless request (net heating, unstable string, ...)
  numerical = 4  ///< solver breakdown, truncation too small, non-convergence
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// A_- <= A_+: the mode heats instead of cooling.
class NetHeatingError : public DomainError {
 public:
  NetHeatingError(double a_plus, double a_minus);
  double a_plus() const noexcept { return a_plus_; }
  double a_minus() const noexcept { return a_minus_; }

 private:
  double a_plus_;
  double a_minus_;
};

}  // namespace eitcool
