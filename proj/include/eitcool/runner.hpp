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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eitcool/config.hpp"

namespace eitcool::runner {

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides config.output_dir
  std::optional<std::uint64_t> seed;                // overrides config.seed
  int threads = 0;                                  // OpenMP cap; 0 keeps the runtime default
};

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // written, relative to output_dir
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

/// Runs the scenario and writes its CSVs plus metadata.json into the output
/// directory. Nothing is written anywhere else. Errors propagate as exceptions.
RunResult run(const config::RunConfig& config, const RunOptions& options = {},
              std::vector<std::string> warnings = {});

/// config = 2, physics domain = 3, numerical = 4, anything else = 1.
int exit_code(const std::exception_ptr& error) noexcept;

/// One-line machine-readable description: `error category=<name> exit=<code>: <message>`.
std::string describe(const std::exception_ptr& error);

}  // namespace eitcool::runner
