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

// eitcool <config> [--out DIR] [--seed N] [--threads N] [--strict]

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eitcool/config.hpp"
#include "eitcool/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"EIT and Doppler cooling simulator for trapped atoms and ions"};
  app.set_version_flag("--version", EITCOOL_VERSION);
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool strict = false;
  app.add_option("config", config_path, "Scenario configuration file (YAML)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Base random seed (overrides seed)");
  app.add_option("--threads", threads, "Maximum worker threads")->check(CLI::NonNegativeNumber);
  app.add_flag("--strict", strict, "Treat unknown configuration keys as errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto loaded = eitcool::config::load_config(config_path, {strict});
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
    eitcool::runner::RunOptions options;
    if (out_dir) options.output_dir = *out_dir;
    options.seed = seed;
    options.threads = threads;
    const auto result = eitcool::runner::run(loaded.config, options, loaded.warnings);
    for (std::size_t i = loaded.warnings.size(); i < result.warnings.size(); ++i)
      std::cerr << "warning: " << result.warnings[i] << '\n';
    for (const auto& f : result.files) std::cout << (result.output_dir / f).string() << '\n';
    return 0;
  } catch (...) {
    const auto e = std::current_exception();
    std::cerr << "eitcool: " << eitcool::runner::describe(e) << '\n';
    return eitcool::runner::exit_code(e);
  }
}
