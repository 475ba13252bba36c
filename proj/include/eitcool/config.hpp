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

// Run configuration: a YAML document with one scenario and the parameter
// blocks it needs. See docs/config.md for the schema.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eitcool/core.hpp"
#include "eitcool/trajectory.hpp"

namespace eitcool::config {

enum class Scenario { spectrum, cool, mc, string, thermometry, sweep };

const char* scenario_name(Scenario s) noexcept;

struct SpectrumBlock {
  double detuning_min = 0.0;
  double detuning_max = 0.0;
  std::size_t points = 0;
  std::optional<std::pair<double, double>> resonance_window;  // bright-resonance search

  bool operator==(const SpectrumBlock&) const = default;
};

struct CoolBlock {
  double initial_n = 0.0;
  double t_final = 0.0;  // us
  std::size_t samples = 201;
  std::optional<std::size_t> n_max;

  bool operator==(const CoolBlock&) const = default;
};

struct McBlock {
  std::size_t trajectories = 0;
  std::size_t n_max = 60;
  double t_final = 0.0;
  double dt = 0.0;
  double initial_n = 0.0;
  std::size_t samples = 201;
  trajectory::EmissionPattern emission = trajectory::EmissionPattern::isotropic;

  bool operator==(const McBlock&) const = default;
};

struct SweepBlock {
  double nu_min = 0.0;
  double nu_max = 0.0;
  std::size_t points = 0;

  bool operator==(const SweepBlock&) const = default;
};

struct StringBlock {
  std::size_t n_ions = 0;
  double nu_axial = 0.0;
  double nu_radial = 0.0;
  std::optional<double> gate_wavelength_nm;  // spectator-mode blur; off when absent
  std::vector<bool> illuminated;             // empty: all ions

  bool operator==(const StringBlock&) const = default;
};

struct ThermometryBlock {
  double mbar = 0.0;
  double eta = 0.0;
  double omega = 0.0;  // MHz
  double t_start = 0.0;
  double t_stop = 0.0;
  std::size_t points = 0;
  std::size_t shots = 0;  // per point; 0 = noiseless
  double decay = 0.0;
  std::size_t bootstrap = 0;
  std::size_t sideband_shots = 0;  // 0 = no sideband-ratio experiment
  std::optional<double> pulse_time;  // default: blue-sideband pi time

  bool operator==(const ThermometryBlock&) const = default;
};

struct RunConfig {
  Scenario scenario = Scenario::spectrum;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::optional<LevelScheme> scheme;
  std::size_t probe = 0;  // index into scheme couplings
  std::optional<TrapMode> mode;
  std::optional<PhysicalSpecies> species;
  std::optional<SpectrumBlock> spectrum;
  std::optional<CoolBlock> cool;
  std::optional<McBlock> mc;
  std::optional<SweepBlock> sweep;
  std::optional<StringBlock> string;
  std::optional<ThermometryBlock> thermometry;

  bool operator==(const RunConfig&) const = default;
};

struct LoadOptions {
  bool strict = true;  // unknown keys are errors; otherwise warnings
};

struct Loaded {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// Parses and validates. Throws ConfigError listing every problem, with
/// line:column positions where they are known.
Loaded parse_config(const std::string& text, const std::string& source_name = "<string>",
                    const LoadOptions& options = {});
Loaded load_config(const std::filesystem::path& path, const LoadOptions& options = {});

/// Canonical YAML; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

/// Git blob hash (SHA-1 of "blob <size>\0" + content) of the canonical form.
std::string config_hash(const RunConfig& config);

/// Builds the trajectory configuration of an mc run.
trajectory::TrajectoryConfig trajectory_config(const RunConfig& config);

}  // namespace eitcool::config
