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

// Monte-Carlo wavefunction simulation of a driven level scheme coupled to one
// quantised mode, first order in the Lamb-Dicke factor.
//
// Basis index: level * (n_max + 1) + n.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eitcool/core.hpp"
#include "eitcool/ratecool.hpp"

namespace eitcool::trajectory {

/// Axial projection u of the spontaneous recoil, drawn per jump.
enum class EmissionPattern {
  isotropic,  ///< u uniform on [-1, 1] (direction uniform on the sphere), <u^2> = 1/3
  fixed,      ///< u = +-sqrt(recoil_alpha), <u^2> = recoil_alpha
};

struct TrajectoryConfig {
  LevelScheme scheme;
  TrapMode mode;  // lamb_dicke is the bare factor; each drive adds its axis_cosine
  std::size_t n_max = 60;
  double t_final = 0.0;  // us
  double dt = 0.0;       // us; base step, halved while a step loses > 10% norm
  std::uint64_t seed = 0;
  double initial_n = 0.0;  // thermal mean of the starting Fock mixture
  std::size_t samples = 201;  // recording grid points over [0, t_final]
  EmissionPattern emission = EmissionPattern::isotropic;

  /// Throws ConfigError listing every violated invariant.
  void validate() const;
};

struct TrajectoryRecord {
  std::vector<double> times;   // us
  std::vector<double> mean_n;  // <n> at each time
  std::vector<double> tail_pn;  // p_n averaged over the recorded points with t >= 0.8 t_final
  double tail_mean_n = 0.0;     // <n> averaged over the same points
  std::size_t jumps = 0;
  std::uint64_t seed = 0;
  double max_norm_increase = 0.0;  // largest relative growth of |psi|^2 over a no-jump step
  double max_renorm_defect = 0.0;  // largest ||psi|^2 - 1| right after a renormalisation
};

/// Seed of trajectory `index`: splitmix64(base + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t trajectory_seed(std::uint64_t base, std::size_t index) noexcept;


TrajectoryRecord run_trajectory(const TrajectoryConfig& config);

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> mean_n;
  std::vector<double> stderr_n;  // sample std / sqrt(n_trajectories)
  ratecool::PhononDistribution steady_pn;
  std::vector<double> steady_pn_stderr;
  double steady_mean_n = 0.0;  // mean over trajectories of the tail-averaged <n>
  double steady_stderr = 0.0;
  std::size_t n_trajectories = 0;
  std::size_t total_jumps = 0;
  std::uint64_t seed = 0;
};

/// Independent trajectories with seeds from `trajectory_seed`, OpenMP over
/// trajectories; output is independent of the thread count.
EnsembleResult ensemble_average(const TrajectoryConfig& config, std::size_t n_trajectories);
/// Serial reference for `ensemble_average`; bit-identical output.
EnsembleResult ensemble_average_serial(const TrajectoryConfig& config, std::size_t n_trajectories);

/// `t_us,mean_n,stderr_n`
void write_ensemble_csv(std::ostream& os, const EnsembleResult& result);

}  // namespace eitcool::trajectory
