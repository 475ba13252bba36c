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

// Simulated sideband and Rabi-flop thermometry of a thermal mode.
//
// Omega * t is taken in radians: carrier sin^2(Omega t), red sideband
// sin^2(eta Omega sqrt(n) t), blue sideband sin^2(eta Omega sqrt(n+1) t).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace eitcool::thermometry {

struct SidebandCounts {
  std::size_t red_excited = 0;
  std::size_t blue_excited = 0;
  std::size_t shots_per_side = 0;

  void validate() const;
};

struct SidebandEstimate {
  double mbar = 0.0;
  double lower = 0.0;  // 95% interval, clipped at 0
  double upper = 0.0;
  bool one_sided = false;  // no red excitation: only an upper bound is meaningful
};

/// mbar = R / (1 - R) with R = red / blue. Binomial errors through the delta method.
SidebandEstimate sideband_ratio_to_n(const SidebandCounts& counts);

/// Pulse time of the n = 0 blue-sideband pi pulse, pi / (2 eta Omega).
double blue_pi_time(double eta, double omega);

/// Each shot draws its own n from the thermal distribution. pulse_time < 0 selects `blue_pi_time`.
SidebandCounts simulate_shelving(double mbar, double eta, double omega, double pulse_time, std::size_t shots,
                                 std::uint64_t seed);

struct RabiDataset {
  std::vector<double> times;       // us
  std::vector<double> excitation;  // probability
  std::size_t shots = 0;           // per point; 0 = noiseless

  void validate() const;
};

/// Blue-sideband flop P(t) = sum_n p_n sin^2(eta Omega sqrt(n+1) t). A positive decay
/// rate damps each component towards 1/2 as (1 - e^{-decay t} cos(2 eta Omega sqrt(n+1) t)) / 2.
RabiDataset rabi_signal(double mbar, double eta, double omega, const std::vector<double>& times,
                        double decay = 0.0);

/// Replaces each point by k / shots with k ~ Binomial(shots, p).
RabiDataset add_shot_noise(const RabiDataset& data, std::size_t shots, std::uint64_t seed);

struct FitOptions {
  double decay = 0.0;  // assumed known; 0 means the undamped model
  std::size_t bootstrap = 0;  // parametric resamples; needs data.shots > 0
  std::uint64_t seed = 0;
};

struct FitResult {
  double mbar = 0.0;
  double omega = 0.0;  // MHz
  double rss = 0.0;    // residual sum of squares
  double omega_seed = 0.0;  // periodogram estimate the search started from
  double coverage = 0.0;    // oscillations spanned, 2 eta Omega t_span / 2 pi
  std::size_t evaluations = 0;
  // Bootstrap, when requested.
  std::size_t resamples = 0;
  double mbar_stderr = 0.0;
  double mbar_lower = 0.0;  // 2.5% percentile
  double mbar_upper = 0.0;  // 97.5% percentile
  double omega_stderr = 0.0;

  /// p_0 = 1 / (mbar + 1).
  double ground_state_probability() const noexcept { return 1.0 / (mbar + 1.0); }
};

/// Least-squares (mbar, Omega) for a thermal blue-sideband flop: periodogram seed,
/// coarse grid, Nelder-Mead refinement with mbar = softplus(x).
FitResult fit_thermal(const RabiDataset& data, double eta, const FitOptions& options = {});
/// Same with the bootstrap run serially.
FitResult fit_thermal_serial(const RabiDataset& data, double eta, const FitOptions& options = {});

/// `t_us,p_excited,shots`
void write_dataset_csv(std::ostream& os, const RabiDataset& data);
/// `key = value` lines.
void write_fit_report(std::ostream& os, const FitResult& fit);

}  // namespace eitcool::thermometry
