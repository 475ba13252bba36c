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

// Lowest-order Lamb-Dicke rate equations for one vibrational mode.
//
//   d<n>/dt = -(A- - A+) <n> + A+
//   A+- = eta^2 (alpha W(Delta) + cos^2(theta) W(Delta -+ nu))
//
// A- samples W at Delta + nu: the red sideband |g,n> -> |e,n-1> needs an extra
// nu of photon energy, so it sits where the probe is detuned further to the blue.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eitcool/core.hpp"

namespace eitcool::ratecool {

struct CoolingRates {
  double a_plus = 0.0;   // heating, MHz
  double a_minus = 0.0;  // cooling, MHz

  bool operator==(const CoolingRates&) const = default;
};

using SpectrumFn = std::function<double(double)>;

/// A+- without the eta^2 prefactor. Enough for the cooling limit.
CoolingRates reduced_coefficients(const SpectrumFn& w, double delta, double nu, double axis_cosine,
                                  double alpha);

/// `eta` is the bare Lamb-Dicke factor; the beam projection enters via axis_cosine.
CoolingRates rate_coefficients(const SpectrumFn& w, double delta, double nu, double eta, double axis_cosine,
                               double alpha);

/// Convenience: W from the steady state of `scheme` with the detuning of coupling
/// `probe` varied; Delta, cos(theta) are taken from that coupling.
CoolingRates rate_coefficients(const LevelScheme& scheme, std::size_t probe, const TrapMode& mode);

/// A+ / (A- - A+). Throws NetHeatingError when A- <= A+.
double steady_state_n(const CoolingRates& rates);

/// 1 / (A- - A+) in microseconds (rates are in MHz).
double cooling_time(const CoolingRates& rates);

/// Closed-form solution of the first-moment equation; grows when A- <= A+.
std::vector<double> evolve_mean_n(const CoolingRates& rates, double n0, const std::vector<double>& times);

/// p_n for n = 0..n_max.
struct PhononDistribution {
  std::vector<double> p;
  double truncation_loss = 0.0;  // probability outside 0..n_max before renormalisation

  std::size_t n_max() const noexcept { return p.empty() ? 0 : p.size() - 1; }
  double mean() const noexcept;
  double total() const noexcept;
  /// Throws NumericalError if any p_n < 0 or the sum is off by more than 1e-9.
  void validate() const;
};

/// m^n / (m+1)^(n+1), renormalised over 0..n_max.
PhononDistribution thermal_distribution(double mbar, std::size_t n_max);

/// max(60, ceil(10 (1 + n0))).
std::size_t default_n_max(double n0);

struct EvolveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  double max_leakage = 1e-6;
};

/// Integrates the birth-death equations
///   dp_n/dt = A+ [n p_{n-1} - (n+1) p_n] + A- [(n+1) p_{n+1} - n p_n]
/// with the top level reflecting. The flux that would have left the top,
/// int A+ (n_max+1) p_{n_max} dt, is stored as truncation_loss.
/// Throws NumericalError ("truncation too small") when it exceeds max_leakage.
PhononDistribution evolve_populations(const CoolingRates& rates, const PhononDistribution& p0, double t,
                                      const EvolveOptions& options = {});

/// Same, extending p0 with zeros and doubling n_max on truncation failure (at most 4 times).
PhononDistribution evolve_populations_adaptive(const CoolingRates& rates, const PhononDistribution& p0,
                                               double t, const EvolveOptions& options = {});

/// Set when the probe Rabi frequency exceeds gamma/5 of its upper level:
/// the rate picture assumes weak excitation.
std::optional<std::string> saturation_warning(const LevelScheme& scheme, std::size_t probe);

struct SweepRow {
  double nu = 0.0;   // MHz
  double eta = 0.0;  // bare Lamb-Dicke factor from the species
  double mbar = 0.0;
  double tau = 0.0;  // us
  std::string status;  // "ok" or the reason the row has no limit
};

/// Cooling limit and time over nu in [nu_min, nu_max]; eta is recomputed per point
/// from the species. Net heating is reported per row. OpenMP over points.
std::vector<SweepRow> band_sweep(const LevelScheme& scheme, std::size_t probe, const PhysicalSpecies& species,
                                 const TrapMode& mode_template, double nu_min, double nu_max, std::size_t points);
std::vector<SweepRow> band_sweep_serial(const LevelScheme& scheme, std::size_t probe,
                                        const PhysicalSpecies& species, const TrapMode& mode_template,
                                        double nu_min, double nu_max, std::size_t points);

/// `nu_mhz,mbar,tau_us,status`
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// `t_us,mean_n`
void write_mean_n_csv(std::ostream& os, const std::vector<double>& times, const std::vector<double>& mean_n);
/// `n,p_n`
void write_distribution_csv(std::ostream& os, const PhononDistribution& p);

}  // namespace eitcool::ratecool
