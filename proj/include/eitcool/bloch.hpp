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

// Driven-dissipative internal dynamics: Lindblad master equation in the
// rotating frame (rotating-wave approximation, drive matrix elements Omega/2,
// frame energies on the diagonal), its steady state, and absorption spectra.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eitcool/core.hpp"

namespace eitcool::bloch {

using ComplexMatrix = Eigen::MatrixXcd;

/// Hermitian, unit-trace, positive semidefinite density matrix.
class DensityMatrix {
 public:
  /// Enforces the invariants on a raw solver output. Eigenvalues in
  /// (-1e-6, -1e-9) are clipped to zero; anything below -1e-6 is a
  /// NumericalError, as are a Hermiticity or trace defect above 1e-8.
  static DensityMatrix from_raw(const ComplexMatrix& raw);

  const ComplexMatrix& matrix() const noexcept { return rho_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
  double population(std::size_t level) const { return rho_(level, level).real(); }
  double min_eigenvalue() const;

 private:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {}
  ComplexMatrix rho_;
};

/// W sampled over probe detunings.
struct Spectrum {
  struct Failure {
    std::size_t index;
    std::string message;
  };
  std::vector<double> probe_detunings;  // MHz
  std::vector<double> rates;            // MHz; NaN where the point failed
  std::vector<Failure> failures;        // ordered by index
};

ComplexMatrix hamiltonian(const LevelScheme& scheme);

/// Superoperator acting on the row-major vectorisation rho(i,j) -> i*n + j.
ComplexMatrix liouvillian(const LevelScheme& scheme);

/// d rho / dt evaluated directly from commutators (no vectorisation).
ComplexMatrix master_equation_rhs(const LevelScheme& scheme, const ComplexMatrix& rho);

/// Unique stationary state, from a dense solve of L rho = 0 with the trace
/// condition replacing the first population equation.
DensityMatrix steady_state(const LevelScheme& scheme);

/// W = sum over decay channels of rate * population(from).
double scattering_rate(const LevelScheme& scheme, const DensityMatrix& rho);
double scattering_rate(const LevelScheme& scheme);

/// W(Delta_probe) on a uniform grid; other parameters held fixed. OpenMP over points.
Spectrum absorption_spectrum(const LevelScheme& scheme, std::size_t probe, double detuning_min,
                             double detuning_max, std::size_t points);
/// Serial reference for `absorption_spectrum`; identical output.
Spectrum absorption_spectrum_serial(const LevelScheme& scheme, std::size_t probe,
                                    double detuning_min, double detuning_max, std::size_t points);

/// Light shift of the narrow dressed state: (sqrt(Delta_r^2 + Omega_r^2) - |Delta_r|) / 2.
double ac_stark_shift(double delta_r, double omega_r) noexcept;

struct Resonance {
  double position;   // probe detuning of the maximum, MHz
  double fwhm;       // MHz
  double peak_rate;  // W at the maximum, MHz
};

/// Locates the single maximum of W inside [window_min, window_max]: coarse grid,
/// golden-section refinement to 1e-4 of the window, FWHM from interpolated
/// half-maximum crossings. The caller keeps the broad resonance out of the window.
Resonance find_bright_resonance(const LevelScheme& scheme, std::size_t probe, double window_min,
                                double window_max, std::size_t grid_points = 801);

/// `detuning_mhz,rate_mhz`, 17 significant digits.
void write_csv(std::ostream& os, const Spectrum& spectrum);

}  // namespace eitcool::bloch
