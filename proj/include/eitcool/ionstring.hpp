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

// Linear Coulomb crystals in a harmonic trap and per-mode EIT cooling.
//
// Lengths are in units of l = (e^2 / (4 pi eps0 M w_ax^2))^(1/3); the axial
// Hessian in units of M w_ax^2 has eigenvalues lambda_q with nu_q = nu_ax sqrt(lambda_q).

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eitcool/core.hpp"

namespace eitcool::ionstring {

struct Mode {
  double frequency = 0.0;  // MHz
  Eigen::VectorXd vector;  // b_q, one entry per ion, unit norm
  int multiplicity = 1;    // 2 for the two degenerate radial directions
};

/// Dimensionless equilibrium u_1 < ... < u_N by damped Newton iteration.
std::vector<double> equilibrium_dimensionless(std::size_t n_ions);

/// l in metres.
double length_scale(const PhysicalSpecies& species, double nu_axial);

/// Equilibrium positions in micrometres.
std::vector<double> equilibrium_positions(std::size_t n_ions, const PhysicalSpecies& species, double nu_axial);

/// d^2 V / du_i du_j in units of M w_ax^2.
Eigen::MatrixXd axial_hessian(const std::vector<double>& u);

/// Ascending; lowest is the centre-of-mass mode at nu_axial.
std::vector<Mode> axial_modes(const std::vector<double>& u, double nu_axial);

/// Descending; highest is the centre-of-mass mode at nu_radial. Throws
/// DomainError ("zig-zag instability") when a frequency turns imaginary.
std::vector<Mode> radial_modes(const std::vector<double>& u, double nu_axial, double nu_radial);

/// 0.73 N^0.86 nu_axial.
double zigzag_threshold(std::size_t n_ions, double nu_axial);

struct IonString {
  std::size_t n_ions = 0;
  PhysicalSpecies species;
  double nu_axial = 0.0;
  double nu_radial = 0.0;
  std::vector<double> dimensionless;
  std::vector<double> positions;  // um
  std::vector<Mode> axial;
  std::vector<Mode> radial;

  double min_spacing() const;  // um
};

IonString build_string(std::size_t n_ions, const PhysicalSpecies& species, double nu_axial, double nu_radial);

struct Geometry {
  std::vector<bool> illuminated;  // per ion; empty means every ion
  double recoil_alpha = 1.0 / 3.0;
};

struct ModeCoolingRow {
  std::size_t index = 0;
  std::string kind;  // "axial" or "radial"
  double frequency = 0.0;
  double mbar = 0.0;
  double tau = 0.0;  // us
  std::string status;
};

/// Single-ion rate theory at each mode frequency. The cooling limit uses only the
/// spectrum; the cooling time uses sum_i (k b_q^(i) x0(nu_q))^2 over illuminated ions.
/// The beam projection is the probe coupling's axis_cosine. OpenMP over modes.
std::vector<ModeCoolingRow> multimode_cooling(const IonString& string, const LevelScheme& scheme,
                                              std::size_t probe, const Geometry& geometry);
std::vector<ModeCoolingRow> multimode_cooling_serial(const IonString& string, const LevelScheme& scheme,
                                                     std::size_t probe, const Geometry& geometry);

struct Blur {
  double relative = 0.0;      // Delta Omega / Omega
  double oscillations = 0.0;  // ~ 1 / relative
};

/// sqrt(sum eta_i^4 m_i (m_i + 1) / (3N - 1)).
Blur rabi_blur(const std::vector<double>& etas, const std::vector<double>& mbars, std::size_t n_ions);

/// Blur of a gate on the axial modes from a cooling table: each cooled axial
/// mode contributes its rms single-ion Lamb-Dicke factor for the gate light.
Blur spectator_blur(const std::vector<ModeCoolingRow>& rows, const PhysicalSpecies& gate, std::size_t n_ions);

/// `mode_index,kind,freq_mhz,mbar,tau_us`
void write_report_csv(std::ostream& os, const std::vector<ModeCoolingRow>& rows);
/// `ion_index,z_um`
void write_positions_csv(std::ostream& os, const IonString& string);

}  // namespace eitcool::ionstring
