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

// Shared domain types for the EIT-cooling simulator.
//
// Unit convention: every Rabi frequency, detuning, linewidth and trap
// frequency is a plain number in MHz, exactly as quoted in figure captions.
// Formulas that only compare like quantities (rates, spectra, ac-Stark shift)
// use them directly and time comes out in microseconds. Only code that touches
// hbar (Lamb-Dicke factors, ion-string geometry) converts a trap frequency to
// an angular frequency, through `angular_frequency`, exactly once.

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eitcool {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;             // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
}  // namespace constants

/// MHz (cyclic) -> rad/s.
constexpr double angular_frequency(double nu_mhz) noexcept {
  return 2.0 * std::numbers::pi * nu_mhz * 1e6;
}
/// rad/s -> MHz (cyclic).
constexpr double cyclic_frequency_mhz(double omega_rad_s) noexcept {
  return omega_rad_s / (2.0 * std::numbers::pi * 1e6);
}

struct Level {
  std::string label;
  double energy_offset = 0.0;  // MHz; anchors the rotating frame of its drive component

  bool operator==(const Level&) const = default;
};

struct DecayChannel {
  std::string from;
  std::string to;
  double rate = 0.0;  // MHz

  bool operator==(const DecayChannel&) const = default;
};

/// One coherent drive between two levels.
struct LaserField {
  std::string lower;
  std::string upper;
  double rabi = 0.0;         // Omega, MHz
  double detuning = 0.0;     // Delta, MHz, positive = blue of resonance
  double axis_cosine = 1.0;  // cos(theta) of k on the trap axis

  bool operator==(const LaserField&) const = default;
};

/// Validated level scheme. Immutable; modified copies are produced by the
/// `with_*` / `scaled` helpers, which re-run validation.
class LevelScheme {
 public:
  LevelScheme(std::vector<Level> levels, std::vector<LaserField> couplings,
              std::vector<DecayChannel> decays);

  const std::vector<Level>& levels() const noexcept { return levels_; }
  const std::vector<LaserField>& couplings() const noexcept { return couplings_; }
  const std::vector<DecayChannel>& decays() const noexcept { return decays_; }
  std::size_t dimension() const noexcept { return levels_.size(); }

  std::size_t index_of(std::string_view label) const;
  std::optional<std::size_t> find_coupling(std::string_view lower, std::string_view upper) const;

  /// Rotating-frame energy of every level (MHz), derived from the detunings.
  const std::vector<double>& frame_energies() const noexcept { return frame_energies_; }

  /// Total decay rate out of a level: its linewidth gamma.
  double linewidth(std::string_view label) const;

  LevelScheme with_detuning(std::size_t coupling, double detuning) const;
  LevelScheme with_rabi(std::size_t coupling, double rabi) const;
  /// Multiplies every Rabi frequency, detuning, decay rate and energy offset by c.
  LevelScheme scaled(double c) const;

  bool operator==(const LevelScheme& other) const {
    return levels_ == other.levels_ && couplings_ == other.couplings_ && decays_ == other.decays_;
  }

 private:
  void validate_and_build_frame();

  std::vector<Level> levels_;
  std::vector<LaserField> couplings_;
  std::vector<DecayChannel> decays_;
  std::vector<double> frame_energies_;
};

/// One harmonic trap mode.
struct TrapMode {
  double frequency = 0.0;           // nu, MHz
  double lamb_dicke = 0.0;          // eta
  double recoil_alpha = 1.0 / 3.0;  // average projection of spontaneous recoil on the axis

  bool operator==(const TrapMode&) const = default;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
  /// Non-empty when eta*sqrt(mbar) leaves the Lamb-Dicke regime (>= 0.3).
  std::optional<std::string> lamb_dicke_warning(double mbar) const;
};

struct PhysicalSpecies {
  double mass_amu = 0.0;
  double wavelength_nm = 0.0;

  bool operator==(const PhysicalSpecies&) const = default;

  void validate() const;
  double mass_kg() const noexcept { return mass_amu * constants::atomic_mass_unit; }
  double wavenumber() const noexcept;  // k = 2 pi / lambda, 1/m
};

/// Ground-state wave-packet size of a mode of frequency nu (MHz), in metres.
double ground_state_extent(const PhysicalSpecies& species, double nu_mhz);

/// eta = |cos theta| k sqrt(hbar / (2 M 2 pi nu)).
double lamb_dicke_single(const PhysicalSpecies& species, double nu_mhz, double axis_cosine);

}  // namespace eitcool
