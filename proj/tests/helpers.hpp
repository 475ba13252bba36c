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

// Level schemes shared by the test suites.

#include "eitcool/core.hpp"

namespace eitcool::testing {

inline LevelScheme two_level(double gamma, double rabi, double detuning) {
  return LevelScheme({{"g"}, {"e"}}, {{"g", "e", rabi, detuning}}, {{"e", "g", gamma}});
}

/// Lambda system g, r -> e with equal branching; coupling 0 is the probe (g-e),
/// coupling 1 the strong drive (r-e), which carries no axial momentum.
inline LevelScheme lambda(double gamma, double omega_g, double delta_g, double omega_r, double delta_r) {
  return LevelScheme({{"g"}, {"r"}, {"e"}},
                     {{"g", "e", omega_g, delta_g, 1.0}, {"r", "e", omega_r, delta_r, 0.0}},
                     {{"e", "g", gamma / 2}, {"e", "r", gamma / 2}});
}

/// Omega_r = gamma, Omega_g = gamma/20, Delta = 2.5 gamma, gamma = 1 MHz.
inline LevelScheme eit_reference() { return lambda(1.0, 0.05, 2.5, 1.0, 2.5); }

/// Zeeman Lambda: Omega_sigma = 30, Omega_pi = 0.5, Gamma = 20, Delta = 75 MHz.
inline LevelScheme zeeman_lambda() { return lambda(20.0, 0.5, 75.0, 30.0, 75.0); }

/// Four levels g, r, d -> e, branching 1/3 each, repumper on d-e.
inline LevelScheme four_level(double gamma, double omega_g, double omega_r, double delta, double omega_rp,
                              double delta_rp) {
  return LevelScheme({{"g"}, {"r"}, {"e"}, {"d"}},
                     {{"g", "e", omega_g, delta, 1.0}, {"r", "e", omega_r, delta, 0.0}, {"d", "e", omega_rp, delta_rp, 0.0}},
                     {{"e", "g", gamma / 3}, {"e", "r", gamma / 3}, {"e", "d", gamma / 3}});
}

inline LevelScheme mercury() { return four_level(64.0, 4.0, 21.0, 80.0, 2.0, 0.0); }
inline LevelScheme rubidium() { return four_level(6.0, 0.1, 1.2, 10.0, 1.0, 0.0); }

inline const PhysicalSpecies calcium_729{39.962590863, 729.0};
inline const PhysicalSpecies calcium_397{39.962590863, 397.0};
inline const PhysicalSpecies mercury_194{198.968, 194.0};
inline const PhysicalSpecies rubidium_780{86.909180527, 780.0};

}  // namespace eitcool::testing
