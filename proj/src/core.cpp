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

#include "eitcool/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "eitcool/error.hpp"

namespace eitcool {

const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::config:
      return "config";
    case ErrorCategory::domain:
      return "physics-domain";
    case ErrorCategory::numerical:
      return "numerical";
  }
  return "unknown";
}

namespace {
std::string net_heating_message(double a_plus, double a_minus) {
  std::ostringstream os;
  os.precision(17);
  os << "net heating: A+ = " << a_plus << " MHz >= A- = " << a_minus << " MHz";
  return os.str();
}
}  // namespace

NetHeatingError::NetHeatingError(double a_plus, double a_minus)
    : DomainError(net_heating_message(a_plus, a_minus)), a_plus_(a_plus), a_minus_(a_minus) {}

LevelScheme::LevelScheme(std::vector<Level> levels, std::vector<LaserField> couplings,
                         std::vector<DecayChannel> decays)
    : levels_(std::move(levels)), couplings_(std::move(couplings)), decays_(std::move(decays)) {
  validate_and_build_frame();
}

std::size_t LevelScheme::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].label == label) return i;
  throw ConfigError("unknown level label '" + std::string(label) + "'");
}

std::optional<std::size_t> LevelScheme::find_coupling(std::string_view lower,
                                                      std::string_view upper) const {
  for (std::size_t i = 0; i < couplings_.size(); ++i)
    if (couplings_[i].lower == lower && couplings_[i].upper == upper) return i;
  return std::nullopt;
}

double LevelScheme::linewidth(std::string_view label) const {
  double gamma = 0.0;
  for (const auto& d : decays_)
    if (d.from == label) gamma += d.rate;
  return gamma;
}

void LevelScheme::validate_and_build_frame() {
  std::vector<std::string> errors;
  auto has = [&](const std::string& l) {
    return std::any_of(levels_.begin(), levels_.end(), [&](const Level& x) { return x.label == l; });
  };

  if (levels_.empty()) errors.emplace_back("level scheme has no levels");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].label.empty()) errors.emplace_back("level " + std::to_string(i) + " has an empty label");
    if (!std::isfinite(levels_[i].energy_offset))
      errors.emplace_back("level '" + levels_[i].label + "' has a non-finite energy offset");
    for (std::size_t j = 0; j < i; ++j)
      if (levels_[i].label == levels_[j].label)
        errors.emplace_back("duplicate level label '" + levels_[i].label + "'");
  }
  for (const auto& c : couplings_) {
    const std::string name = "coupling " + c.lower + "->" + c.upper;
    if (!has(c.lower) || !has(c.upper)) errors.emplace_back(name + " references an unknown level");
    if (c.lower == c.upper) errors.emplace_back(name + " couples a level to itself");
    if (!(c.rabi >= 0.0) || !std::isfinite(c.rabi)) errors.emplace_back(name + ": rabi must be >= 0");
    if (!std::isfinite(c.detuning)) errors.emplace_back(name + ": detuning must be finite");
    if (!(std::abs(c.axis_cosine) <= 1.0)) errors.emplace_back(name + ": |axis_cosine| must be <= 1");
  }
  for (const auto& d : decays_) {
    const std::string name = "decay " + d.from + "->" + d.to;
    if (!has(d.from) || !has(d.to)) errors.emplace_back(name + " references an unknown level");
    if (d.from == d.to) errors.emplace_back(name + " decays a level into itself");
    if (!(d.rate > 0.0) || !std::isfinite(d.rate)) errors.emplace_back(name + ": rate must be > 0");
  }
  if (!errors.empty()) {
    std::string msg = "invalid level scheme:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  // Frame energies: E_upper - E_lower = -Delta along every drive. A breadth-first
  // walk over the (undirected) drive graph assigns them; revisiting an assigned
  // level through a different path is the loop-consistency check.
  const std::size_t n = levels_.size();
  frame_energies_.assign(n, 0.0);
  std::vector<bool> assigned(n, false);
  double scale = 1.0;
  for (const auto& c : couplings_) scale = std::max(scale, std::abs(c.detuning));

  for (std::size_t root = 0; root < n; ++root) {
    if (assigned[root]) continue;
    assigned[root] = true;
    frame_energies_[root] = levels_[root].energy_offset;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (const auto& c : couplings_) {
        const std::size_t lo = index_of(c.lower), up = index_of(c.upper);
        if (lo != cur && up != cur) continue;
        const std::size_t other = (lo == cur) ? up : lo;
        const double expected = (lo == cur) ? frame_energies_[cur] - c.detuning
                                            : frame_energies_[cur] + c.detuning;
        if (!assigned[other]) {
          assigned[other] = true;
          frame_energies_[other] = expected;
          queue.push_back(other);
        } else if (std::abs(frame_energies_[other] - expected) > 1e-9 * scale) {
          throw ConfigError("no consistent rotating frame: detunings around the drive loop through '" +
                            levels_[other].label + "' do not close (mismatch " +
                            std::to_string(frame_energies_[other] - expected) + " MHz)");
        }
      }
    }
  }
}

LevelScheme LevelScheme::with_detuning(std::size_t coupling, double detuning) const {
  auto couplings = couplings_;
  couplings.at(coupling).detuning = detuning;
  return {levels_, std::move(couplings), decays_};
}

LevelScheme LevelScheme::with_rabi(std::size_t coupling, double rabi) const {
  auto couplings = couplings_;
  couplings.at(coupling).rabi = rabi;
  return {levels_, std::move(couplings), decays_};
}

LevelScheme LevelScheme::scaled(double c) const {
  auto levels = levels_;
  auto couplings = couplings_;
  auto decays = decays_;
  for (auto& l : levels) l.energy_offset *= c;
  for (auto& x : couplings) {
    x.rabi *= c;
    x.detuning *= c;
  }
  for (auto& d : decays) d.rate *= c;
  return {std::move(levels), std::move(couplings), std::move(decays)};
}

void TrapMode::validate() const {
  std::vector<std::string> errors;
  if (!(frequency > 0.0) || !std::isfinite(frequency)) errors.emplace_back("frequency must be > 0");
  if (!(lamb_dicke > 0.0) || !std::isfinite(lamb_dicke)) errors.emplace_back("lamb_dicke must be > 0");
  if (!(recoil_alpha >= 0.0 && recoil_alpha <= 1.0)) errors.emplace_back("recoil_alpha must lie in [0, 1]");
  if (errors.empty()) return;
  std::string msg = "TrapMode invariant violated:";
  for (const auto& e : errors) msg += " " + e + ";";
  throw ConfigError(msg);
}

std::optional<std::string> TrapMode::lamb_dicke_warning(double mbar) const {
  const double x = lamb_dicke * std::sqrt(std::max(mbar, 0.0));
  if (x < 0.3) return std::nullopt;
  return "eta*sqrt(mbar) = " + std::to_string(x) + " >= 0.3: outside the Lamb-Dicke regime, lowest-order rates are unreliable";
}

void PhysicalSpecies::validate() const {
  if (!(mass_amu > 0.0) || !std::isfinite(mass_amu))
    throw DomainError("PhysicalSpecies: mass must be > 0");
  if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm))
    throw DomainError("PhysicalSpecies: wavelength must be > 0");
}

double PhysicalSpecies::wavenumber() const noexcept {
  return 2.0 * std::numbers::pi / (wavelength_nm * 1e-9);
}

double ground_state_extent(const PhysicalSpecies& species, double nu_mhz) {
  species.validate();
  if (!(nu_mhz > 0.0)) throw DomainError("trap frequency must be > 0");
  return std::sqrt(constants::hbar / (2.0 * species.mass_kg() * angular_frequency(nu_mhz)));
}

double lamb_dicke_single(const PhysicalSpecies& species, double nu_mhz, double axis_cosine) {
  return std::abs(axis_cosine) * species.wavenumber() * ground_state_extent(species, nu_mhz);
}

}  // namespace eitcool
