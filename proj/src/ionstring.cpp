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

#include "eitcool/ionstring.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "eitcool/bloch.hpp"
#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"
#include "eitcool/ratecool.hpp"

namespace eitcool::ionstring {

namespace {

constexpr int kMaxNewton = 200;
constexpr double kNewtonTol = 1e-12;

Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd f(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    double r = u(m);
    for (Eigen::Index j = 0; j < m; ++j) r -= 1.0 / ((u(m) - u(j)) * (u(m) - u(j)));
    for (Eigen::Index j = m + 1; j < n; ++j) r += 1.0 / ((u(j) - u(m)) * (u(j) - u(m)));
    f(m) = r;
  }
  return f;
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
      a(i, j) = -c;
      a(i, i) += c;
    }
  return a;
}

bool ordered(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u(i) > u(i - 1))) return false;
  return true;
}

// Unit eigenvectors with a deterministic sign: largest-magnitude entry positive.
void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index imax = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax)) + 1e-12) imax = i;
  if (v(imax) < 0.0) v = -v;
}

}  // namespace

std::vector<double> equilibrium_dimensionless(std::size_t n_ions) {
  if (n_ions == 0) throw ConfigError("an ion string needs at least one ion");
  const auto n = static_cast<Eigen::Index>(n_ions);
  if (n == 1) return {0.0};
  // Uniform seed spanning roughly the known extent of the crystal.
  const double half = 1.0 * std::pow(static_cast<double>(n), 0.56);
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);

  Eigen::VectorXd f = force_residual(u);
  double res = f.cwiseAbs().maxCoeff();
  int it = 0;
  for (; it < kMaxNewton && res >= kNewtonTol; ++it) {
    const Eigen::VectorXd step = hessian(u).ldlt().solve(-f);
    double damping = 1.0;
    for (int h = 0; h < 60; ++h, damping *= 0.5) {
      const Eigen::VectorXd trial = u + damping * step;
      if (!ordered(trial)) continue;
      const Eigen::VectorXd ft = force_residual(trial);
      const double rt = ft.cwiseAbs().maxCoeff();
      if (rt < res || h == 59) {
        u = trial;
        f = ft;
        res = rt;
        break;
      }
    }
  }
  if (res >= kNewtonTol)
    throw NumericalError("ion equilibrium did not converge after " + std::to_string(kMaxNewton) +
                         " Newton iterations (max residual " + csv::format(res) + ")");
  // Enforce the mirror symmetry exactly.
  std::vector<double> out(n_ions);
  for (std::size_t i = 0; i < n_ions; ++i) {
    const double a = u(static_cast<Eigen::Index>(i));
    const double b = -u(static_cast<Eigen::Index>(n_ions - 1 - i));
    out[i] = 0.5 * (a + b);
  }
  if (n_ions % 2 == 1) out[n_ions / 2] = 0.0;
  return out;
}

double length_scale(const PhysicalSpecies& species, double nu_axial) {
  species.validate();
  if (!(nu_axial > 0.0)) throw DomainError("axial frequency must be > 0");
  const double w = angular_frequency(nu_axial);
  const double e = constants::elementary_charge;
  return std::cbrt(e * e / (4.0 * std::numbers::pi * constants::vacuum_permittivity * species.mass_kg() * w * w));
}

std::vector<double> equilibrium_positions(std::size_t n_ions, const PhysicalSpecies& species, double nu_axial) {
  const double l = length_scale(species, nu_axial) * 1e6;
  std::vector<double> z = equilibrium_dimensionless(n_ions);
  for (double& x : z) x *= l;
  return z;
}

Eigen::MatrixXd axial_hessian(const std::vector<double>& u) {
  return hessian(Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())));
}

std::vector<Mode> axial_modes(const std::vector<double>& u, double nu_axial) {
  if (!(nu_axial > 0.0)) throw DomainError("axial frequency must be > 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(axial_hessian(u));
  std::vector<Mode> modes;
  for (Eigen::Index q = 0; q < es.eigenvalues().size(); ++q) {
    const double lambda = es.eigenvalues()(q);
    if (!(lambda > 0.0)) throw DomainError("unstable configuration: axial Hessian eigenvalue " + csv::format(lambda));
    Mode m;
    m.frequency = nu_axial * std::sqrt(lambda);
    m.vector = es.eigenvectors().col(q).normalized();
    fix_sign(m.vector);
    modes.push_back(std::move(m));
  }
  return modes;
}

std::vector<Mode> radial_modes(const std::vector<double>& u, double nu_axial, double nu_radial) {
  if (!(nu_axial > 0.0) || !(nu_radial > 0.0)) throw DomainError("trap frequencies must be > 0");
  const auto n = static_cast<Eigen::Index>(u.size());
  const Eigen::MatrixXd b = 0.5 * (axial_hessian(u) - Eigen::MatrixXd::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  std::vector<Mode> modes;
  for (Eigen::Index q = 0; q < n; ++q) {
    const double mu = std::max(es.eigenvalues()(q), 0.0);
    const double arg = nu_radial * nu_radial - mu * nu_axial * nu_axial;
    if (arg <= 0.0)
      throw DomainError("zig-zag instability: radial mode " + std::to_string(q) + " has nu^2 = " + csv::format(arg) +
                        " MHz^2 (nu_radial = " + csv::format(nu_radial) + " MHz is below the linear-string limit " +
                        csv::format(std::sqrt(es.eigenvalues().maxCoeff()) * nu_axial) + " MHz)");
    Mode m;
    m.frequency = std::sqrt(arg);
    m.vector = es.eigenvectors().col(q).normalized();
    fix_sign(m.vector);
    m.multiplicity = 2;
    modes.push_back(std::move(m));
  }
  return modes;  // eigenvalues ascend, so frequencies descend
}

double zigzag_threshold(std::size_t n_ions, double nu_axial) {
  if (n_ions < 2) throw DomainError("the zig-zag threshold needs at least 2 ions");
  return 0.73 * std::pow(static_cast<double>(n_ions), 0.86) * nu_axial;
}

double IonString::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < positions.size(); ++i) m = std::min(m, positions[i] - positions[i - 1]);
  return m;
}

IonString build_string(std::size_t n_ions, const PhysicalSpecies& species, double nu_axial, double nu_radial) {
  IonString s;
  s.n_ions = n_ions;
  s.species = species;
  s.nu_axial = nu_axial;
  s.nu_radial = nu_radial;
  s.dimensionless = equilibrium_dimensionless(n_ions);
  const double l = length_scale(species, nu_axial) * 1e6;
  s.positions = s.dimensionless;
  for (double& x : s.positions) x *= l;
  s.axial = axial_modes(s.dimensionless, nu_axial);
  s.radial = radial_modes(s.dimensionless, nu_axial, nu_radial);
  return s;
}

namespace {

ModeCoolingRow cool_mode(const IonString& str, const LevelScheme& scheme, std::size_t probe, const Geometry& g,
                         const Mode& mode, std::size_t index, const char* kind) {
  ModeCoolingRow row;
  row.index = index;
  row.kind = kind;
  row.frequency = mode.frequency;
  row.mbar = std::numeric_limits<double>::quiet_NaN();
  row.tau = std::numeric_limits<double>::quiet_NaN();
  try {
    const LaserField& field = scheme.couplings()[probe];
    auto w = [&](double d) { return bloch::scattering_rate(scheme.with_detuning(probe, d)); };
    const ratecool::CoolingRates reduced =
        ratecool::reduced_coefficients(w, field.detuning, mode.frequency, field.axis_cosine, g.recoil_alpha);
    // k x0 for a single ion at this frequency; the mode vector distributes it.
    const double kx0 = lamb_dicke_single(str.species, mode.frequency, 1.0);
    double eta2 = 0.0;
    for (Eigen::Index i = 0; i < mode.vector.size(); ++i) {
      if (!g.illuminated.empty() && !g.illuminated[static_cast<std::size_t>(i)]) continue;
      eta2 += kx0 * kx0 * mode.vector(i) * mode.vector(i);
    }
    if (!(reduced.a_minus > reduced.a_plus)) {
      if (reduced.a_minus == reduced.a_plus) row.tau = std::numeric_limits<double>::infinity();
      row.status = "no net cooling";
      return row;
    }
    row.mbar = ratecool::steady_state_n(reduced);
    const ratecool::CoolingRates rates{eta2 * reduced.a_plus, eta2 * reduced.a_minus};
    if (rates.a_minus > rates.a_plus) {
      row.tau = ratecool::cooling_time(rates);
      row.status = "ok";
    } else {
      row.tau = std::numeric_limits<double>::infinity();
      row.status = "no coupling";
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

struct ModeRef {
  const Mode* mode;
  std::size_t index;
  const char* kind;
};

std::vector<ModeRef> mode_list(const IonString& s, const LevelScheme& scheme, std::size_t probe,
                               const Geometry& g) {
  if (probe >= scheme.couplings().size())
    throw ConfigError("probe coupling index " + std::to_string(probe) + " does not exist in the scheme");
  if (!g.illuminated.empty() && g.illuminated.size() != s.n_ions)
    throw ConfigError("illumination mask has " + std::to_string(g.illuminated.size()) + " entries for " +
                      std::to_string(s.n_ions) + " ions");
  std::vector<ModeRef> refs;
  for (std::size_t q = 0; q < s.axial.size(); ++q) refs.push_back({&s.axial[q], q, "axial"});
  for (std::size_t q = 0; q < s.radial.size(); ++q) refs.push_back({&s.radial[q], q, "radial"});
  return refs;
}

}  // namespace

std::vector<ModeCoolingRow> multimode_cooling(const IonString& string, const LevelScheme& scheme,
                                              std::size_t probe, const Geometry& geometry) {
  const auto refs = mode_list(string, scheme, probe, geometry);
  std::vector<ModeCoolingRow> rows(refs.size());
  const auto n = static_cast<long long>(refs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    const auto& r = refs[static_cast<std::size_t>(i)];
    rows[static_cast<std::size_t>(i)] = cool_mode(string, scheme, probe, geometry, *r.mode, r.index, r.kind);
  }
  return rows;
}

std::vector<ModeCoolingRow> multimode_cooling_serial(const IonString& string, const LevelScheme& scheme,
                                                     std::size_t probe, const Geometry& geometry) {
  std::vector<ModeCoolingRow> rows;
  for (const auto& r : mode_list(string, scheme, probe, geometry))
    rows.push_back(cool_mode(string, scheme, probe, geometry, *r.mode, r.index, r.kind));
  return rows;
}

Blur rabi_blur(const std::vector<double>& etas, const std::vector<double>& mbars, std::size_t n_ions) {
  if (etas.size() != mbars.size()) throw ConfigError("rabi_blur needs one occupation per Lamb-Dicke factor");
  if (n_ions == 0) throw ConfigError("rabi_blur needs at least one ion");
  double sum = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double e2 = etas[i] * etas[i];
    sum += e2 * e2 * mbars[i] * (mbars[i] + 1.0);
  }
  Blur b;
  b.relative = std::sqrt(sum / (3.0 * static_cast<double>(n_ions) - 1.0));
  b.oscillations = b.relative > 0.0 ? 1.0 / b.relative : std::numeric_limits<double>::infinity();
  return b;
}

Blur spectator_blur(const std::vector<ModeCoolingRow>& rows, const PhysicalSpecies& gate, std::size_t n_ions) {
  if (n_ions == 0) throw ConfigError("spectator blur needs at least one ion");
  std::vector<double> etas, mbars;
  for (const auto& r : rows) {
    if (r.kind != "axial" || r.status != "ok") continue;
    etas.push_back(lamb_dicke_single(gate, r.frequency, 1.0) / std::sqrt(static_cast<double>(n_ions)));
    mbars.push_back(r.mbar);
  }
  return rabi_blur(etas, mbars, n_ions);
}

void write_report_csv(std::ostream& os, const std::vector<ModeCoolingRow>& rows) {
  csv::Writer out(os, {"mode_index", "kind", "freq_mhz", "mbar", "tau_us"});
  for (const auto& r : rows)
    out.field(static_cast<long long>(r.index)).field(r.kind).field(r.frequency).field(r.mbar).field(r.tau).end_row();
}

void write_positions_csv(std::ostream& os, const IonString& string) {
  csv::Writer out(os, {"ion_index", "z_um"});
  for (std::size_t i = 0; i < string.positions.size(); ++i)
    out.field(static_cast<long long>(i)).field(string.positions[i]).end_row();
}

}  // namespace eitcool::ionstring
