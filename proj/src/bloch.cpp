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

#include "eitcool/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"

namespace eitcool::bloch {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

ComplexMatrix jump_operator(const LevelScheme& scheme, const DecayChannel& d) {
  const auto n = static_cast<Eigen::Index>(scheme.dimension());
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  c(static_cast<Eigen::Index>(scheme.index_of(d.to)), static_cast<Eigen::Index>(scheme.index_of(d.from))) =
      std::sqrt(d.rate);
  return c;
}

// Kronecker product; Eigen's version lives in unsupported/.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Closed communicating classes of the transition graph (drives both ways,
// decays one way). More than one means the stationary state is not unique.
std::vector<std::vector<std::size_t>> closed_classes(const LevelScheme& scheme) {
  const std::size_t n = scheme.dimension();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& c : scheme.couplings()) {
    if (c.rabi <= 0.0) continue;
    const auto a = scheme.index_of(c.lower), b = scheme.index_of(c.upper);
    reach[a][b] = reach[b][a] = true;
  }
  for (const auto& d : scheme.decays()) reach[scheme.index_of(d.from)][scheme.index_of(d.to)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;

  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
    for (auto j : cls) seen[j] = true;
    bool closed = true;
    for (auto a : cls)
      for (std::size_t b = 0; b < n; ++b)
        if (reach[a][b] && !reach[b][a]) closed = false;
    if (closed) classes.push_back(std::move(cls));
  }
  return classes;
}

std::string describe_classes(const LevelScheme& scheme, const std::vector<std::vector<std::size_t>>& classes) {
  std::string out;
  for (const auto& cls : classes) {
    out += " {";
    for (std::size_t k = 0; k < cls.size(); ++k) out += (k ? "," : "") + scheme.levels()[cls[k]].label;
    out += "}";
  }
  return out;
}

}  // namespace

DensityMatrix DensityMatrix::from_raw(const ComplexMatrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) throw NumericalError("density matrix must be square and non-empty");
  const double scale = std::max(raw.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double herm_defect = (raw - raw.adjoint()).cwiseAbs().maxCoeff() / scale;
  if (herm_defect > 1e-8)
    throw NumericalError("density matrix is not Hermitian (relative defect " + std::to_string(herm_defect) + ")");
  ComplexMatrix rho = 0.5 * (raw + raw.adjoint());
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-8)
    throw NumericalError("density matrix trace is " + std::to_string(trace) + ", expected 1");
  rho /= trace;

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -1e-6)
    throw NumericalError("density matrix has eigenvalue " + std::to_string(min_ev) + " < -1e-6");
  if (min_ev < -1e-9) {
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
  }
  return DensityMatrix(std::move(rho));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ComplexMatrix hamiltonian(const LevelScheme& scheme) {
  const auto n = static_cast<Eigen::Index>(scheme.dimension());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  const auto& e = scheme.frame_energies();
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = e[static_cast<std::size_t>(i)];
  for (const auto& c : scheme.couplings()) {
    const auto lo = static_cast<Eigen::Index>(scheme.index_of(c.lower));
    const auto up = static_cast<Eigen::Index>(scheme.index_of(c.upper));
    h(up, lo) += 0.5 * c.rabi;
    h(lo, up) += 0.5 * c.rabi;
  }
  return h;
}

ComplexMatrix liouvillian(const LevelScheme& scheme) {
  const auto n = static_cast<Eigen::Index>(scheme.dimension());
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix h = hamiltonian(scheme);
  ComplexMatrix l = -kI * (kron(h, id) - kron(id, h.transpose()));
  for (const auto& d : scheme.decays()) {
    const ComplexMatrix c = jump_operator(scheme, d);
    const ComplexMatrix cdc = c.adjoint() * c;
    l += kron(c, c.conjugate()) - 0.5 * kron(cdc, id) - 0.5 * kron(id, cdc.transpose());
  }
  return l;
}

ComplexMatrix master_equation_rhs(const LevelScheme& scheme, const ComplexMatrix& rho) {
  const ComplexMatrix h = hamiltonian(scheme);
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& d : scheme.decays()) {
    const ComplexMatrix c = jump_operator(scheme, d);
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

DensityMatrix steady_state(const LevelScheme& scheme) {
  if (scheme.decays().empty())
    throw DomainError("steady state requires at least one decay channel (otherwise it is not unique)");
  const auto classes = closed_classes(scheme);
  if (classes.size() > 1)
    throw NumericalError("non-unique steady state: decoupled closed subspaces" + describe_classes(scheme, classes));

  const auto n = static_cast<Eigen::Index>(scheme.dimension());
  ComplexMatrix m = liouvillian(scheme);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
  m.row(0).setZero();
  for (Eigen::Index i = 0; i < n; ++i) m(0, i * n + i) = 1.0;
  rhs(0) = 1.0;

  Eigen::FullPivLU<ComplexMatrix> lu(m);
  if (!lu.isInvertible())
    throw NumericalError("non-unique steady state: Liouvillian has a dark subspace beyond the trace deficiency");
  const Eigen::VectorXcd x = lu.solve(rhs);
  ComplexMatrix rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) rho(i, j) = x(i * n + j);
  return DensityMatrix::from_raw(rho);
}

double scattering_rate(const LevelScheme& scheme, const DensityMatrix& rho) {
  double w = 0.0;
  for (const auto& d : scheme.decays()) w += d.rate * rho.population(scheme.index_of(d.from));
  return w;
}

double scattering_rate(const LevelScheme& scheme) { return scattering_rate(scheme, steady_state(scheme)); }

namespace {

Spectrum make_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw ConfigError("absorption spectrum needs at least 2 points");
  if (!(hi > lo)) throw ConfigError("absorption spectrum needs detuning_max > detuning_min");
  Spectrum s;
  s.probe_detunings.resize(points);
  s.rates.assign(points, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < points; ++i)
    s.probe_detunings[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return s;
}

// One grid point; returns an empty string on success.
std::string spectrum_point(const LevelScheme& scheme, std::size_t probe, double detuning, double& rate) {
  try {
    double w = scattering_rate(scheme.with_detuning(probe, detuning));
    if (w < 0.0 && w >= -1e-12) w = 0.0;
    if (w < 0.0) return "negative scattering rate " + std::to_string(w);
    rate = w;
    return {};
  } catch (const std::exception& e) {
    return e.what();
  }
}

void collect_failures(Spectrum& s, const std::vector<std::string>& messages) {
  for (std::size_t i = 0; i < messages.size(); ++i)
    if (!messages[i].empty()) s.failures.push_back({i, messages[i]});
}

void check_probe(const LevelScheme& scheme, std::size_t probe) {
  if (probe >= scheme.couplings().size())
    throw ConfigError("probe coupling index " + std::to_string(probe) + " does not exist in the scheme");
}

}  // namespace

Spectrum absorption_spectrum(const LevelScheme& scheme, std::size_t probe, double detuning_min,
                             double detuning_max, std::size_t points) {
  check_probe(scheme, probe);
  Spectrum s = make_grid(detuning_min, detuning_max, points);
  std::vector<std::string> messages(points);
  const auto n = static_cast<long long>(points);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    messages[k] = spectrum_point(scheme, probe, s.probe_detunings[k], s.rates[k]);
  }
  collect_failures(s, messages);
  return s;
}

Spectrum absorption_spectrum_serial(const LevelScheme& scheme, std::size_t probe, double detuning_min,
                                    double detuning_max, std::size_t points) {
  check_probe(scheme, probe);
  Spectrum s = make_grid(detuning_min, detuning_max, points);
  std::vector<std::string> messages(points);
  for (std::size_t k = 0; k < points; ++k)
    messages[k] = spectrum_point(scheme, probe, s.probe_detunings[k], s.rates[k]);
  collect_failures(s, messages);
  return s;
}

double ac_stark_shift(double delta_r, double omega_r) noexcept {
  return 0.5 * (std::hypot(delta_r, omega_r) - std::abs(delta_r));
}

Resonance find_bright_resonance(const LevelScheme& scheme, std::size_t probe, double window_min,
                                double window_max, std::size_t grid_points) {
  check_probe(scheme, probe);
  if (grid_points < 3) throw ConfigError("bright-resonance search needs at least 3 grid points");
  const Spectrum coarse = absorption_spectrum(scheme, probe, window_min, window_max, grid_points);
  if (!coarse.failures.empty())
    throw NumericalError("bright-resonance scan failed at detuning " +
                         csv::format(coarse.probe_detunings[coarse.failures.front().index]) + ": " +
                         coarse.failures.front().message);
  const auto it = std::max_element(coarse.rates.begin(), coarse.rates.end());
  const auto imax = static_cast<std::size_t>(it - coarse.rates.begin());
  if (imax == 0 || imax + 1 == grid_points)
    throw DomainError("no peak: W has no interior maximum in [" + csv::format(window_min) + ", " +
                      csv::format(window_max) + "] MHz");

  auto w = [&](double x) { return scattering_rate(scheme.with_detuning(probe, x)); };

  // Golden-section maximisation on the bracketing pair of grid cells.
  const double width = window_max - window_min;
  const double tol = 1e-4 * width;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = coarse.probe_detunings[imax - 1], b = coarse.probe_detunings[imax + 1];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double wc = w(c), wd = w(d);
  while (b - a > tol) {
    if (wc > wd) {
      b = d;
      d = c;
      wd = wc;
      c = b - inv_phi * (b - a);
      wc = w(c);
    } else {
      a = c;
      c = d;
      wc = wd;
      d = a + inv_phi * (b - a);
      wd = w(d);
    }
  }
  Resonance r{};
  r.position = 0.5 * (a + b);
  r.peak_rate = w(r.position);
  const double half = 0.5 * r.peak_rate;

  // Half-maximum crossings on a fine walk, linearly interpolated.
  const double step = width / 4000.0;
  auto crossing = [&](double direction) {
    double x_prev = r.position, w_prev = r.peak_rate;
    for (;;) {
      const double x = x_prev + direction * step;
      if (x < window_min - 1e-12 * width || x > window_max + 1e-12 * width)
        throw NumericalError("half maximum of the resonance at " + csv::format(r.position) +
                             " MHz is not reached inside the search window");
      const double wx = w(x);
      if (wx <= half) return x_prev + (x - x_prev) * (w_prev - half) / (w_prev - wx);
      x_prev = x;
      w_prev = wx;
    }
  };
  const double left = crossing(-1.0);
  const double right = crossing(+1.0);
  r.fwhm = right - left;
  return r;
}

void write_csv(std::ostream& os, const Spectrum& spectrum) {
  csv::Writer out(os, {"detuning_mhz", "rate_mhz"});
  for (std::size_t i = 0; i < spectrum.rates.size(); ++i)
    out.field(spectrum.probe_detunings[i]).field(spectrum.rates[i]).end_row();
}

}  // namespace eitcool::bloch
