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

#include "eitcool/ratecool.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "eitcool/bloch.hpp"
#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"

namespace eitcool::ratecool {

CoolingRates reduced_coefficients(const SpectrumFn& w, double delta, double nu, double axis_cosine,
                                  double alpha) {
  if (!(nu > 0.0)) throw DomainError("rate coefficients need nu > 0");
  const double carrier = alpha * w(delta);
  const double c2 = axis_cosine * axis_cosine;
  CoolingRates r;
  r.a_plus = carrier + c2 * w(delta - nu);
  r.a_minus = carrier + c2 * w(delta + nu);
  return r;
}

CoolingRates rate_coefficients(const SpectrumFn& w, double delta, double nu, double eta, double axis_cosine,
                               double alpha) {
  const CoolingRates r = reduced_coefficients(w, delta, nu, axis_cosine, alpha);
  const double e2 = eta * eta;
  return {e2 * r.a_plus, e2 * r.a_minus};
}

CoolingRates rate_coefficients(const LevelScheme& scheme, std::size_t probe, const TrapMode& mode) {
  if (probe >= scheme.couplings().size())
    throw ConfigError("probe coupling index " + std::to_string(probe) + " does not exist in the scheme");
  mode.validate();
  const LaserField& field = scheme.couplings()[probe];
  auto w = [&](double d) { return bloch::scattering_rate(scheme.with_detuning(probe, d)); };
  return rate_coefficients(w, field.detuning, mode.frequency, mode.lamb_dicke, field.axis_cosine,
                           mode.recoil_alpha);
}

double steady_state_n(const CoolingRates& rates) {
  if (!(rates.a_minus > rates.a_plus)) throw NetHeatingError(rates.a_plus, rates.a_minus);
  return rates.a_plus / (rates.a_minus - rates.a_plus);
}

double cooling_time(const CoolingRates& rates) {
  if (!(rates.a_minus > rates.a_plus)) throw NetHeatingError(rates.a_plus, rates.a_minus);
  return 1.0 / (rates.a_minus - rates.a_plus);
}

std::vector<double> evolve_mean_n(const CoolingRates& rates, double n0, const std::vector<double>& times) {
  const double kappa = rates.a_minus - rates.a_plus;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (kappa == 0.0) {
      out.push_back(n0 + rates.a_plus * t);
    } else {
      // n0 e^{-kt} + A+ (1 - e^{-kt}) / k, written to stay accurate for small kt.
      out.push_back(n0 * std::exp(-kappa * t) - rates.a_plus * std::expm1(-kappa * t) / kappa);
    }
  }
  return out;
}

double PhononDistribution::mean() const noexcept {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double PhononDistribution::total() const noexcept { return std::accumulate(p.begin(), p.end(), 0.0); }

void PhononDistribution::validate() const {
  if (p.empty()) throw NumericalError("phonon distribution is empty");
  for (std::size_t n = 0; n < p.size(); ++n)
    if (!(p[n] >= 0.0)) throw NumericalError("phonon distribution has p_" + std::to_string(n) + " = " + csv::format(p[n]));
  if (std::abs(total() - 1.0) > 1e-9)
    throw NumericalError("phonon distribution sums to " + csv::format(total()));
}

PhononDistribution thermal_distribution(double mbar, std::size_t n_max) {
  if (!(mbar >= 0.0)) throw DomainError("thermal distribution needs mbar >= 0");
  PhononDistribution d;
  d.p.resize(n_max + 1);
  const double q = mbar / (mbar + 1.0);
  double pn = 1.0 / (mbar + 1.0);
  double sum = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    d.p[n] = pn;
    sum += pn;
    pn *= q;
  }
  d.truncation_loss = std::pow(q, static_cast<double>(n_max + 1));
  for (double& x : d.p) x /= sum;
  return d;
}

std::size_t default_n_max(double n0) {
  return std::max<std::size_t>(60, static_cast<std::size_t>(std::ceil(10.0 * (1.0 + n0))));
}

namespace {

struct BirthDeath {
  double a_plus;
  double a_minus;
  std::size_t top;  // n_max
};

// y[0..top] are the populations, y[top+1] the accumulated leakage.
int birth_death_rhs(double, const double y[], double dydt[], void* params) {
  const auto& s = *static_cast<const BirthDeath*>(params);
  const std::size_t top = s.top;
  for (std::size_t n = 0; n <= top; ++n) {
    const double dn = static_cast<double>(n);
    double d = -s.a_minus * dn * y[n];
    if (n < top) d += -s.a_plus * (dn + 1.0) * y[n] + s.a_minus * (dn + 1.0) * y[n + 1];
    if (n > 0) d += s.a_plus * dn * y[n - 1];
    dydt[n] = d;
  }
  dydt[top + 1] = s.a_plus * static_cast<double>(top + 1) * y[top];
  return GSL_SUCCESS;
}

}  // namespace

PhononDistribution evolve_populations(const CoolingRates& rates, const PhononDistribution& p0, double t,
                                      const EvolveOptions& options) {
  p0.validate();
  if (!(t >= 0.0)) throw DomainError("evolve_populations needs t >= 0");
  if (rates.a_plus < 0.0 || rates.a_minus < 0.0) throw DomainError("rate coefficients must be non-negative");
  if (t == 0.0 || (rates.a_plus == 0.0 && rates.a_minus == 0.0)) return p0;  // nothing moves
  const std::size_t top = p0.n_max();
  std::vector<double> y(top + 2, 0.0);
  std::copy(p0.p.begin(), p0.p.end(), y.begin());
  {
    BirthDeath params{rates.a_plus, rates.a_minus, top};
    gsl_odeiv2_system sys{birth_death_rhs, nullptr, top + 2, &params};
    const double h0 = std::min(t, 0.01 / (std::max(rates.a_plus, rates.a_minus) * static_cast<double>(top + 1)));
    gsl_odeiv2_driver* drv =
        gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_rk8pd, h0, options.abs_tol, options.rel_tol);
    gsl_odeiv2_driver_set_nmax(drv, 0);
    double time = 0.0;
    const int status = gsl_odeiv2_driver_apply(drv, &time, t, y.data());
    gsl_odeiv2_driver_free(drv);
    if (status != GSL_SUCCESS)
      throw NumericalError(std::string("population integration failed: ") + gsl_strerror(status));
  }
  PhononDistribution out;
  out.p.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(top + 1));
  out.truncation_loss = y[top + 1];
  if (out.truncation_loss > options.max_leakage)
    throw NumericalError("truncation too small: leakage " + csv::format(out.truncation_loss) + " through n_max = " +
                         std::to_string(top) + "; increase n_max");
  for (double& x : out.p) x = std::max(x, 0.0);
  const double sum = out.total();
  for (double& x : out.p) x /= sum;
  return out;
}

PhononDistribution evolve_populations_adaptive(const CoolingRates& rates, const PhononDistribution& p0,
                                               double t, const EvolveOptions& options) {
  PhononDistribution start = p0;
  for (int attempt = 0;; ++attempt) {
    try {
      return evolve_populations(rates, start, t, options);
    } catch (const NumericalError&) {
      if (attempt == 4) throw;
      start.p.resize(2 * start.p.size(), 0.0);
    }
  }
}

std::optional<std::string> saturation_warning(const LevelScheme& scheme, std::size_t probe) {
  if (probe >= scheme.couplings().size()) return std::nullopt;
  const LaserField& f = scheme.couplings()[probe];
  const double gamma = scheme.linewidth(f.upper);
  if (gamma > 0.0 && f.rabi > gamma / 5.0)
    return "probe Rabi frequency " + csv::format(f.rabi) + " MHz exceeds gamma/5 = " + csv::format(gamma / 5.0) +
           " MHz; the rate model assumes excitation below saturation";
  return std::nullopt;
}

namespace {


std::vector<double> sweep_grid(double nu_min, double nu_max, std::size_t points) {
  if (!(nu_min > 0.0)) throw ConfigError("sweep needs nu_min > 0");
  if (nu_max < nu_min) throw ConfigError("sweep needs nu_max >= nu_min");
  if (points == 0) throw ConfigError("sweep needs at least one point");
  if (points == 1) {
    if (nu_max != nu_min) throw ConfigError("a sweep over a non-degenerate range needs at least 2 points");
    return {nu_min};
  }
  if (nu_max == nu_min) throw ConfigError("a degenerate sweep range takes exactly 1 point");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = nu_min + (nu_max - nu_min) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

SweepRow sweep_point(const LevelScheme& scheme, std::size_t probe, const PhysicalSpecies& species,
                     const TrapMode& mode_template, double nu) {
  SweepRow row;
  row.nu = nu;
  row.mbar = std::numeric_limits<double>::quiet_NaN();
  row.tau = std::numeric_limits<double>::quiet_NaN();
  try {
    TrapMode mode = mode_template;
    mode.frequency = nu;
    mode.lamb_dicke = lamb_dicke_single(species, nu, 1.0);
    row.eta = mode.lamb_dicke;
    const CoolingRates r = rate_coefficients(scheme, probe, mode);
    row.mbar = steady_state_n(r);
    row.tau = cooling_time(r);
    row.status = "ok";
  } catch (const NetHeatingError&) {
    row.status = "net heating";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

void check_sweep_inputs(const LevelScheme& scheme, std::size_t probe, const PhysicalSpecies& species) {
  if (probe >= scheme.couplings().size())
    throw ConfigError("probe coupling index " + std::to_string(probe) + " does not exist in the scheme");
  species.validate();
}

}  // namespace

std::vector<SweepRow> band_sweep(const LevelScheme& scheme, std::size_t probe, const PhysicalSpecies& species,
                                 const TrapMode& mode_template, double nu_min, double nu_max, std::size_t points) {
  check_sweep_inputs(scheme, probe, species);
  const std::vector<double> nus = sweep_grid(nu_min, nu_max, points);
  std::vector<SweepRow> rows(nus.size());
  const auto n = static_cast<long long>(nus.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rows[k] = sweep_point(scheme, probe, species, mode_template, nus[k]);
  }
  return rows;
}

std::vector<SweepRow> band_sweep_serial(const LevelScheme& scheme, std::size_t probe,
                                        const PhysicalSpecies& species, const TrapMode& mode_template,
                                        double nu_min, double nu_max, std::size_t points) {
  check_sweep_inputs(scheme, probe, species);
  std::vector<SweepRow> rows;
  for (double nu : sweep_grid(nu_min, nu_max, points))
    rows.push_back(sweep_point(scheme, probe, species, mode_template, nu));
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  csv::Writer out(os, {"nu_mhz", "mbar", "tau_us", "status"});
  for (const auto& r : rows) out.field(r.nu).field(r.mbar).field(r.tau).field(r.status).end_row();
}

void write_mean_n_csv(std::ostream& os, const std::vector<double>& times, const std::vector<double>& mean_n) {
  csv::Writer out(os, {"t_us", "mean_n"});
  for (std::size_t i = 0; i < times.size() && i < mean_n.size(); ++i) out.field(times[i]).field(mean_n[i]).end_row();
}

void write_distribution_csv(std::ostream& os, const PhononDistribution& p) {
  csv::Writer out(os, {"n", "p_n"});
  for (std::size_t n = 0; n < p.p.size(); ++n) out.field(static_cast<long long>(n)).field(p.p[n]).end_row();
}

}  // namespace eitcool::ratecool
