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

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "doctest.h"
#include "eitcool/bloch.hpp"
#include "eitcool/error.hpp"
#include "eitcool/ratecool.hpp"
#include "helpers.hpp"

using namespace eitcool;
using namespace eitcool::ratecool;

namespace {

SpectrumFn spectrum_of(const LevelScheme& s, std::size_t probe = 0) {
  return [s, probe](double d) { return bloch::scattering_rate(s.with_detuning(probe, d)); };
}

// Doppler configuration: weak drive, one-dimensional recoil (alpha = cos^2 = 1).
double doppler_mbar(double gamma, double delta, double nu) {
  const auto w = spectrum_of(testing::two_level(gamma, 0.01 * gamma, delta));
  return steady_state_n(reduced_coefficients(w, delta, nu, 1.0, 1.0));
}

}  // namespace

TEST_CASE("rate_coefficients: no projection, no rates") {
  const auto w = spectrum_of(testing::two_level(1.0, 0.1, -0.5));
  const CoolingRates r = rate_coefficients(w, -0.5, 0.1, 0.1, 0.0, 0.0);
  CHECK(r.a_plus == 0.0);
  CHECK(r.a_minus == 0.0);
}

TEST_CASE("rate_coefficients: resolved sideband regime cools strongly") {
  const double gamma = 0.1, nu = 1.0;
  const auto w = spectrum_of(testing::two_level(gamma, 0.01, -nu));
  const CoolingRates r = rate_coefficients(w, -nu, nu, 0.1, 1.0, 1.0 / 3.0);
  CHECK(r.a_minus > 100.0 * r.a_plus);
  CHECK(steady_state_n(r) < 0.01);
}

TEST_CASE("rate_coefficients: carrier term vanishes at the dark resonance") {
  const LevelScheme s = testing::eit_reference();
  const auto w = spectrum_of(s);
  const CoolingRates with_alpha = reduced_coefficients(w, 2.5, 0.1, 1.0, 1.0 / 3.0);
  const CoolingRates without = reduced_coefficients(w, 2.5, 0.1, 1.0, 0.0);
  CHECK(std::abs(with_alpha.a_plus - without.a_plus) <= 1e-10 * with_alpha.a_minus);
  CHECK(std::abs(with_alpha.a_minus - without.a_minus) <= 1e-10 * with_alpha.a_minus);
}

TEST_CASE("rate_coefficients: scheme overload samples the probe") {
  const LevelScheme s = testing::eit_reference();
  const CoolingRates a = rate_coefficients(s, 0, TrapMode{0.1, 0.145, 1.0 / 3.0});
  const CoolingRates b = rate_coefficients(spectrum_of(s), 2.5, 0.1, 0.145, 1.0, 1.0 / 3.0);
  CHECK(a == b);
}

TEST_CASE("steady_state_n examples") {
  CHECK(steady_state_n({0.0, 2.0}) == 0.0);
  CHECK(steady_state_n({1.0, 3.0}) == doctest::Approx(0.5));
  try {
    steady_state_n({2.0, 1.0});
    FAIL("expected NetHeatingError");
  } catch (const NetHeatingError& e) {
    CHECK(e.a_plus() == 2.0);
    CHECK(e.a_minus() == 1.0);
    CHECK(e.category() == ErrorCategory::domain);
  }
  CHECK_THROWS_AS(cooling_time({1.0, 1.0}), NetHeatingError);
}

TEST_CASE("steady_state_n: Doppler limit, axial 3.32 MHz mode ~3") {
  CHECK(doppler_mbar(20.0, -10.0, 3.32) == doctest::Approx(3.0).epsilon(0.10));
}

TEST_CASE("steady_state_n: Doppler limit, radial 1.62 MHz modes ~6") {
  CHECK(doppler_mbar(20.0, -10.0, 1.62) == doctest::Approx(6.0).epsilon(0.10));
}

TEST_CASE("cooling_time examples") {
  CHECK(cooling_time({0.5, 1.5}) == doctest::Approx(1.0));
  const LevelScheme s = testing::eit_reference();
  const auto w = spectrum_of(s);
  const CoolingRates r1 = rate_coefficients(w, 2.5, 0.1, 0.1, 1.0, 1.0 / 3.0);
  const CoolingRates r2 = rate_coefficients(w, 2.5, 0.1, 0.2, 1.0, 1.0 / 3.0);
  CHECK(steady_state_n(r2) == doctest::Approx(steady_state_n(r1)).epsilon(1e-12));
  CHECK(cooling_time(r2) == doctest::Approx(cooling_time(r1) / 4).epsilon(1e-12));
}

TEST_CASE("cooling_time: rubidium band is on the millisecond scale") {
  const LevelScheme s = testing::rubidium();
  for (double nu : {0.025, 0.0375, 0.05}) {
    TrapMode m{nu, lamb_dicke_single(testing::rubidium_780, nu, 1.0), 1.0 / 3.0};
    const double tau = cooling_time(rate_coefficients(s, 0, m));
    CHECK(tau > 100.0);
    CHECK(tau < 10000.0);
  }
}

TEST_CASE("evolve_mean_n: limits and consistency") {
  const CoolingRates r{0.01, 0.05};
  const auto v = evolve_mean_n(r, 7.0, {0.0, 1e4});
  CHECK(v[0] == 7.0);
  CHECK(v[1] == doctest::Approx(steady_state_n(r)).epsilon(1e-12));
  // Decay constant equals the cooling time.
  const double tau = cooling_time(r);
  const auto u = evolve_mean_n(r, 7.0, {tau});
  const double m = steady_state_n(r);
  CHECK((u[0] - m) / (7.0 - m) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Net heating grows without error; no rates, no change.
  const auto h = evolve_mean_n({0.2, 0.1}, 1.0, {10.0});
  CHECK(h[0] > 1.0);
  CHECK(evolve_mean_n({0.3, 0.3}, 1.0, {10.0})[0] == doctest::Approx(4.0));
}

TEST_CASE("evolve_mean_n: matches a numerical integration of the moment equation") {
  const LevelScheme s = testing::eit_reference();
  const CoolingRates r = rate_coefficients(s, 0, TrapMode{0.1, 0.145, 1.0 / 3.0});
  const double t_end = 3.0 * cooling_time(r);
  double n = 5.0;
  const int steps = 20000;
  const double h = t_end / steps;
  auto f = [&](double x) { return -(r.a_minus - r.a_plus) * x + r.a_plus; };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(n), k2 = f(n + 0.5 * h * k1), k3 = f(n + 0.5 * h * k2), k4 = f(n + h * k3);
    n += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(evolve_mean_n(r, 5.0, {t_end})[0] == doctest::Approx(n).epsilon(1e-10));
}

TEST_CASE("thermal_distribution examples") {
  const auto z = thermal_distribution(0.0, 10);
  CHECK(z.p[0] == 1.0);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(z.p[n] == 0.0);
  const auto one = thermal_distribution(1.0, 200);
  CHECK(one.p[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(one.p[1] == doctest::Approx(0.25).epsilon(1e-14));
  for (double m : {0.05, 0.18, 1.0, 6.5, 20.0}) {
    const auto d = thermal_distribution(m, static_cast<std::size_t>(std::ceil(40 * (1 + m))));
    CHECK(std::abs(d.mean() - m) <= 1e-9);
    CHECK(std::abs(d.total() - 1.0) <= 1e-12);
    CHECK(d.truncation_loss < 1e-6);
  }
}

TEST_CASE("evolve_populations: frozen dynamics") {
  const auto p0 = thermal_distribution(2.0, 60);
  const auto p = evolve_populations({0.0, 0.0}, p0, 100.0);
  CHECK(p.p == p0.p);
}

TEST_CASE("evolve_populations: relaxes to the detailed-balance null vector") {
  const CoolingRates r{0.02, 0.07};
  const std::size_t n_max = 80;
  // Brute force: null vector of the truncated tridiagonal generator.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    const double dn = static_cast<double>(n);
    if (n < n_max) {
      g(i + 1, i) += r.a_plus * (dn + 1);
      g(i, i) -= r.a_plus * (dn + 1);
    }
    if (n > 0) {
      g(i - 1, i) += r.a_minus * dn;
      g(i, i) -= r.a_minus * dn;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  Eigen::VectorXd null = lu.kernel().col(0);
  null /= null.sum();
  PhononDistribution p0;
  p0.p.assign(n_max + 1, 0.0);
  p0.p[8] = 1.0;
  const auto p = evolve_populations(r, p0, 40.0 * cooling_time(r));
  const auto thermal = thermal_distribution(steady_state_n(r), n_max);
  for (std::size_t n = 0; n <= n_max; ++n) {
    CHECK(std::abs(p.p[n] - thermal.p[n]) <= 1e-6);
    CHECK(std::abs(p.p[n] - null(static_cast<Eigen::Index>(n))) <= 1e-6);
  }
}

TEST_CASE("evolve_populations: first moment tracks evolve_mean_n") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const CoolingRates r{0.05 * u(rng), 0.1 + 0.1 * u(rng)};
    const double n0 = 4.0 * u(rng);
    const auto p0 = thermal_distribution(n0, 120);
    for (double t : {0.5, 5.0, 50.0}) {
      const auto p = evolve_populations(r, p0, t);
      CHECK(std::abs(p.mean() - evolve_mean_n(r, p0.mean(), {t})[0]) <= 1e-8);
    }
  }
}

TEST_CASE("evolve_populations: truncation failure and adaptive doubling") {
  PhononDistribution p0;
  p0.p.assign(11, 0.0);
  p0.p[5] = 1.0;
  CHECK_THROWS_WITH_AS(evolve_populations({1.0, 0.5}, p0, 5.0), doctest::Contains("truncation too small"), NumericalError);
  const auto p = evolve_populations_adaptive({0.9, 1.0}, p0, 3.0);
  CHECK(p.n_max() > 10);
  CHECK(p.truncation_loss <= 1e-6);
}

TEST_CASE("default_n_max") {
  CHECK(default_n_max(0.0) == 60);
  CHECK(default_n_max(9.5) == 105);
}

TEST_CASE("saturation_warning") {
  CHECK_FALSE(saturation_warning(testing::eit_reference(), 0).has_value());
  CHECK(saturation_warning(testing::two_level(1.0, 0.5, 0.0), 0).has_value());
}

TEST_CASE("band_sweep: rubidium band") {
  const auto rows = band_sweep(testing::rubidium(), 0, testing::rubidium_780, TrapMode{1.0, 1.0, 1.0 / 3.0}, 0.025, 0.05, 11);
  REQUIRE(rows.size() == 11);
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.mbar < 1.0);
    CHECK(r.tau > 100.0);
    CHECK(r.tau < 10000.0);
  }
}

TEST_CASE("band_sweep: degenerate range is the direct computation") {
  const LevelScheme s = testing::rubidium();
  const TrapMode tmpl{1.0, 1.0, 1.0 / 3.0};
  const auto rows = band_sweep(s, 0, testing::rubidium_780, tmpl, 0.03, 0.03, 1);
  REQUIRE(rows.size() == 1);
  const TrapMode m{0.03, lamb_dicke_single(testing::rubidium_780, 0.03, 1.0), 1.0 / 3.0};
  const CoolingRates r = rate_coefficients(s, 0, m);
  CHECK(rows[0].mbar == steady_state_n(r));
  CHECK(rows[0].tau == cooling_time(r));
  CHECK_THROWS_AS(band_sweep(s, 0, testing::rubidium_780, tmpl, 0.03, 0.04, 1), ConfigError);
}

TEST_CASE("band_sweep: net heating is reported in the row") {
  // Blue-detuned two-level drive heats.
  const auto rows = band_sweep(testing::two_level(20.0, 0.1, 10.0), 0, testing::calcium_397, TrapMode{1.0, 1.0, 1.0}, 1.0, 2.0, 3);
  for (const auto& r : rows) {
    CHECK(r.status == "net heating");
    CHECK(std::isnan(r.mbar));
  }
}

TEST_CASE("band_sweep: OpenMP kernel equals serial reference") {
  const LevelScheme s = testing::mercury();
  const TrapMode tmpl{1.0, 1.0, 1.0 / 3.0};
  const auto a = band_sweep(s, 0, testing::mercury_194, tmpl, 0.5, 3.0, 33);
  const auto b = band_sweep_serial(s, 0, testing::mercury_194, tmpl, 0.5, 3.0, 33);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].nu == b[i].nu);
    CHECK(a[i].mbar == b[i].mbar);
    CHECK(a[i].tau == b[i].tau);
    CHECK(a[i].status == b[i].status);
  }
}

TEST_CASE("sweep CSV layout") {
  std::ostringstream os;
  write_sweep_csv(os, {{0.025, 0.3, 0.2, 1500.0, "ok"}, {0.05, 0.3, std::nan(""), std::nan(""), "net heating"}});
  CHECK(os.str() == "nu_mhz,mbar,tau_us,status\n0.025000000000000001,0.20000000000000001,1500,ok\n"
                     "0.050000000000000003,nan,nan,net heating\n");
}

TEST_CASE("property: the cooling limit is invariant under eta -> c eta") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> logc(std::log(0.1), std::log(10.0));
  const auto w = spectrum_of(testing::eit_reference());
  const CoolingRates base = rate_coefficients(w, 2.5, 0.1, 0.145, 1.0, 1.0 / 3.0);
  for (int i = 0; i < 20; ++i) {
    const double c = std::exp(logc(rng));
    const CoolingRates r = rate_coefficients(w, 2.5, 0.1, 0.145 * c, 1.0, 1.0 / 3.0);
    CHECK(steady_state_n(r) == doctest::Approx(steady_state_n(base)).epsilon(1e-12));
  }
}

TEST_CASE("property: scaling W leaves the limit and scales the rate") {
  const auto w = spectrum_of(testing::mercury());
  const CoolingRates base = rate_coefficients(w, 80.0, 1.5, 0.13, 1.0, 1.0 / 3.0);
  for (double c : {0.01, 0.5, 42.0}) {
    const SpectrumFn wc = [&](double d) { return c * w(d); };
    const CoolingRates r = rate_coefficients(wc, 80.0, 1.5, 0.13, 1.0, 1.0 / 3.0);
    CHECK(steady_state_n(r) == doctest::Approx(steady_state_n(base)).epsilon(1e-12));
    CHECK(1.0 / cooling_time(r) == doctest::Approx(c / cooling_time(base)).epsilon(1e-12));
  }
}

TEST_CASE("property: Doppler law mbar * nu ~ gamma / 2") {
  for (double gamma : {10.0, 20.0, 50.0})
    for (double ratio : {10.0, 20.0, 40.0}) {
      const double nu = gamma / ratio;
      const double m = doppler_mbar(gamma, -gamma / 2, nu);
      CHECK(m * nu >= 0.45 * gamma);
      CHECK(m * nu <= 0.55 * gamma);
    }
}

TEST_CASE("property: optimal coupling strength puts the light shift on the trap frequency") {
  const double nu = 0.1;
  double best_omega = 0.0, best = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double omega_r = 0.6 + 1.0 * i / 200.0;
    const auto w = spectrum_of(testing::lambda(1.0, 0.05, 2.5, omega_r, 2.5));
    const double m = steady_state_n(reduced_coefficients(w, 2.5, nu, 1.0, 1.0 / 3.0));
    if (m < best) {
      best = m;
      best_omega = omega_r;
    }
  }
  CHECK(std::abs(bloch::ac_stark_shift(2.5, best_omega) - nu) <= 0.2 * nu);
}
