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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "eitcool/bloch.hpp"
#include "eitcool/error.hpp"
#include "helpers.hpp"

using namespace eitcool;
using namespace eitcool::bloch;

namespace {

double max_rate(const Spectrum& s) { return *std::max_element(s.rates.begin(), s.rates.end()); }

ComplexMatrix random_density(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {g(rng), g(rng)};
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("steady_state: undriven two-level atom sits in the ground state") {
  const auto rho = steady_state(testing::two_level(1.0, 0.0, 0.3));
  CHECK(rho.population(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(rho.matrix()(1, 1)) < 1e-14);
  CHECK(std::abs(rho.matrix()(0, 1)) < 1e-14);
}

TEST_CASE("steady_state: resonant two-level population") {
  for (double omega : {0.1, 1.0, 7.0}) {
    const double gamma = 2.0;
    const auto rho = steady_state(testing::two_level(gamma, omega, 0.0));
    const double expected = (omega * omega / 4) / (omega * omega / 2 + gamma * gamma / 4);
    CHECK(rho.population(1) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("steady_state: Lambda system at two-photon resonance is dark") {
  const auto rho = steady_state(testing::lambda(1.0, 0.3, 1.7, 0.9, 1.7));
  CHECK(rho.population(2) <= 1e-10);
}

TEST_CASE("steady_state: error cases") {
  CHECK_THROWS_AS(steady_state(LevelScheme({{"g"}, {"e"}}, {{"g", "e", 1.0, 0.0}}, {})), DomainError);
  // 'x' is neither driven nor decays: a second closed subspace.
  const LevelScheme split({{"g"}, {"e"}, {"x"}}, {{"g", "e", 1.0, 0.0}}, {{"e", "g", 1.0}});
  CHECK_THROWS_WITH_AS(steady_state(split), doctest::Contains("non-unique steady state"), NumericalError);
  CHECK_THROWS_WITH_AS(steady_state(split), doctest::Contains("{x}"), NumericalError);
}

TEST_CASE("DensityMatrix::from_raw enforces the invariants") {
  ComplexMatrix ok(2, 2);
  ok << 0.75, 0.1, 0.1, 0.25;
  CHECK_NOTHROW(DensityMatrix::from_raw(ok));
  ComplexMatrix clip(2, 2);
  clip << 1.0 + 5e-8, 0.0, 0.0, -5e-8;
  const auto r = DensityMatrix::from_raw(clip);
  CHECK(r.min_eigenvalue() >= -1e-12);
  ComplexMatrix neg(2, 2);
  neg << 1.1, 0.0, 0.0, -0.1;
  CHECK_THROWS_AS(DensityMatrix::from_raw(neg), NumericalError);
  ComplexMatrix herm(2, 2);
  herm << 0.5, 0.2, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix::from_raw(herm), NumericalError);
  ComplexMatrix trace(2, 2);
  trace << 0.5, 0.0, 0.0, 0.4;
  CHECK_THROWS_AS(DensityMatrix::from_raw(trace), NumericalError);
}

TEST_CASE("scattering_rate: far detuning falls off as 1/Delta^2") {
  double prev = scattering_rate(testing::two_level(1.0, 0.5, 10.0));
  for (double d : {20.0, 40.0, 80.0, 160.0}) {
    const double w = scattering_rate(testing::two_level(1.0, 0.5, d));
    CHECK(w < prev);
    CHECK(w * d * d == doctest::Approx(prev * (d / 2) * (d / 2)).epsilon(0.01));
    prev = w;
  }
}

TEST_CASE("scattering_rate: dark resonance against the scanned maximum") {
  const LevelScheme s = testing::eit_reference();
  const Spectrum spec = absorption_spectrum(s, 0, -2.0, 4.0, 1201);
  const double dark = scattering_rate(s.with_detuning(0, 2.5));
  CHECK(dark <= 1e-10 * max_rate(spec));
}

TEST_CASE("scattering_rate: the bright resonance is the maximum of the narrow feature") {
  const LevelScheme s = testing::eit_reference();
  const auto r = find_bright_resonance(s, 0, 2.51, 3.0);
  const Spectrum fine = absorption_spectrum(s, 0, 2.51, 3.0, 4001);
  CHECK(r.peak_rate == doctest::Approx(max_rate(fine)).epsilon(1e-4));
  CHECK(r.peak_rate >= max_rate(fine));
}

TEST_CASE("absorption_spectrum: two-level Lorentzian is symmetric") {
  const Spectrum s = absorption_spectrum(testing::two_level(1.0, 0.2, 0.0), 0, -5.0, 5.0, 201);
  for (std::size_t i = 0; i < s.rates.size(); ++i)
    CHECK(s.rates[i] == doctest::Approx(s.rates[s.rates.size() - 1 - i]).epsilon(1e-9));
  CHECK(s.failures.empty());
}

TEST_CASE("absorption_spectrum: broad line, dark zero and narrow bright peak") {
  const LevelScheme s = testing::eit_reference();
  const Spectrum spec = absorption_spectrum(s, 0, -3.0, 5.0, 1601);
  auto at = [&](double d) { return scattering_rate(s.with_detuning(0, d)); };
  const double delta = ac_stark_shift(2.5, 1.0);
  // Broad maximum close to the bare resonance (light-shifted by the strong drive).
  const auto imax = static_cast<std::size_t>(std::max_element(spec.rates.begin(), spec.rates.end()) - spec.rates.begin());
  CHECK(std::abs(spec.probe_detunings[imax]) < 0.6);
  CHECK(at(2.5) < 1e-10 * spec.rates[imax]);
  const double bright = at(2.5 + delta);
  CHECK(bright > 10.0 * at(2.5 + delta + 0.3));
  CHECK(bright > 10.0 * at(2.5 + delta / 4));
}

TEST_CASE("absorption_spectrum: bad input") {
  const LevelScheme s = testing::eit_reference();
  CHECK_THROWS_AS(absorption_spectrum(s, 0, 0.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(absorption_spectrum(s, 5, 0.0, 1.0, 10), ConfigError);
  CHECK_THROWS_AS(absorption_spectrum(s, 0, 1.0, 0.0, 10), ConfigError);
}

TEST_CASE("absorption_spectrum: failed points are reported, not dropped") {
  // Probing a decoupled level: every grid point is singular.
  const LevelScheme s({{"g"}, {"e"}, {"x"}, {"y"}}, {{"g", "e", 1.0, 0.0}, {"x", "y", 0.0, 0.0}}, {{"e", "g", 1.0}});
  const Spectrum spec = absorption_spectrum(s, 1, -1.0, 1.0, 5);
  CHECK(spec.failures.size() == 5);
  CHECK(std::isnan(spec.rates[2]));
  CHECK(spec.failures[2].index == 2);
}

TEST_CASE("absorption_spectrum: parallel kernel equals the serial reference bit for bit") {
  const LevelScheme s = testing::mercury();
  const Spectrum a = absorption_spectrum(s, 0, 60.0, 100.0, 257);
  const Spectrum b = absorption_spectrum_serial(s, 0, 60.0, 100.0, 257);
  CHECK(a.probe_detunings == b.probe_detunings);
  CHECK(a.rates == b.rates);
}

TEST_CASE("ac_stark_shift examples") {
  CHECK(ac_stark_shift(75.0, 0.0) == 0.0);
  CHECK(ac_stark_shift(75.0, 30.0) == doctest::Approx(2.89).epsilon(0.002));
  CHECK(ac_stark_shift(2.5, 1.0) == doctest::Approx(0.0963).epsilon(0.001));
  CHECK(ac_stark_shift(-2.5, 1.0) == ac_stark_shift(2.5, 1.0));
}

TEST_CASE("find_bright_resonance: EIT reference parameters") {
  const LevelScheme s = testing::eit_reference();
  const double delta = ac_stark_shift(2.5, 1.0);
  const auto r = find_bright_resonance(s, 0, 2.51, 3.0);
  CHECK(std::abs((r.position - 2.5) - delta) <= 0.05 * delta);
  CHECK(r.fwhm > 0.0);
}

TEST_CASE("find_bright_resonance: two-level peak at resonance") {
  const auto r = find_bright_resonance(testing::two_level(1.0, 0.1, 0.0), 0, -2.0, 2.0, 801);
  CHECK(std::abs(r.position) <= 4.0 / 800);
  CHECK(r.fwhm == doctest::Approx(1.0).epsilon(0.02));  // power-broadened width sqrt(1 + 2 s)
}

TEST_CASE("find_bright_resonance: no interior maximum") {
  CHECK_THROWS_WITH_AS(find_bright_resonance(testing::two_level(1.0, 0.1, 0.0), 0, 1.0, 3.0), doctest::Contains("no peak"),
                       DomainError);
}

TEST_CASE("find_bright_resonance: Zeeman Lambda narrow-peak width ~0.5 MHz") {
  const LevelScheme s = testing::zeeman_lambda();
  const auto r = find_bright_resonance(s, 0, 76.0, 81.0);
  const double delta = ac_stark_shift(75.0, 30.0);
  CHECK(std::abs((r.position - 75.0) - delta) <= 0.05 * delta);
  CHECK(r.fwhm == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("write_csv: header and full precision") {
  Spectrum s;
  s.probe_detunings = {0.1, 1.0 / 3.0};
  s.rates = {1e-20, 0.5};
  std::ostringstream os;
  write_csv(os, s);
  CHECK(os.str() == "detuning_mhz,rate_mhz\n0.10000000000000001,9.9999999999999995e-21\n0.33333333333333331,0.5\n");
}

TEST_CASE("property: steady states of random schemes are valid density matrices") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(std::log(0.01), std::log(100.0));
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  auto draw = [&] { return std::exp(logu(rng)); };
  for (int trial = 0; trial < 60; ++trial) {
    const LevelScheme s =
        trial % 2 ? testing::lambda(draw(), draw(), std::copysign(draw(), sign(rng)), draw(), std::copysign(draw(), sign(rng)))
                  : testing::four_level(draw(), draw(), draw(), std::copysign(draw(), sign(rng)), draw(), sign(rng) * draw());
    const auto rho = steady_state(s);
    const auto& m = rho.matrix();
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * m.cwiseAbs().maxCoeff());
    CHECK(std::abs(m.trace().real() - 1.0) <= 1e-10);
    CHECK(rho.min_eigenvalue() >= -1e-9);
  }
}

TEST_CASE("property: time evolution relaxes to the linear-solve steady state") {
  std::mt19937_64 rng(11);
  const std::vector<LevelScheme> schemes{testing::two_level(1.0, 1.3, -0.4), testing::lambda(1.0, 1.0, 0.5, 1.0, -0.3),
                                         testing::four_level(1.0, 0.8, 1.1, 0.6, 0.9, -0.2)};
  for (const auto& s : schemes) {
    ComplexMatrix rho = random_density(s.dimension(), rng);
    const double gamma = s.linewidth("e");
    // Run for 30 times the slowest relaxation time of the Liouvillian.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(liouvillian(s));
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& l : es.eigenvalues())
      if (std::abs(l) > 1e-9) gap = std::min(gap, -l.real());
    const double t_end = 30.0 / gap, h = 0.005 / gamma;
    for (double t = 0.0; t < t_end - 0.5 * h; t += h) {
      const ComplexMatrix k1 = master_equation_rhs(s, rho);
      const ComplexMatrix k2 = master_equation_rhs(s, rho + 0.5 * h * k1);
      const ComplexMatrix k3 = master_equation_rhs(s, rho + 0.5 * h * k2);
      const ComplexMatrix k4 = master_equation_rhs(s, rho + h * k3);
      rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK((rho - steady_state(s).matrix()).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("property: common frequency scaling leaves rho invariant and scales W") {
  const LevelScheme s = testing::mercury();
  for (double c : {0.1, 3.0, 17.0}) {
    const LevelScheme t = s.scaled(c);
    CHECK((steady_state(t).matrix() - steady_state(s).matrix()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(scattering_rate(t) == doctest::Approx(c * scattering_rate(s)).epsilon(1e-8));
  }
}

TEST_CASE("liouvillian agrees with the commutator form") {
  std::mt19937_64 rng(3);
  const LevelScheme s = testing::four_level(2.0, 0.5, 1.5, 0.7, 0.3, 0.1);
  const ComplexMatrix rho = random_density(s.dimension(), rng);
  const auto n = static_cast<Eigen::Index>(s.dimension());
  Eigen::VectorXcd v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  const Eigen::VectorXcd lv = liouvillian(s) * v;
  const ComplexMatrix direct = master_equation_rhs(s, rho);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) CHECK(std::abs(lv(i * n + j) - direct(i, j)) < 1e-12);
}
