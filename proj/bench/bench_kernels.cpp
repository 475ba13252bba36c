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

// Serial reference vs OpenMP kernel for each parallel workload.
// Run with OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include <vector>

#include "eitcool/bloch.hpp"
#include "eitcool/ionstring.hpp"
#include "eitcool/ratecool.hpp"
#include "eitcool/thermometry.hpp"
#include "eitcool/trajectory.hpp"

namespace {

using namespace eitcool;

LevelScheme lambda(double gamma, double omega_g, double delta, double omega_r) {
  return LevelScheme({{"g"}, {"r"}, {"e"}}, {{"g", "e", omega_g, delta, 1.0}, {"r", "e", omega_r, delta, 0.0}},
                     {{"e", "g", gamma / 2}, {"e", "r", gamma / 2}});
}

LevelScheme mercury() {
  const double g3 = 64.0 / 3.0;
  return LevelScheme({{"g"}, {"r"}, {"e"}, {"d"}},
                     {{"g", "e", 4.0, 80.0, 1.0}, {"r", "e", 21.0, 80.0, 0.0}, {"d", "e", 2.0, 0.0, 0.0}},
                     {{"e", "g", g3}, {"e", "r", g3}, {"e", "d", g3}});
}

const PhysicalSpecies kCa397{39.962590863, 397.0};
const PhysicalSpecies kHg194{198.968, 194.0};

template <bool Parallel>
void BM_Spectrum(benchmark::State& state) {
  const LevelScheme s = mercury();
  for (auto _ : state) {
    auto r = Parallel ? bloch::absorption_spectrum(s, 0, 0.0, 160.0, 2000)
                      : bloch::absorption_spectrum_serial(s, 0, 0.0, 160.0, 2000);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Sweep(benchmark::State& state) {
  const LevelScheme s = mercury();
  const TrapMode tmpl{1.0, 1.0, 1.0 / 3.0};
  for (auto _ : state) {
    auto r = Parallel ? ratecool::band_sweep(s, 0, kHg194, tmpl, 0.5, 3.0, 400)
                      : ratecool::band_sweep_serial(s, 0, kHg194, tmpl, 0.5, 3.0, 400);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Ensemble(benchmark::State& state) {
  const trajectory::TrajectoryConfig c{lambda(1.0, 0.05, 2.5, 1.0), TrapMode{0.1, 0.145, 1.0 / 3.0}, 20, 8000.0, 20.0,
                                       1, 1.0, 101, trajectory::EmissionPattern::isotropic};
  for (auto _ : state) {
    auto r = Parallel ? trajectory::ensemble_average(c, 16) : trajectory::ensemble_average_serial(c, 16);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Multimode(benchmark::State& state) {
  const auto str = ionstring::build_string(20, kCa397, 0.7, 8.0);
  const LevelScheme s = lambda(20.0, 0.5, 75.0, 30.0);
  for (auto _ : state) {
    auto r = Parallel ? ionstring::multimode_cooling(str, s, 0, {}) : ionstring::multimode_cooling_serial(str, s, 0, {});
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_Bootstrap(benchmark::State& state) {
  std::vector<double> t(60);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 + 5.0 * static_cast<double>(i);
  const auto data = thermometry::add_shot_noise(thermometry::rabi_signal(0.18, 0.1, 0.5, t), 100, 3);
  const thermometry::FitOptions o{0.0, 32, 5};
  for (auto _ : state) {
    auto r = Parallel ? thermometry::fit_thermal(data, 0.1, o) : thermometry::fit_thermal_serial(data, 0.1, o);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_Spectrum<false>)->Name("spectrum/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spectrum<true>)->Name("spectrum/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<false>)->Name("band_sweep/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->Name("band_sweep/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble<false>)->Name("ensemble/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble<true>)->Name("ensemble/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Multimode<false>)->Name("multimode/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Multimode<true>)->Name("multimode/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<false>)->Name("bootstrap/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<true>)->Name("bootstrap/openmp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
