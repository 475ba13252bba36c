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

#include "eitcool/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <gsl/gsl_version.h>
#include <omp.h>

#include "eitcool/bloch.hpp"
#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"
#include "eitcool/ionstring.hpp"
#include "eitcool/random.hpp"
#include "eitcool/ratecool.hpp"
#include "eitcool/thermometry.hpp"
#include "eitcool/trajectory.hpp"
#include "json.hpp"

namespace eitcool::runner {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// JSON has no NaN/inf; write those as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buffer;
    body(buffer);
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << buffer.str();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const config::RunConfig& cfg;
  std::uint64_t seed;
  Outputs& out;
  std::vector<std::string>& warnings;
  json& results;
};

void warn_saturation(Context& c) {
  if (auto w = ratecool::saturation_warning(*c.cfg.scheme, c.cfg.probe)) c.warnings.push_back(*w);
}

// The drive sharing the probe's upper level: the coupling laser of a Lambda scheme.
std::optional<std::size_t> coupling_partner(const LevelScheme& s, std::size_t probe) {
  for (std::size_t i = 0; i < s.couplings().size(); ++i)
    if (i != probe && s.couplings()[i].upper == s.couplings()[probe].upper) return i;
  return std::nullopt;
}

void run_spectrum(Context& c) {
  const auto& sb = *c.cfg.spectrum;
  const LevelScheme& scheme = *c.cfg.scheme;
  warn_saturation(c);
  const bloch::Spectrum s = bloch::absorption_spectrum(scheme, c.cfg.probe, sb.detuning_min, sb.detuning_max, sb.points);
  for (const auto& f : s.failures)
    c.warnings.push_back("spectrum point at " + csv::format(s.probe_detunings[f.index]) + " MHz failed: " + f.message);
  if (s.failures.size() == s.rates.size()) throw NumericalError("every spectrum point failed; first: " + s.failures.front().message);
  c.out.write("spectrum.csv", [&](std::ostream& os) { bloch::write_csv(os, s); });
  c.results["failed_points"] = s.failures.size();
  if (!sb.resonance_window) return;

  const auto r = bloch::find_bright_resonance(scheme, c.cfg.probe, sb.resonance_window->first,
                                              sb.resonance_window->second);
  double predicted = std::numeric_limits<double>::quiet_NaN();
  if (auto partner = coupling_partner(scheme, c.cfg.probe)) {
    const LaserField& f = scheme.couplings()[*partner];
    predicted = f.detuning + (f.detuning >= 0 ? 1.0 : -1.0) * bloch::ac_stark_shift(f.detuning, f.rabi);
  }
  c.out.write("resonance.csv", [&](std::ostream& os) {
    csv::Writer w(os, {"position_mhz", "fwhm_mhz", "peak_rate_mhz", "predicted_position_mhz"});
    w.field(r.position).field(r.fwhm).field(r.peak_rate).field(predicted).end_row();
  });
  c.results["resonance"] = {{"position_mhz", r.position},
                            {"fwhm_mhz", r.fwhm},
                            {"peak_rate_mhz", r.peak_rate},
                            {"predicted_position_mhz", number(predicted)}};
}

ratecool::CoolingRates rates_summary(Context& c) {
  const auto rates = ratecool::rate_coefficients(*c.cfg.scheme, c.cfg.probe, *c.cfg.mode);
  json r = {{"a_plus_mhz", rates.a_plus}, {"a_minus_mhz", rates.a_minus}};
  double mbar = std::numeric_limits<double>::quiet_NaN(), tau = mbar;
  if (rates.a_minus > rates.a_plus) {
    mbar = ratecool::steady_state_n(rates);
    tau = ratecool::cooling_time(rates);
    if (auto w = c.cfg.mode->lamb_dicke_warning(mbar)) c.warnings.push_back(*w);
  }
  r["mbar"] = number(mbar);
  r["tau_us"] = number(tau);
  c.results["rate_model"] = r;
  c.out.write("rates.csv", [&](std::ostream& os) {
    csv::Writer w(os, {"a_plus_mhz", "a_minus_mhz", "mbar", "tau_us"});
    w.field(rates.a_plus).field(rates.a_minus).field(mbar).field(tau).end_row();
  });
  return rates;
}

void run_cool(Context& c) {
  const auto& cb = *c.cfg.cool;
  warn_saturation(c);
  if (auto w = c.cfg.mode->lamb_dicke_warning(cb.initial_n)) c.warnings.push_back("initial state: " + *w);
  const auto rates = rates_summary(c);
  const auto times = linspace(0.0, cb.t_final, cb.samples);
  const auto mean = ratecool::evolve_mean_n(rates, cb.initial_n, times);
  c.out.write("mean_n_rate.csv", [&](std::ostream& os) { ratecool::write_mean_n_csv(os, times, mean); });
  const std::size_t n_max = cb.n_max.value_or(ratecool::default_n_max(cb.initial_n));
  const auto p0 = ratecool::thermal_distribution(cb.initial_n, n_max);
  const auto pt = ratecool::evolve_populations_adaptive(rates, p0, cb.t_final);
  c.out.write("pn_rate.csv", [&](std::ostream& os) { ratecool::write_distribution_csv(os, pt); });
  c.results["final_mean_n"] = pt.mean();
  c.results["population_leakage"] = pt.truncation_loss;
  // A heating configuration still gets its dynamics written before failing.
  ratecool::steady_state_n(rates);
}

void run_mc(Context& c) {
  const auto& mb = *c.cfg.mc;
  warn_saturation(c);
  const auto rates = rates_summary(c);
  auto tc = config::trajectory_config(c.cfg);
  tc.seed = c.seed;
  if (mb.emission == trajectory::EmissionPattern::isotropic && std::abs(tc.mode.recoil_alpha - 1.0 / 3.0) > 1e-12)
    c.warnings.push_back("isotropic emission has <u^2> = 1/3 but mode.recoil_alpha = " +
                         csv::format(tc.mode.recoil_alpha) + "; the rate model and the trajectories differ");
  const auto ens = trajectory::ensemble_average(tc, mb.trajectories);
  const auto rate_mean = ratecool::evolve_mean_n(rates, mb.initial_n, ens.times);
  c.out.write("mean_n_rate.csv", [&](std::ostream& os) { ratecool::write_mean_n_csv(os, ens.times, rate_mean); });
  c.out.write("mean_n_mc.csv", [&](std::ostream& os) { trajectory::write_ensemble_csv(os, ens); });
  c.out.write("steady_pn.csv", [&](std::ostream& os) { ratecool::write_distribution_csv(os, ens.steady_pn); });
  c.results["mc"] = {{"steady_mean_n", ens.steady_mean_n},
                     {"steady_stderr", ens.steady_stderr},
                     {"trajectories", ens.n_trajectories},
                     {"jumps", ens.total_jumps},
                     {"dt_us", mb.dt},
                     {"n_max", mb.n_max}};
}

void run_sweep(Context& c) {
  const auto& sb = *c.cfg.sweep;
  warn_saturation(c);
  TrapMode tmpl{1.0, 1.0, 1.0 / 3.0};
  if (c.cfg.mode) tmpl = *c.cfg.mode;
  const auto rows = ratecool::band_sweep(*c.cfg.scheme, c.cfg.probe, *c.cfg.species, tmpl, sb.nu_min, sb.nu_max, sb.points);
  c.out.write("sweep.csv", [&](std::ostream& os) { ratecool::write_sweep_csv(os, rows); });
  std::size_t bad = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (r.status != "ok") ++bad;
    else worst = std::max(worst, r.mbar);
    if (r.status == "ok") {
      TrapMode m = tmpl;
      m.lamb_dicke = r.eta;
      if (auto w = m.lamb_dicke_warning(r.mbar)) c.warnings.push_back("nu = " + csv::format(r.nu) + " MHz: " + *w);
    }
  }
  c.results["rows_without_limit"] = bad;
  c.results["max_mbar"] = worst;
}

void run_string(Context& c) {
  const auto& sb = *c.cfg.string;
  const auto s = ionstring::build_string(sb.n_ions, *c.cfg.species, sb.nu_axial, sb.nu_radial);
  c.out.write("positions.csv", [&](std::ostream& os) { ionstring::write_positions_csv(os, s); });
  ionstring::Geometry g;
  g.illuminated = sb.illuminated;
  const auto rows = ionstring::multimode_cooling(s, *c.cfg.scheme, c.cfg.probe, g);
  c.out.write("string_report.csv", [&](std::ostream& os) { ionstring::write_report_csv(os, rows); });

  double worst_axial = 0.0;
  std::size_t flagged = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      ++flagged;
      c.warnings.push_back(r.kind + " mode " + std::to_string(r.index) + ": " + r.status);
    } else if (r.kind == "axial") {
      worst_axial = std::max(worst_axial, r.mbar);
    }
  }
  c.results["min_spacing_um"] = s.min_spacing();
  c.results["max_axial_mbar"] = worst_axial;
  c.results["flagged_modes"] = flagged;
  if (sb.n_ions >= 2) c.results["zigzag_threshold_mhz"] = ionstring::zigzag_threshold(sb.n_ions, sb.nu_axial);
  if (!sb.gate_wavelength_nm) return;

  const PhysicalSpecies gate{c.cfg.species->mass_amu, *sb.gate_wavelength_nm};
  const auto blur = ionstring::spectator_blur(rows, gate, sb.n_ions);
  c.out.write("blur.csv", [&](std::ostream& os) {
    csv::Writer w(os, {"relative_blur", "oscillations"});
    w.field(blur.relative).field(blur.oscillations).end_row();
  });
  c.results["blur"] = {{"relative", blur.relative}, {"oscillations", number(blur.oscillations)}};
}

void run_thermometry(Context& c) {
  const auto& tb = *c.cfg.thermometry;
  const auto times = linspace(tb.t_start, tb.t_stop, tb.points);
  thermometry::RabiDataset data = thermometry::rabi_signal(tb.mbar, tb.eta, tb.omega, times, tb.decay);
  if (tb.shots > 0) data = thermometry::add_shot_noise(data, tb.shots, stream_seed(c.seed, 0));
  c.out.write("rabi_dataset.csv", [&](std::ostream& os) { thermometry::write_dataset_csv(os, data); });
  const auto fit = thermometry::fit_thermal(data, tb.eta, {tb.decay, tb.bootstrap, stream_seed(c.seed, 1)});
  c.out.write("fit_report.txt", [&](std::ostream& os) { thermometry::write_fit_report(os, fit); });
  c.results["fit"] = {{"mbar", fit.mbar},
                      {"omega_mhz", fit.omega},
                      {"rss", fit.rss},
                      {"ground_state_probability", fit.ground_state_probability()}};
  if (tb.sideband_shots == 0) return;
  const auto counts = thermometry::simulate_shelving(tb.mbar, tb.eta, tb.omega, tb.pulse_time.value_or(-1.0),
                                                     tb.sideband_shots, stream_seed(c.seed, 2));
  const auto est = thermometry::sideband_ratio_to_n(counts);
  c.out.write("sideband.csv", [&](std::ostream& os) {
    csv::Writer w(os, {"red_excited", "blue_excited", "shots", "mbar", "lower", "upper"});
    w.field(static_cast<long long>(counts.red_excited))
        .field(static_cast<long long>(counts.blue_excited))
        .field(static_cast<long long>(counts.shots_per_side))
        .field(est.mbar)
        .field(est.lower)
        .field(est.upper)
        .end_row();
  });
  c.results["sideband"] = {{"mbar", est.mbar}, {"lower", est.lower}, {"upper", number(est.upper)}};
}

}  // namespace

RunResult run(const config::RunConfig& cfg, const RunOptions& options, std::vector<std::string> warnings) {
  const auto start = std::chrono::steady_clock::now();
  if (options.threads > 0) omp_set_num_threads(options.threads);
  RunResult result;
  result.output_dir = options.output_dir.value_or(fs::path(cfg.output_dir));
  fs::create_directories(result.output_dir);
  const std::uint64_t seed = options.seed.value_or(cfg.seed);

  Outputs out(result.output_dir);
  json results = json::object();
  Context ctx{cfg, seed, out, warnings, results};
  std::exception_ptr failure;
  try {
    switch (cfg.scenario) {
      case config::Scenario::spectrum:
        run_spectrum(ctx);
        break;
      case config::Scenario::cool:
        run_cool(ctx);
        break;
      case config::Scenario::mc:
        run_mc(ctx);
        break;
      case config::Scenario::sweep:
        run_sweep(ctx);
        break;
      case config::Scenario::string:
        run_string(ctx);
        break;
      case config::Scenario::thermometry:
        run_thermometry(ctx);
        break;
    }
  } catch (...) {
    failure = std::current_exception();
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json meta = {
      {"tool", "eitcool"},
      {"version", EITCOOL_VERSION},
      {"scenario", config::scenario_name(cfg.scenario)},
      {"config_hash", config::config_hash(cfg)},
      {"seed", seed},
      {"threads", omp_get_max_threads()},
      {"wall_time_s", result.wall_seconds},
      {"units", {{"frequency", "MHz"}, {"time", "us"}, {"length", "um"}}},
      {"versions",
       {{"eitcool", EITCOOL_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"gsl", GSL_VERSION},
        {"openmp", _OPENMP}}},
      {"outputs", out.files()},
      {"warnings", warnings},
      {"results", results},
      {"status", failure ? describe(failure) : std::string("ok")},
  };
  if (cfg.scenario == config::Scenario::mc && cfg.mc)
    meta["mc"] = {{"dt_us", cfg.mc->dt}, {"n_max", cfg.mc->n_max}, {"trajectories", cfg.mc->trajectories}};
  out.write("metadata.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });

  if (failure) std::rethrow_exception(failure);
  result.files = out.files();
  result.warnings = std::move(warnings);
  return result;
}

int exit_code(const std::exception_ptr& error) noexcept {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    return static_cast<int>(e.category());
  } catch (...) {
    return 1;
  }
}

std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    return std::string("error category=") + category_name(e.category()) +
           " exit=" + std::to_string(static_cast<int>(e.category())) + ": " + e.what();
  } catch (const std::exception& e) {
    return std::string("error category=internal exit=1: ") + e.what();
  } catch (...) {
    return "error category=internal exit=1: unknown exception";
  }
}

}  // namespace eitcool::runner
