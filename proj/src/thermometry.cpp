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

#include "eitcool/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"
#include "eitcool/random.hpp"
#include "eitcool/ratecool.hpp"

namespace eitcool::thermometry {

namespace {

constexpr double kZ95 = 1.96;
constexpr double kMbarMin = 1e-3;
constexpr double kMbarMax = 50.0;
constexpr double kMinCoverage = 0.25;

// Thermal weights with a tail far below double precision of the fit.
std::vector<double> thermal_weights(double mbar) {
  const auto n_max = static_cast<std::size_t>(std::ceil(40.0 * (1.0 + mbar)));
  return ratecool::thermal_distribution(mbar, n_max).p;
}

std::vector<double> thermal_cdf(double mbar) {
  std::vector<double> cdf = thermal_weights(mbar);
  for (std::size_t n = 1; n < cdf.size(); ++n) cdf[n] += cdf[n - 1];
  return cdf;
}

double sq(double x) { return x * x; }

std::size_t binomial(Rng& rng, std::size_t shots, double p) {
  std::size_t k = 0;
  for (std::size_t s = 0; s < shots; ++s)
    if (rng.uniform() < p) ++k;
  return k;
}

}  // namespace

void SidebandCounts::validate() const {
  if (shots_per_side == 0) throw ConfigError("sideband counts need shots_per_side > 0");
  if (red_excited > shots_per_side || blue_excited > shots_per_side)
    throw ConfigError("sideband counts exceed the number of shots");
}

SidebandEstimate sideband_ratio_to_n(const SidebandCounts& counts) {
  counts.validate();
  if (counts.blue_excited == 0) throw DomainError("undefined sideband ratio: no blue-sideband excitation");
  const double shots = static_cast<double>(counts.shots_per_side);
  const double pr = static_cast<double>(counts.red_excited) / shots;
  const double pb = static_cast<double>(counts.blue_excited) / shots;
  if (pr >= pb)
    throw DomainError("sideband ratio out of thermal range: red/blue = " + csv::format(pr / pb) + " >= 1");
  SidebandEstimate e;
  if (counts.red_excited == 0) {
    // Zero of n events: one-sided 95% upper bound on the red probability.
    const double pr_up = 1.0 - std::pow(0.05, 1.0 / shots);
    e.one_sided = true;
    e.upper = pr_up < pb ? pr_up / (pb - pr_up) : std::numeric_limits<double>::infinity();
    return e;
  }
  e.mbar = pr / (pb - pr);
  const double var_r = pr * (1.0 - pr) / shots;
  const double var_b = pb * (1.0 - pb) / shots;
  const double d4 = sq(sq(pb - pr));
  const double sigma = std::sqrt((pb * pb * var_r + pr * pr * var_b) / d4);
  e.lower = std::max(0.0, e.mbar - kZ95 * sigma);
  e.upper = e.mbar + kZ95 * sigma;
  return e;
}

double blue_pi_time(double eta, double omega) {
  if (!(eta > 0.0) || !(omega > 0.0)) throw DomainError("pi time needs eta > 0 and Omega > 0");
  return std::numbers::pi / (2.0 * eta * omega);
}

SidebandCounts simulate_shelving(double mbar, double eta, double omega, double pulse_time, std::size_t shots,
                                 std::uint64_t seed) {
  if (!(mbar >= 0.0)) throw DomainError("mbar must be >= 0");
  if (!(eta >= 0.0) || !(omega >= 0.0)) throw DomainError("eta and Omega must be >= 0");
  const double t = pulse_time < 0.0 ? blue_pi_time(eta, omega) : pulse_time;
  const std::vector<double> cdf = thermal_cdf(mbar);
  Rng rng(seed);
  SidebandCounts c;
  c.shots_per_side = shots;
  const double theta = eta * omega * t;
  for (std::size_t s = 0; s < shots; ++s) {
    const auto n = static_cast<double>(rng.sample(cdf));
    if (rng.uniform() < sq(std::sin(theta * std::sqrt(n)))) ++c.red_excited;
  }
  for (std::size_t s = 0; s < shots; ++s) {
    const auto n = static_cast<double>(rng.sample(cdf));
    if (rng.uniform() < sq(std::sin(theta * std::sqrt(n + 1.0)))) ++c.blue_excited;
  }
  return c;
}

void RabiDataset::validate() const {
  if (times.size() != excitation.size()) throw ConfigError("Rabi dataset: times and excitation differ in length");
  for (double p : excitation)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Rabi dataset: excitation " + csv::format(p) + " outside [0, 1]");
}

namespace {

void model(const std::vector<double>& pn, double eta, double omega, double decay, const std::vector<double>& times,
           std::vector<double>& out) {
  out.assign(times.size(), 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double p = 0.0;
    if (decay > 0.0) {
      const double env = std::exp(-decay * t);
      for (std::size_t n = 0; n < pn.size(); ++n)
        p += pn[n] * 0.5 * (1.0 - env * std::cos(2.0 * eta * omega * std::sqrt(static_cast<double>(n + 1)) * t));
    } else {
      for (std::size_t n = 0; n < pn.size(); ++n)
        p += pn[n] * sq(std::sin(eta * omega * std::sqrt(static_cast<double>(n + 1)) * t));
    }
    out[i] = p;
  }
}

}  // namespace

RabiDataset rabi_signal(double mbar, double eta, double omega, const std::vector<double>& times, double decay) {
  if (!(mbar >= 0.0)) throw DomainError("mbar must be >= 0");
  if (!(decay >= 0.0)) throw DomainError("decay must be >= 0");
  RabiDataset d;
  d.times = times;
  model(thermal_weights(mbar), eta, omega, decay, times, d.excitation);
  for (double& p : d.excitation) p = std::clamp(p, 0.0, 1.0);
  return d;
}

RabiDataset add_shot_noise(const RabiDataset& data, std::size_t shots, std::uint64_t seed) {
  data.validate();
  if (shots == 0) throw ConfigError("shot noise needs shots > 0");
  Rng rng(seed);
  RabiDataset out = data;
  out.shots = shots;
  for (double& p : out.excitation) p = static_cast<double>(binomial(rng, shots, p)) / static_cast<double>(shots);
  return out;
}

namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_inverse(double m) { return m > 30.0 ? m : std::log(std::expm1(m)); }

struct Problem {
  const RabiDataset* data;
  double eta;
  double decay;
  double omega_scale;
  std::size_t evaluations = 0;
  std::vector<double> scratch;

  double rss(double mbar, double omega) {
    ++evaluations;
    model(thermal_weights(mbar), eta, omega, decay, data->times, scratch);
    double s = 0.0;
    for (std::size_t i = 0; i < scratch.size(); ++i) s += sq(scratch[i] - data->excitation[i]);
    return s;
  }
};

double simplex_objective(const gsl_vector* x, void* params) {
  auto& p = *static_cast<Problem*>(params);
  const double mbar = softplus(gsl_vector_get(x, 0));
  const double omega = gsl_vector_get(x, 1) * p.omega_scale;
  if (!(omega > 0.0) || !std::isfinite(mbar) || mbar > 1e3) return std::numeric_limits<double>::max();
  return p.rss(mbar, omega);
}

// Dominant angular frequency of the mean-subtracted signal.
double periodogram_peak(const RabiDataset& d) {
  const std::size_t m = d.times.size();
  double mean = 0.0;
  for (double p : d.excitation) mean += p;
  mean /= static_cast<double>(m);
  const double span = d.times.back() - d.times.front();
  const double w_min = 0.5 * std::numbers::pi / span;
  const double w_max = std::numbers::pi * static_cast<double>(m - 1) / span;
  const std::size_t grid = 8 * m + 400;
  double best_w = w_min, best_p = -1.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double w = w_min + (w_max - w_min) * static_cast<double>(k) / static_cast<double>(grid - 1);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += (d.excitation[i] - mean) * std::polar(1.0, -w * d.times[i]);
    const double power = std::norm(acc);
    if (power > best_p) {
      best_p = power;
      best_w = w;
    }
  }
  return best_w;
}

struct Point {
  double mbar;
  double omega;
  double rss;
};

Point refine(Problem& prob, Point start) {
  const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
  gsl_multimin_function f{simplex_objective, 2, &prob};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(type, 2);
  Point best = start;
  // Restart once from the converged point to escape a collapsed simplex.
  for (int round = 0; round < 2; ++round) {
    gsl_vector_set(x, 0, softplus_inverse(std::max(best.mbar, 1e-6)));
    gsl_vector_set(x, 1, best.omega / prob.omega_scale);
    gsl_vector_set(step, 0, 0.5);
    gsl_vector_set(step, 1, 0.02);
    gsl_multimin_fminimizer_set(s, &f, x, step);
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-11) == GSL_SUCCESS) break;
    }
    const double r = gsl_multimin_fminimizer_minimum(s);
    if (r <= best.rss) {
      best.mbar = softplus(gsl_vector_get(s->x, 0));
      best.omega = gsl_vector_get(s->x, 1) * prob.omega_scale;
      best.rss = r;
    }
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

// Grid over (mbar, Omega): a fine band around the periodogram estimate plus a
// log-spaced sweep down to slow signals the periodogram cannot resolve.
Point coarse_search(Problem& prob, double omega0) {
  constexpr std::size_t kOmegaPoints = 41;
  constexpr std::size_t kMbarPoints = 36;
  const double span = prob.data->times.back() - prob.data->times.front();
  const double slow = 0.025 * std::numbers::pi / (2.0 * prob.eta * span);  // 1/80 oscillation over the span
  const double fast = std::max(1.2 * omega0, 2.0 * slow);
  std::vector<double> omegas;
  for (std::size_t i = 0; i < kOmegaPoints; ++i)
    omegas.push_back(omega0 * (0.8 + 0.4 * static_cast<double>(i) / (kOmegaPoints - 1)));
  for (std::size_t i = 0; i < kOmegaPoints; ++i)
    omegas.push_back(slow * std::pow(fast / slow, static_cast<double>(i) / (kOmegaPoints - 1)));
  Point best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < kMbarPoints; ++j) {
    const double mbar = kMbarMin * std::pow(kMbarMax / kMbarMin, static_cast<double>(j) / (kMbarPoints - 1));
    const std::vector<double> pn = thermal_weights(mbar);
    for (double omega : omegas) {
      ++prob.evaluations;
      model(pn, prob.eta, omega, prob.decay, prob.data->times, prob.scratch);
      double r = 0.0;
      for (std::size_t k = 0; k < prob.scratch.size(); ++k) r += sq(prob.scratch[k] - prob.data->excitation[k]);
      if (r < best.rss) best = {mbar, omega, r};
    }
  }
  return best;
}

void check_fit_input(const RabiDataset& data, double eta) {
  data.validate();
  if (!(eta > 0.0)) throw DomainError("fit needs eta > 0");
  if (data.times.size() < 8) throw DomainError("fit needs at least 8 data points, got " + std::to_string(data.times.size()));
  for (std::size_t i = 1; i < data.times.size(); ++i)
    if (!(data.times[i] > data.times[i - 1])) throw ConfigError("fit needs strictly increasing times");
  const auto [lo, hi] = std::minmax_element(data.excitation.begin(), data.excitation.end());
  if (*hi - *lo < 1e-12) throw DomainError("degenerate data: the excitation signal is constant");
}

Point fit_core(const RabiDataset& data, double eta, double decay, double omega0, std::size_t& evaluations,
               const Point* start) {
  Problem prob{&data, eta, decay, omega0, 0, {}};
  const Point seed = start ? *start : coarse_search(prob, omega0);
  const Point best = refine(prob, seed);
  evaluations += prob.evaluations;
  return best;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

double stddev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += sq(x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

FitResult fit_impl(const RabiDataset& data, double eta, const FitOptions& options, bool parallel) {
  check_fit_input(data, eta);
  FitResult r;
  const double w = periodogram_peak(data);
  r.omega_seed = w / (2.0 * eta);
  const Point best = fit_core(data, eta, options.decay, r.omega_seed, r.evaluations, nullptr);
  r.mbar = best.mbar;
  r.omega = best.omega;
  r.rss = best.rss;
  const double span = data.times.back() - data.times.front();
  r.coverage = 2.0 * eta * r.omega * span / (2.0 * std::numbers::pi);
  if (r.coverage < kMinCoverage)
    throw DomainError("degenerate fit: the data cover " + csv::format(r.coverage) +
                      " Rabi oscillations (< 0.25); mbar and Omega are not separately identifiable");

  if (options.bootstrap == 0) return r;
  if (data.shots == 0) throw ConfigError("bootstrap needs shot-noise data (shots > 0)");
  if (options.bootstrap < 2) throw ConfigError("bootstrap needs at least 2 resamples");
  const RabiDataset fitted = rabi_signal(r.mbar, eta, r.omega, data.times, options.decay);
  const std::size_t m = options.bootstrap;
  std::vector<double> mbars(m), omegas(m);
  std::vector<std::size_t> evals(m, 0);
  std::vector<std::exception_ptr> errors(m);
  auto one = [&](std::size_t k) {
    try {
      const RabiDataset resampled = add_shot_noise(fitted, data.shots, stream_seed(options.seed, k));
      const Point p = fit_core(resampled, eta, options.decay, r.omega_seed, evals[k], &best);
      mbars[k] = p.mbar;
      omegas[k] = p.omega;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (parallel) {
    const auto n = static_cast<long long>(m);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t k = 0; k < m; ++k) one(k);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    r.evaluations += evals[k];
  }
  r.resamples = m;
  r.mbar_stderr = stddev(mbars);
  r.omega_stderr = stddev(omegas);
  r.mbar_lower = percentile(mbars, 0.025);
  r.mbar_upper = percentile(mbars, 0.975);
  return r;
}

}  // namespace

FitResult fit_thermal(const RabiDataset& data, double eta, const FitOptions& options) {
  return fit_impl(data, eta, options, true);
}

FitResult fit_thermal_serial(const RabiDataset& data, double eta, const FitOptions& options) {
  return fit_impl(data, eta, options, false);
}

void write_dataset_csv(std::ostream& os, const RabiDataset& data) {
  csv::Writer out(os, {"t_us", "p_excited", "shots"});
  for (std::size_t i = 0; i < data.times.size(); ++i)
    out.field(data.times[i]).field(data.excitation[i]).field(static_cast<long long>(data.shots)).end_row();
}

void write_fit_report(std::ostream& os, const FitResult& fit) {
  auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  kv("mbar", csv::format(fit.mbar));
  kv("omega_mhz", csv::format(fit.omega));
  kv("ground_state_probability", csv::format(fit.ground_state_probability()));
  kv("residual_sum_of_squares", csv::format(fit.rss));
  kv("omega_seed_mhz", csv::format(fit.omega_seed));
  kv("oscillations_covered", csv::format(fit.coverage));
  kv("model_evaluations", std::to_string(fit.evaluations));
  if (fit.resamples > 0) {
    kv("bootstrap_resamples", std::to_string(fit.resamples));
    kv("mbar_stderr", csv::format(fit.mbar_stderr));
    kv("mbar_interval_low", csv::format(fit.mbar_lower));
    kv("mbar_interval_high", csv::format(fit.mbar_upper));
    kv("omega_stderr_mhz", csv::format(fit.omega_stderr));
  }
}

}  // namespace eitcool::thermometry
