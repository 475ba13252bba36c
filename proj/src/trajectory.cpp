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

#include "eitcool/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"
#include "eitcool/random.hpp"

namespace eitcool::trajectory {

namespace {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

constexpr int kLevels = 16;  // finest step is dt / 2^kLevels
constexpr std::uint64_t kTicksPerStep = std::uint64_t{1} << kLevels;
constexpr int kMaxHalvings = 4;
constexpr double kMaxStepLoss = 0.1;
constexpr double kFockTopLimit = 1e-4;

double mean_u2(const TrajectoryConfig& c) {
  return c.emission == EmissionPattern::isotropic ? 1.0 / 3.0 : c.mode.recoil_alpha;
}

// Everything a trajectory needs that does not depend on the seed.
struct Setup {
  std::size_t levels = 0;
  std::size_t fock = 0;  // n_max + 1
  Matrix position;       // X = a + a^dagger, truncated
  std::vector<Matrix> step;  // step[k] = exp(-i H_eff dt / 2^k)
  std::vector<double> thermal_cdf;
  std::uint64_t total_ticks = 0;
  std::uint64_t record_stride = 0;  // ticks between samples
  std::uint64_t tail_start = 0;     // first tick of the steady-state window
  double tick = 0.0;                // us per tick
};

Setup build_setup(const TrajectoryConfig& cfg) {
  cfg.validate();
  Setup s;
  const LevelScheme& scheme = cfg.scheme;
  s.levels = scheme.dimension();
  s.fock = cfg.n_max + 1;
  const auto F = static_cast<Index>(s.fock);
  const auto D = static_cast<Index>(s.levels * s.fock);
  const double eta = cfg.mode.lamb_dicke;

  s.position = Matrix::Zero(F, F);
  for (Index n = 0; n + 1 < F; ++n) s.position(n, n + 1) = s.position(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  const Matrix x2 = s.position * s.position;
  const Matrix id = Matrix::Identity(F, F);

  Matrix h = Matrix::Zero(D, D);
  const auto& energies = scheme.frame_energies();
  for (std::size_t l = 0; l < s.levels; ++l) {
    const Index o = static_cast<Index>(l) * F;
    for (Index n = 0; n < F; ++n) h(o + n, o + n) = energies[l] + cfg.mode.frequency * static_cast<double>(n);
  }
  for (const auto& c : scheme.couplings()) {
    const Index lo = static_cast<Index>(scheme.index_of(c.lower)) * F;
    const Index up = static_cast<Index>(scheme.index_of(c.upper)) * F;
    const Matrix kick = Complex(0.0, eta * c.axis_cosine) * s.position;
    h.block(up, lo, F, F) += 0.5 * c.rabi * (id + kick);
    h.block(lo, up, F, F) += 0.5 * c.rabi * (id - kick);
  }
  // -i/2 sum C^dagger C, with the recoil factor averaged over the emission pattern.
  const Matrix decay_block = id + eta * eta * mean_u2(cfg) * x2;
  for (const auto& d : scheme.decays()) {
    const Index f = static_cast<Index>(scheme.index_of(d.from)) * F;
    h.block(f, f, F, F) += Complex(0.0, -0.5 * d.rate) * decay_block;
  }

  s.step.resize(kLevels + 1);
  for (int k = 0; k <= kLevels; ++k) {
    const Matrix a = Complex(0.0, -cfg.dt / std::ldexp(1.0, k)) * h;
    s.step[static_cast<std::size_t>(k)] = a.exp();
  }

  const auto thermal = ratecool::thermal_distribution(cfg.initial_n, cfg.n_max);
  s.thermal_cdf.resize(thermal.p.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < thermal.p.size(); ++n) s.thermal_cdf[n] = (acc += thermal.p[n]);

  const auto steps = static_cast<std::uint64_t>(std::llround(cfg.t_final / cfg.dt));
  const auto intervals = static_cast<std::uint64_t>(cfg.samples - 1);
  s.total_ticks = steps * kTicksPerStep;
  s.record_stride = steps / intervals * kTicksPerStep;
  const std::uint64_t tail_steps = steps - static_cast<std::uint64_t>(std::floor(0.2 * static_cast<double>(steps)));
  s.tail_start = tail_steps * kTicksPerStep;
  s.tick = cfg.dt / static_cast<double>(kTicksPerStep);
  return s;
}

[[noreturn]] void rethrow_with_context(std::exception_ptr e, const std::string& context) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    const std::string msg = context + ": " + err.what();
    switch (err.category()) {
      case ErrorCategory::config:
        throw ConfigError(msg);
      case ErrorCategory::domain:
        throw DomainError(msg);
      case ErrorCategory::numerical:
        throw NumericalError(msg);
    }
    throw;
  } catch (const std::exception& err) {
    throw std::runtime_error(context + ": " + err.what());
  }
}

class Walker {
 public:
  Walker(const TrajectoryConfig& cfg, const Setup& s, std::uint64_t seed)
      : cfg_(cfg), s_(s), rng_(seed), psi_(Vector::Zero(static_cast<Index>(s.levels * s.fock))) {
    rec_.seed = seed;
  }

  TrajectoryRecord run() {
    const std::size_t n0 = rng_.sample(s_.thermal_cdf);
    psi_(static_cast<Index>(n0)) = 1.0;  // first listed level, Fock state n0
    threshold_ = 1.0 - rng_.uniform();
    rec_.tail_pn.assign(s_.fock, 0.0);

    std::uint64_t tick = 0;
    std::uint64_t next_record = 0;
    std::size_t tail_points = 0;
    double norm2 = 1.0;
    for (;;) {
      if (tick == next_record) {
        record(tick, norm2, tail_points);
        if (tick >= s_.total_ticks) break;
        next_record = std::min(next_record + s_.record_stride, s_.total_ticks);
      }
      // Largest aligned chunk that does not pass the next record time.
      int level = 0;
      while (tick % (kTicksPerStep >> level) != 0 || tick + (kTicksPerStep >> level) > next_record) ++level;
      int halvings = 0;
      for (;;) {
        next_.noalias() = s_.step[static_cast<std::size_t>(level)] * psi_;
        const double n2 = next_.squaredNorm();
        if (1.0 - n2 / norm2 > kMaxStepLoss) {
          if (++halvings > kMaxHalvings || level == kLevels)
            throw ConfigError("dt = " + csv::format(cfg_.dt) + " us is too large: a step loses more than 10% of the norm after " +
                              std::to_string(kMaxHalvings) + " halvings");
          ++level;
          continue;
        }
        rec_.max_norm_increase = std::max(rec_.max_norm_increase, (n2 - norm2) / norm2);
        if (n2 > threshold_) {
          psi_.swap(next_);
          norm2 = n2;
          tick += kTicksPerStep >> level;
        } else {
          tick = locate_jump(tick, level);
          jump();
          norm2 = 1.0;
        }
        break;
      }
      check_fock_top(norm2);
    }
    if (tail_points > 0) {
      for (double& p : rec_.tail_pn) p /= static_cast<double>(tail_points);
      rec_.tail_mean_n /= static_cast<double>(tail_points);
    }
    return std::move(rec_);
  }

 private:
  // Bisects the chunk of `level` starting at `tick` over the finer propagators; leaves
  // psi_ one tick past the threshold crossing and returns that tick.
  std::uint64_t locate_jump(std::uint64_t tick, int level) {
    for (int k = level + 1; k <= kLevels; ++k) {
      next_.noalias() = s_.step[static_cast<std::size_t>(k)] * psi_;
      if (next_.squaredNorm() > threshold_) {
        psi_.swap(next_);
        tick += kTicksPerStep >> k;
      }
    }
    next_.noalias() = s_.step[kLevels] * psi_;
    psi_.swap(next_);
    return tick + 1;
  }

  void jump() {
    renormalise();
    const auto F = static_cast<Index>(s_.fock);
    const double eta = cfg_.mode.lamb_dicke;
    const double u2 = mean_u2(cfg_);
    const auto& decays = cfg_.scheme.decays();
    std::vector<double> weights(decays.size());
    double total = 0.0;
    for (std::size_t j = 0; j < decays.size(); ++j) {
      const Index f = static_cast<Index>(cfg_.scheme.index_of(decays[j].from)) * F;
      const auto phi = psi_.segment(f, F);
      weights[j] = decays[j].rate * (phi.squaredNorm() + eta * eta * u2 * (s_.position * phi).squaredNorm());
      total += weights[j];
    }
    if (!(total > 0.0)) throw NumericalError("quantum jump requested with no population in a decaying level");
    const double pick = rng_.uniform() * total;
    std::size_t j = 0;
    for (double acc = weights[0]; j + 1 < decays.size() && acc <= pick; acc += weights[++j]) {
    }

    double u;
    if (cfg_.emission == EmissionPattern::isotropic) {
      u = 2.0 * rng_.uniform() - 1.0;
    } else {
      u = (rng_.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(cfg_.mode.recoil_alpha);
    }
    const Index from = static_cast<Index>(cfg_.scheme.index_of(decays[j].from)) * F;
    const Index to = static_cast<Index>(cfg_.scheme.index_of(decays[j].to)) * F;
    Vector phi = psi_.segment(from, F);
    Vector kicked = phi + Complex(0.0, eta * u) * (s_.position * phi);
    psi_.setZero();
    psi_.segment(to, F) = kicked;
    renormalise();
    ++rec_.jumps;
    threshold_ = 1.0 - rng_.uniform();
  }

  void renormalise() {
    psi_ /= psi_.norm();
    rec_.max_renorm_defect = std::max(rec_.max_renorm_defect, std::abs(psi_.squaredNorm() - 1.0));
  }

  void check_fock_top(double norm2) const {
    const auto F = static_cast<Index>(s_.fock);
    double top = 0.0;
    for (std::size_t l = 0; l < s_.levels; ++l) top += std::norm(psi_(static_cast<Index>(l) * F + F - 1));
    if (top / norm2 > kFockTopLimit)
      throw NumericalError("Fock truncation too small: population " + csv::format(top / norm2) + " at n_max = " +
                           std::to_string(cfg_.n_max) + "; increase n_max");
  }

  void record(std::uint64_t tick, double norm2, std::size_t& tail_points) {
    const auto F = static_cast<Index>(s_.fock);
    std::vector<double> pn(s_.fock, 0.0);
    for (std::size_t l = 0; l < s_.levels; ++l)
      for (Index n = 0; n < F; ++n) pn[static_cast<std::size_t>(n)] += std::norm(psi_(static_cast<Index>(l) * F + n));
    double mean = 0.0;
    for (std::size_t n = 0; n < s_.fock; ++n) mean += static_cast<double>(n) * pn[n];
    mean /= norm2;
    rec_.times.push_back(static_cast<double>(tick) * s_.tick);
    rec_.mean_n.push_back(mean);
    if (tick >= s_.tail_start) {
      for (std::size_t n = 0; n < s_.fock; ++n) rec_.tail_pn[n] += pn[n] / norm2;
      rec_.tail_mean_n += mean;
      ++tail_points;
    }
  }

  const TrajectoryConfig& cfg_;
  const Setup& s_;
  Rng rng_;
  Vector psi_;
  Vector next_;
  double threshold_ = 1.0;
  TrajectoryRecord rec_;
};

EnsembleResult reduce(const TrajectoryConfig& cfg, std::vector<TrajectoryRecord>& records) {
  const std::size_t m = records.size();
  const double dm = static_cast<double>(m);
  EnsembleResult r;
  r.n_trajectories = m;
  r.seed = cfg.seed;
  r.times = records.front().times;
  const std::size_t points = r.times.size();
  const std::size_t fock = records.front().tail_pn.size();

  auto mean_and_stderr = [&](auto&& value, double& mean, double& err) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += value(i);
    mean = sum / dm;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += (value(i) - mean) * (value(i) - mean);
    err = std::sqrt(ss / (dm - 1.0)) / std::sqrt(dm);
  };

  r.mean_n.resize(points);
  r.stderr_n.resize(points);
  for (std::size_t k = 0; k < points; ++k)
    mean_and_stderr([&](std::size_t i) { return records[i].mean_n[k]; }, r.mean_n[k], r.stderr_n[k]);
  r.steady_pn.p.resize(fock);
  r.steady_pn_stderr.resize(fock);
  for (std::size_t n = 0; n < fock; ++n)
    mean_and_stderr([&](std::size_t i) { return records[i].tail_pn[n]; }, r.steady_pn.p[n], r.steady_pn_stderr[n]);
  mean_and_stderr([&](std::size_t i) { return records[i].tail_mean_n; }, r.steady_mean_n, r.steady_stderr);
  for (const auto& rec : records) r.total_jumps += rec.jumps;
  return r;
}

void check_count(std::size_t n_trajectories) {
  if (n_trajectories < 2) throw ConfigError("an ensemble needs at least 2 trajectories");
}

}  // namespace

void TrajectoryConfig::validate() const {
  std::vector<std::string> errors;
  if (!(mode.frequency > 0.0)) errors.emplace_back("mode frequency must be > 0");
  if (!(mode.lamb_dicke >= 0.0)) errors.emplace_back("lamb_dicke must be >= 0");
  if (!(mode.recoil_alpha >= 0.0 && mode.recoil_alpha <= 1.0)) errors.emplace_back("recoil_alpha must lie in [0, 1]");
  if (!(dt > 0.0)) errors.emplace_back("dt must be > 0");
  if (!(t_final > 0.0)) errors.emplace_back("t_final must be > 0");
  if (!(initial_n >= 0.0)) errors.emplace_back("initial_n must be >= 0");
  if (static_cast<double>(n_max) < 5.0 * (1.0 + initial_n))
    errors.emplace_back("n_max must be >= 5 (1 + initial_n)");
  if (samples < 2) errors.emplace_back("samples must be >= 2");
  if (dt > 0.0 && t_final > 0.0 && samples >= 2) {
    const double steps = t_final / dt;
    const long long whole = std::llround(steps);
    if (whole < 1 || std::abs(steps - static_cast<double>(whole)) > 1e-9 * steps)
      errors.emplace_back("t_final must be a whole number of dt steps");
    else if (static_cast<unsigned long long>(whole) % (samples - 1) != 0)
      errors.emplace_back("the number of dt steps (" + std::to_string(whole) + ") must be a multiple of samples - 1");
  }
  if (scheme.decays().empty()) errors.emplace_back("the scheme needs at least one decay channel");
  if (errors.empty()) return;
  std::string msg = "trajectory configuration invalid:";
  for (const auto& e : errors) msg += " " + e + ";";
  throw ConfigError(msg);
}

std::uint64_t trajectory_seed(std::uint64_t base, std::size_t index) noexcept {
  return stream_seed(base, index);
}

TrajectoryRecord run_trajectory(const TrajectoryConfig& config) {
  const Setup s = build_setup(config);
  return Walker(config, s, config.seed).run();
}

EnsembleResult ensemble_average(const TrajectoryConfig& config, std::size_t n_trajectories) {
  check_count(n_trajectories);
  const Setup s = build_setup(config);
  std::vector<TrajectoryRecord> records(n_trajectories);
  std::vector<std::exception_ptr> errors(n_trajectories);
  const auto n = static_cast<long long>(n_trajectories);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      records[k] = Walker(config, s, trajectory_seed(config.seed, k)).run();
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (std::size_t k = 0; k < n_trajectories; ++k)
    if (errors[k])
      rethrow_with_context(errors[k], "trajectory " + std::to_string(k) + " (seed " +
                                          std::to_string(trajectory_seed(config.seed, k)) + ")");
  return reduce(config, records);
}

EnsembleResult ensemble_average_serial(const TrajectoryConfig& config, std::size_t n_trajectories) {
  check_count(n_trajectories);
  const Setup s = build_setup(config);
  std::vector<TrajectoryRecord> records;
  records.reserve(n_trajectories);
  for (std::size_t k = 0; k < n_trajectories; ++k) {
    try {
      records.push_back(Walker(config, s, trajectory_seed(config.seed, k)).run());
    } catch (...) {
      rethrow_with_context(std::current_exception(), "trajectory " + std::to_string(k) + " (seed " +
                                                         std::to_string(trajectory_seed(config.seed, k)) + ")");
    }
  }
  return reduce(config, records);
}

void write_ensemble_csv(std::ostream& os, const EnsembleResult& result) {
  csv::Writer out(os, {"t_us", "mean_n", "stderr_n"});
  for (std::size_t k = 0; k < result.times.size(); ++k)
    out.field(result.times[k]).field(result.mean_n[k]).field(result.stderr_n[k]).end_row();
}

}  // namespace eitcool::trajectory
