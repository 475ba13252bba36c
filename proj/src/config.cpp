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

#include "eitcool/config.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/sha.h>
#include <yaml-cpp/yaml.h>

#include "eitcool/csv.hpp"
#include "eitcool/error.hpp"

namespace eitcool::config {

const char* scenario_name(Scenario s) noexcept {
  switch (s) {
    case Scenario::spectrum:
      return "spectrum";
    case Scenario::cool:
      return "cool";
    case Scenario::mc:
      return "mc";
    case Scenario::string:
      return "string";
    case Scenario::thermometry:
      return "thermometry";
    case Scenario::sweep:
      return "sweep";
  }
  return "?";
}

namespace {

constexpr std::array<Scenario, 6> kScenarios{Scenario::spectrum, Scenario::cool,        Scenario::mc,
                                             Scenario::string,   Scenario::thermometry, Scenario::sweep};

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  Reader(std::string source, bool strict) : source_(std::move(source)), strict_(strict) {}

  std::string where(const YAML::Node& n) const {
    const YAML::Mark m = n.Mark();
    if (m.is_null()) return source_;
    return source_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
  }

  void error(const YAML::Node& at, const std::string& msg) { errors_.push_back(where(at) + ": " + msg); }
  void error(const std::string& msg) { errors_.push_back(source_ + ": " + msg); }
  void warn(const YAML::Node& at, const std::string& msg) { warnings_.push_back(where(at) + ": " + msg); }

  // A mapping whose keys are checked off as they are read.
  struct Block {
    YAML::Node node;
    std::string path;
    std::set<std::string> used;
  };

  std::optional<Block> block(const YAML::Node& parent, const std::string& key, const std::string& path) {
    const YAML::Node n = parent[key];
    if (!n) return std::nullopt;
    if (!n.IsMap()) {
      error(n, path + ": expected a mapping");
      return std::nullopt;
    }
    return Block{n, path, {}};
  }

  template <class T>
  std::optional<T> get(Block& b, const std::string& key, bool required, const char* what) {
    b.used.insert(key);
    const YAML::Node n = b.node[key];
    if (!n) {
      if (required) error(b.node, b.path + "." + key + ": required " + what + " is missing");
      return std::nullopt;
    }
    try {
      if constexpr (std::is_same_v<T, std::size_t>) {
        const long long v = n.as<long long>();
        if (v < 0) {
          error(n, b.path + "." + key + ": expected a non-negative integer");
          return std::nullopt;
        }
        return static_cast<std::size_t>(v);
      } else {
        return n.as<T>();
      }
    } catch (const YAML::Exception&) {
      error(n, b.path + "." + key + ": expected " + what);
      return std::nullopt;
    }
  }

  template <class T>
  T get_or(Block& b, const std::string& key, T fallback, const char* what) {
    return get<T>(b, key, false, what).value_or(fallback);
  }

  void finish(const Block& b) {
    for (const auto& kv : b.node) {
      const std::string key = kv.first.as<std::string>();
      if (b.used.count(key)) continue;
      const std::string msg = b.path + ": unknown key '" + key + "'";
      if (strict_) error(kv.first, msg);
      else warn(kv.first, msg);
    }
  }

  bool strict() const noexcept { return strict_; }
  std::vector<std::string>& errors() noexcept { return errors_; }
  std::vector<std::string>& warnings() noexcept { return warnings_; }

 private:
  std::string source_;
  bool strict_;
  std::vector<std::string> errors_;
  std::vector<std::string> warnings_;
};

std::optional<LevelScheme> read_scheme(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "scheme", "scheme");
  if (!b) return std::nullopt;
  b->used.insert("levels");
  b->used.insert("couplings");
  b->used.insert("decays");
  std::vector<Level> levels;
  std::vector<LaserField> couplings;
  std::vector<DecayChannel> decays;
  bool ok = true;

  const YAML::Node lv = b->node["levels"];
  if (!lv || !lv.IsSequence() || lv.size() == 0) {
    r.error(lv ? lv : b->node, "scheme.levels: expected a non-empty list");
    ok = false;
  } else {
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const YAML::Node item = lv[i];
      const std::string path = "scheme.levels[" + std::to_string(i) + "]";
      if (item.IsScalar()) {
        levels.push_back({item.as<std::string>(), 0.0});
        continue;
      }
      if (!item.IsMap()) {
        r.error(item, path + ": expected a label or a mapping");
        ok = false;
        continue;
      }
      Reader::Block lb{item, path, {}};
      Level l;
      auto label = r.get<std::string>(lb, "label", true, "a level label");
      l.energy_offset = r.get_or<double>(lb, "energy_offset", 0.0, "a number (MHz)");
      r.finish(lb);
      if (!label) { ok = false; continue; }
      l.label = *label;
      levels.push_back(l);
    }
  }

  const YAML::Node cv = b->node["couplings"];
  if (cv && !cv.IsSequence()) {
    r.error(cv, "scheme.couplings: expected a list");
    ok = false;
  } else if (cv) {
    for (std::size_t i = 0; i < cv.size(); ++i) {
      Reader::Block cb{cv[i], "scheme.couplings[" + std::to_string(i) + "]", {}};
      if (!cb.node.IsMap()) {
        r.error(cb.node, cb.path + ": expected a mapping");
        ok = false;
        continue;
      }
      LaserField f;
      auto lower = r.get<std::string>(cb, "lower", true, "a level label");
      auto upper = r.get<std::string>(cb, "upper", true, "a level label");
      auto rabi = r.get<double>(cb, "rabi", true, "a number (MHz)");
      auto det = r.get<double>(cb, "detuning", true, "a number (MHz)");
      f.axis_cosine = r.get_or<double>(cb, "axis_cosine", 1.0, "a number in [-1, 1]");
      r.finish(cb);
      if (!lower || !upper || !rabi || !det) { ok = false; continue; }
      f.lower = *lower;
      f.upper = *upper;
      f.rabi = *rabi;
      f.detuning = *det;
      couplings.push_back(f);
    }
  }

  const YAML::Node dv = b->node["decays"];
  if (dv && !dv.IsSequence()) {
    r.error(dv, "scheme.decays: expected a list");
    ok = false;
  } else if (dv) {
    for (std::size_t i = 0; i < dv.size(); ++i) {
      Reader::Block db{dv[i], "scheme.decays[" + std::to_string(i) + "]", {}};
      if (!db.node.IsMap()) {
        r.error(db.node, db.path + ": expected a mapping");
        ok = false;
        continue;
      }
      auto from = r.get<std::string>(db, "from", true, "a level label");
      auto to = r.get<std::string>(db, "to", true, "a level label");
      auto rate = r.get<double>(db, "rate", true, "a number (MHz)");
      r.finish(db);
      if (!from || !to || !rate) { ok = false; continue; }
      decays.push_back({*from, *to, *rate});
    }
  }
  r.finish(*b);
  if (!ok) return std::nullopt;
  try {
    return LevelScheme(std::move(levels), std::move(couplings), std::move(decays));
  } catch (const Error& e) {
    r.error(b->node, std::string("scheme: ") + e.what());
    return std::nullopt;
  }
}

std::optional<TrapMode> read_mode(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "mode", "mode");
  if (!b) return std::nullopt;
  TrapMode m;
  auto f = r.get<double>(*b, "frequency", true, "a number (MHz)");
  auto eta = r.get<double>(*b, "lamb_dicke", true, "a number");
  m.recoil_alpha = r.get_or<double>(*b, "recoil_alpha", 1.0 / 3.0, "a number in [0, 1]");
  r.finish(*b);
  if (!f || !eta) return std::nullopt;
  m.frequency = *f;
  m.lamb_dicke = *eta;
  try {
    m.validate();
  } catch (const Error& e) {
    r.error(b->node, std::string("mode: ") + e.what());
    return std::nullopt;
  }
  return m;
}

std::optional<PhysicalSpecies> read_species(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "species", "species");
  if (!b) return std::nullopt;
  auto mass = r.get<double>(*b, "mass_amu", true, "a number (u)");
  auto wl = r.get<double>(*b, "wavelength_nm", true, "a number (nm)");
  r.finish(*b);
  if (!mass || !wl) return std::nullopt;
  PhysicalSpecies s{*mass, *wl};
  try {
    s.validate();
  } catch (const Error& e) {
    r.error(b->node, std::string("species: ") + e.what());
    return std::nullopt;
  }
  return s;
}

void check(Reader& r, const YAML::Node& at, bool ok, const std::string& msg) {
  if (!ok) r.error(at, msg);
}

std::optional<SpectrumBlock> read_spectrum(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "spectrum", "spectrum");
  if (!b) return std::nullopt;
  SpectrumBlock s;
  auto lo = r.get<double>(*b, "detuning_min", true, "a number (MHz)");
  auto hi = r.get<double>(*b, "detuning_max", true, "a number (MHz)");
  auto pts = r.get<std::size_t>(*b, "points", true, "an integer");
  auto win = r.get<std::vector<double>>(*b, "resonance_window", false, "a pair [min, max] (MHz)");
  r.finish(*b);
  if (!lo || !hi || !pts) return std::nullopt;
  s.detuning_min = *lo;
  s.detuning_max = *hi;
  s.points = *pts;
  check(r, b->node, s.points >= 2, "spectrum.points must be >= 2");
  check(r, b->node, s.detuning_max > s.detuning_min, "spectrum.detuning_max must exceed detuning_min");
  if (win) {
    if (win->size() != 2 || !((*win)[1] > (*win)[0]))
      r.error(b->node["resonance_window"], "spectrum.resonance_window must be [min, max] with max > min");
    else
      s.resonance_window = std::make_pair((*win)[0], (*win)[1]);
  }
  return s;
}

std::optional<CoolBlock> read_cool(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "cool", "cool");
  if (!b) return std::nullopt;
  CoolBlock c;
  auto t = r.get<double>(*b, "t_final", true, "a number (us)");
  c.initial_n = r.get_or<double>(*b, "initial_n", 0.0, "a number");
  c.samples = r.get_or<std::size_t>(*b, "samples", 201, "an integer");
  c.n_max = r.get<std::size_t>(*b, "n_max", false, "an integer");
  r.finish(*b);
  if (!t) return std::nullopt;
  c.t_final = *t;
  check(r, b->node, c.t_final > 0.0, "cool.t_final must be > 0");
  check(r, b->node, c.initial_n >= 0.0, "cool.initial_n must be >= 0");
  check(r, b->node, c.samples >= 2, "cool.samples must be >= 2");
  return c;
}

std::optional<McBlock> read_mc(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "mc", "mc");
  if (!b) return std::nullopt;
  McBlock m;
  auto traj = r.get<std::size_t>(*b, "trajectories", true, "an integer");
  auto t = r.get<double>(*b, "t_final", true, "a number (us)");
  auto dt = r.get<double>(*b, "dt", true, "a number (us)");
  m.n_max = r.get_or<std::size_t>(*b, "n_max", 60, "an integer");
  m.initial_n = r.get_or<double>(*b, "initial_n", 0.0, "a number");
  m.samples = r.get_or<std::size_t>(*b, "samples", 201, "an integer");
  const std::string emission = r.get_or<std::string>(*b, "emission", "isotropic", "isotropic or fixed");
  r.finish(*b);
  if (emission == "isotropic") m.emission = trajectory::EmissionPattern::isotropic;
  else if (emission == "fixed") m.emission = trajectory::EmissionPattern::fixed;
  else r.error(b->node["emission"], "mc.emission must be 'isotropic' or 'fixed'");
  if (!traj || !t || !dt) return std::nullopt;
  m.trajectories = *traj;
  m.t_final = *t;
  m.dt = *dt;
  check(r, b->node, m.trajectories >= 2, "mc.trajectories must be >= 2");
  return m;
}

std::optional<SweepBlock> read_sweep(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "sweep", "sweep");
  if (!b) return std::nullopt;
  SweepBlock s;
  auto lo = r.get<double>(*b, "nu_min", true, "a number (MHz)");
  auto hi = r.get<double>(*b, "nu_max", true, "a number (MHz)");
  auto pts = r.get<std::size_t>(*b, "points", true, "an integer");
  r.finish(*b);
  if (!lo || !hi || !pts) return std::nullopt;
  s.nu_min = *lo;
  s.nu_max = *hi;
  s.points = *pts;
  check(r, b->node, s.nu_min > 0.0, "sweep.nu_min must be > 0");
  check(r, b->node, s.nu_max >= s.nu_min, "sweep.nu_max must be >= nu_min");
  check(r, b->node, s.points >= 1 && (s.points == 1) == (s.nu_max == s.nu_min),
        "sweep.points must be 1 for a degenerate range and >= 2 otherwise");
  return s;
}

std::optional<StringBlock> read_string(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "string", "string");
  if (!b) return std::nullopt;
  StringBlock s;
  auto n = r.get<std::size_t>(*b, "n_ions", true, "an integer");
  auto ax = r.get<double>(*b, "nu_axial", true, "a number (MHz)");
  auto rad = r.get<double>(*b, "nu_radial", true, "a number (MHz)");
  s.gate_wavelength_nm = r.get<double>(*b, "gate_wavelength_nm", false, "a number (nm)");
  s.illuminated = r.get_or<std::vector<bool>>(*b, "illuminated", {}, "a list of booleans");
  r.finish(*b);
  if (!n || !ax || !rad) return std::nullopt;
  s.n_ions = *n;
  s.nu_axial = *ax;
  s.nu_radial = *rad;
  check(r, b->node, s.n_ions >= 1, "string.n_ions must be >= 1");
  check(r, b->node, s.nu_axial > 0.0, "string.nu_axial must be > 0");
  check(r, b->node, s.nu_radial > 0.0, "string.nu_radial must be > 0");
  check(r, b->node, !s.gate_wavelength_nm || *s.gate_wavelength_nm > 0.0, "string.gate_wavelength_nm must be > 0");
  check(r, b->node, s.illuminated.empty() || s.illuminated.size() == s.n_ions,
        "string.illuminated needs one entry per ion");
  return s;
}

std::optional<ThermometryBlock> read_thermometry(Reader& r, const YAML::Node& root) {
  auto b = r.block(root, "thermometry", "thermometry");
  if (!b) return std::nullopt;
  ThermometryBlock t;
  auto mbar = r.get<double>(*b, "mbar", true, "a number");
  auto eta = r.get<double>(*b, "eta", true, "a number");
  auto omega = r.get<double>(*b, "omega", true, "a number (MHz)");
  auto t0 = r.get<double>(*b, "t_start", false, "a number (us)");
  auto t1 = r.get<double>(*b, "t_stop", true, "a number (us)");
  auto pts = r.get<std::size_t>(*b, "points", true, "an integer");
  t.shots = r.get_or<std::size_t>(*b, "shots", 0, "an integer");
  t.decay = r.get_or<double>(*b, "decay", 0.0, "a number (1/us)");
  t.bootstrap = r.get_or<std::size_t>(*b, "bootstrap", 0, "an integer");
  t.sideband_shots = r.get_or<std::size_t>(*b, "sideband_shots", 0, "an integer");
  t.pulse_time = r.get<double>(*b, "pulse_time", false, "a number (us)");
  r.finish(*b);
  if (!mbar || !eta || !omega || !t1 || !pts) return std::nullopt;
  t.mbar = *mbar;
  t.eta = *eta;
  t.omega = *omega;
  t.t_start = t0.value_or(0.0);
  t.t_stop = *t1;
  t.points = *pts;
  check(r, b->node, t.mbar >= 0.0, "thermometry.mbar must be >= 0");
  check(r, b->node, t.eta > 0.0, "thermometry.eta must be > 0");
  check(r, b->node, t.omega > 0.0, "thermometry.omega must be > 0");
  check(r, b->node, t.t_start >= 0.0 && t.t_stop > t.t_start, "thermometry needs 0 <= t_start < t_stop");
  check(r, b->node, t.points >= 8, "thermometry.points must be >= 8 (fit requirement)");
  check(r, b->node, t.decay >= 0.0, "thermometry.decay must be >= 0");
  check(r, b->node, t.bootstrap == 0 || (t.bootstrap >= 2 && t.shots > 0),
        "thermometry.bootstrap needs >= 2 resamples and shots > 0");
  check(r, b->node, !t.pulse_time || *t.pulse_time >= 0.0, "thermometry.pulse_time must be >= 0");
  return t;
}

struct Needs {
  bool scheme, mode, species;
};

Needs needs(Scenario s) {
  switch (s) {
    case Scenario::spectrum:
      return {true, false, false};
    case Scenario::cool:
    case Scenario::mc:
      return {true, true, false};
    case Scenario::sweep:
      return {true, false, true};
    case Scenario::string:
      return {true, false, true};
    case Scenario::thermometry:
      return {false, false, false};
  }
  return {};
}

}  // namespace

Loaded parse_config(const std::string& text, const std::string& source_name, const LoadOptions& options) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": parse error: " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source_name + ": the configuration must be a mapping");

  Reader r(source_name, options.strict);
  Reader::Block top{root, "config", {}};
  RunConfig c;

  const auto scen = r.get<std::string>(top, "scenario", true, "a scenario name");
  std::optional<Scenario> scenario;
  if (scen) {
    for (Scenario s : kScenarios)
      if (*scen == scenario_name(s)) scenario = s;
    if (!scenario)
      r.error(root["scenario"], "scenario '" + *scen + "' is not one of spectrum, cool, mc, string, thermometry, sweep");
  }
  c.output_dir = r.get_or<std::string>(top, "output_dir", "out", "a path");
  c.seed = r.get_or<std::uint64_t>(top, "seed", 0, "a non-negative integer");
  c.probe = r.get_or<std::size_t>(top, "probe", 0, "an integer (coupling index)");
  for (const char* key : {"scheme", "mode", "species"}) top.used.insert(key);
  for (Scenario s : kScenarios) top.used.insert(scenario_name(s));

  c.scheme = read_scheme(r, root);
  c.mode = read_mode(r, root);
  c.species = read_species(r, root);
  c.spectrum = read_spectrum(r, root);
  c.cool = read_cool(r, root);
  c.mc = read_mc(r, root);
  c.sweep = read_sweep(r, root);
  c.string = read_string(r, root);
  c.thermometry = read_thermometry(r, root);
  r.finish(top);

  if (scenario) {
    c.scenario = *scenario;
    for (Scenario s : kScenarios) {
      const bool present = static_cast<bool>(root[scenario_name(s)]);
      if (s == *scenario && !present)
        r.error(root, std::string("scenario '") + scenario_name(s) + "' needs a '" + scenario_name(s) + "' block");
      if (s != *scenario && present)
        r.error(root[scenario_name(s)], std::string("block '") + scenario_name(s) + "' does not belong to scenario '" +
                                            scenario_name(*scenario) + "' (exactly one scenario block is allowed)");
    }
    const Needs n = needs(*scenario);
    auto require = [&](bool need, const char* key, bool optional = false) {
      const bool present = static_cast<bool>(root[key]);
      if (optional) return;
      if (need && !present) r.error(root, std::string("scenario '") + scenario_name(*scenario) + "' needs a '" + key + "' block");
      if (!need && present) r.warn(root[key], std::string("block '") + key + "' is not used by this scenario");
    };
    require(n.scheme, "scheme");
    // A sweep takes its recoil pattern from an optional mode template.
    require(n.mode, "mode", *scenario == Scenario::sweep);
    require(n.species, "species");
    if (c.scheme && n.scheme && c.probe >= c.scheme->couplings().size())
      r.error(root["probe"] ? root["probe"] : root,
              "probe index " + std::to_string(c.probe) + " does not name a coupling of the scheme");
    if (*scenario == Scenario::mc && c.scheme && c.mode && c.mc) {
      try {
        trajectory_config(c).validate();
      } catch (const Error& e) {
        r.error(root["mc"], std::string("mc: ") + e.what());
      }
    }
  }

  if (!r.errors().empty()) {
    std::string msg = std::to_string(r.errors().size()) + " configuration error(s):";
    for (const auto& e : r.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return {std::move(c), std::move(r.warnings())};
}

Loaded load_config(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), options);
}

namespace {

YAML::Emitter& num(YAML::Emitter& e, double v) { return e << csv::format(v); }

}  // namespace

std::string serialize(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "scenario" << YAML::Value << scenario_name(c.scenario);
  e << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << c.output_dir;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  if (c.scheme) {
    e << YAML::Key << "probe" << YAML::Value << c.probe;
    e << YAML::Key << "scheme" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "levels" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : c.scheme->levels()) {
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << l.label;
      e << YAML::Key << "energy_offset" << YAML::Value;
      num(e, l.energy_offset) << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "couplings" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : c.scheme->couplings()) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "lower" << YAML::Value << YAML::DoubleQuoted << f.lower;
      e << YAML::Key << "upper" << YAML::Value << YAML::DoubleQuoted << f.upper;
      e << YAML::Key << "rabi" << YAML::Value;
      num(e, f.rabi);
      e << YAML::Key << "detuning" << YAML::Value;
      num(e, f.detuning);
      e << YAML::Key << "axis_cosine" << YAML::Value;
      num(e, f.axis_cosine) << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "decays" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : c.scheme->decays()) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "from" << YAML::Value << YAML::DoubleQuoted << d.from;
      e << YAML::Key << "to" << YAML::Value << YAML::DoubleQuoted << d.to;
      e << YAML::Key << "rate" << YAML::Value;
      num(e, d.rate) << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
  }
  if (c.mode) {
    e << YAML::Key << "mode" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "frequency" << YAML::Value;
    num(e, c.mode->frequency);
    e << YAML::Key << "lamb_dicke" << YAML::Value;
    num(e, c.mode->lamb_dicke);
    e << YAML::Key << "recoil_alpha" << YAML::Value;
    num(e, c.mode->recoil_alpha) << YAML::EndMap;
  }
  if (c.species) {
    e << YAML::Key << "species" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "mass_amu" << YAML::Value;
    num(e, c.species->mass_amu);
    e << YAML::Key << "wavelength_nm" << YAML::Value;
    num(e, c.species->wavelength_nm) << YAML::EndMap;
  }
  if (c.spectrum) {
    e << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "detuning_min" << YAML::Value;
    num(e, c.spectrum->detuning_min);
    e << YAML::Key << "detuning_max" << YAML::Value;
    num(e, c.spectrum->detuning_max);
    e << YAML::Key << "points" << YAML::Value << c.spectrum->points;
    if (c.spectrum->resonance_window) {
      e << YAML::Key << "resonance_window" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      num(e, c.spectrum->resonance_window->first);
      num(e, c.spectrum->resonance_window->second) << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }
  if (c.cool) {
    e << YAML::Key << "cool" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "initial_n" << YAML::Value;
    num(e, c.cool->initial_n);
    e << YAML::Key << "t_final" << YAML::Value;
    num(e, c.cool->t_final);
    e << YAML::Key << "samples" << YAML::Value << c.cool->samples;
    if (c.cool->n_max) e << YAML::Key << "n_max" << YAML::Value << *c.cool->n_max;
    e << YAML::EndMap;
  }
  if (c.mc) {
    e << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "trajectories" << YAML::Value << c.mc->trajectories;
    e << YAML::Key << "n_max" << YAML::Value << c.mc->n_max;
    e << YAML::Key << "t_final" << YAML::Value;
    num(e, c.mc->t_final);
    e << YAML::Key << "dt" << YAML::Value;
    num(e, c.mc->dt);
    e << YAML::Key << "initial_n" << YAML::Value;
    num(e, c.mc->initial_n);
    e << YAML::Key << "samples" << YAML::Value << c.mc->samples;
    e << YAML::Key << "emission" << YAML::Value
      << (c.mc->emission == trajectory::EmissionPattern::isotropic ? "isotropic" : "fixed");
    e << YAML::EndMap;
  }
  if (c.sweep) {
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "nu_min" << YAML::Value;
    num(e, c.sweep->nu_min);
    e << YAML::Key << "nu_max" << YAML::Value;
    num(e, c.sweep->nu_max);
    e << YAML::Key << "points" << YAML::Value << c.sweep->points << YAML::EndMap;
  }
  if (c.string) {
    e << YAML::Key << "string" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_ions" << YAML::Value << c.string->n_ions;
    e << YAML::Key << "nu_axial" << YAML::Value;
    num(e, c.string->nu_axial);
    e << YAML::Key << "nu_radial" << YAML::Value;
    num(e, c.string->nu_radial);
    if (c.string->gate_wavelength_nm) {
      e << YAML::Key << "gate_wavelength_nm" << YAML::Value;
      num(e, *c.string->gate_wavelength_nm);
    }
    if (!c.string->illuminated.empty()) {
      e << YAML::Key << "illuminated" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (bool b : c.string->illuminated) e << b;
      e << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }
  if (c.thermometry) {
    const auto& t = *c.thermometry;
    e << YAML::Key << "thermometry" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "mbar" << YAML::Value;
    num(e, t.mbar);
    e << YAML::Key << "eta" << YAML::Value;
    num(e, t.eta);
    e << YAML::Key << "omega" << YAML::Value;
    num(e, t.omega);
    e << YAML::Key << "t_start" << YAML::Value;
    num(e, t.t_start);
    e << YAML::Key << "t_stop" << YAML::Value;
    num(e, t.t_stop);
    e << YAML::Key << "points" << YAML::Value << t.points;
    e << YAML::Key << "shots" << YAML::Value << t.shots;
    e << YAML::Key << "decay" << YAML::Value;
    num(e, t.decay);
    e << YAML::Key << "bootstrap" << YAML::Value << t.bootstrap;
    e << YAML::Key << "sideband_shots" << YAML::Value << t.sideband_shots;
    if (t.pulse_time) {
      e << YAML::Key << "pulse_time" << YAML::Value;
      num(e, *t.pulse_time);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const RunConfig& config) {
  const std::string body = serialize(config);
  const std::string blob = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream os;
  for (unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return os.str();
}

trajectory::TrajectoryConfig trajectory_config(const RunConfig& c) {
  if (!c.scheme || !c.mode || !c.mc) throw ConfigError("an mc run needs scheme, mode and mc blocks");
  return {*c.scheme, *c.mode,       c.mc->n_max,   c.mc->t_final, c.mc->dt,
          c.seed,    c.mc->initial_n, c.mc->samples, c.mc->emission};
}

}  // namespace eitcool::config
