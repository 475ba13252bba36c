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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "eitcool/config.hpp"
#include "eitcool/error.hpp"
#include "eitcool/runner.hpp"

using namespace eitcool;
using namespace eitcool::config;
namespace fs = std::filesystem;

namespace {

const char* kSpectrum = R"(scenario: spectrum
seed: 3
scheme:
  levels: [g, r, e]
  couplings:
    - {lower: g, upper: e, rabi: 0.05, detuning: 2.5}
    - {lower: r, upper: e, rabi: 1.0, detuning: 2.5, axis_cosine: 0}
  decays:
    - {from: e, to: g, rate: 0.5}
    - {from: e, to: r, rate: 0.5}
spectrum:
  detuning_min: -5
  detuning_max: 5
  points: 41
)";

const char* kSmallMc = R"(scenario: mc
seed: 5
scheme:
  levels: [g, e]
  couplings:
    - {lower: g, upper: e, rabi: 0.3, detuning: -2}
  decays:
    - {from: e, to: g, rate: 1}
mode:
  frequency: 2
  lamb_dicke: 0.3
mc:
  trajectories: 4
  n_max: 20
  initial_n: 1
  t_final: 40
  dt: 0.5
  samples: 41
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eitcool_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + std::string(EITCOOL_CLI) + "' " + args + " >stdout.txt 2>stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("bundled configurations load and round-trip through serialize") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(EITCOOL_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    ++seen;
    CAPTURE(entry.path().string());
    const Loaded a = load_config(entry.path());
    CHECK(a.warnings.empty());
    const Loaded b = parse_config(serialize(a.config));
    CHECK(b.config == a.config);
    CHECK(config_hash(b.config) == config_hash(a.config));
  }
  CHECK(seen >= 8);
}

TEST_CASE("string scenario file carries the Zeeman Lambda parameters") {
  const RunConfig c = load_config(fs::path(EITCOOL_CONFIG_DIR) / "calcium_string.yaml").config;
  REQUIRE(c.scheme.has_value());
  const auto& f = c.scheme->couplings();
  CHECK(f[0].rabi == 0.5);
  CHECK(f[1].rabi == 30.0);
  CHECK(f[0].detuning == 75.0);
  CHECK(c.scheme->linewidth("e") == doctest::Approx(20.0));
  CHECK(c.string->n_ions == 10);
  CHECK(c.string->nu_axial == 0.7);
}

TEST_CASE("config_hash is a git blob id of the canonical form") {
  const RunConfig c = parse_config(kSpectrum).config;
  const std::string h = config_hash(c);
  CHECK(h.size() == 40);
  RunConfig d = c;
  d.seed = 4;
  CHECK(config_hash(d) != h);
}

TEST_CASE("zero trap frequency is a configuration error") {
  std::string text = kSmallMc;
  text.replace(text.find("frequency: 2"), 12, "frequency: 0");
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("mode"), ConfigError);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_config("scenario: spectrum\nspectrum: {detuning_min: -1, detuning_max: 1, points: [}\n", "bad.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.yaml:2:") != std::string::npos);
  }
}

TEST_CASE("every violation is listed at once") {
  std::string text = kSpectrum;
  text.replace(text.find("points: 41"), 10, "points: -3");
  text += "colour: blue\n";
  try {
    parse_config(text, "two.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("2 configuration error(s)") != std::string::npos);
    CHECK(what.find("spectrum.points") != std::string::npos);
    CHECK(what.find("colour") != std::string::npos);
  }
}

TEST_CASE("unknown keys: errors when strict, warnings otherwise") {
  const std::string text = std::string(kSpectrum) + "colour: blue\n";
  CHECK_THROWS_AS(parse_config(text), ConfigError);
  const Loaded lax = parse_config(text, "<string>", {false});
  REQUIRE(lax.warnings.size() == 1);
  CHECK(lax.warnings[0].find("colour") != std::string::npos);
}

TEST_CASE("scenario block bookkeeping") {
  CHECK_THROWS_WITH_AS(parse_config("scenario: cool\n"), doctest::Contains("needs a 'cool' block"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("scenario: warp\n"), doctest::Contains("is not one of"), ConfigError);
  std::string text = kSpectrum;
  text.replace(text.find("scenario: spectrum"), 18, "scenario: mc");
  CHECK_THROWS_AS(parse_config(text), ConfigError);
}

TEST_CASE("mc block is checked against the trajectory invariants") {
  std::string text = kSmallMc;
  text.replace(text.find("n_max: 20"), 9, "n_max: 6");
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("n_max"), ConfigError);
}

TEST_CASE("runner writes its outputs and metadata") {
  const fs::path out = scratch("runner");
  RunConfig c = parse_config(kSpectrum).config;
  runner::RunOptions o;
  o.output_dir = out / "spec";
  std::vector<std::string> warnings;
  const auto r = runner::run(c, o, warnings);
  CHECK(fs::exists(out / "spec" / "spectrum.csv"));
  CHECK(fs::exists(out / "spec" / "metadata.json"));
  const std::string meta = slurp(out / "spec" / "metadata.json");
  CHECK(meta.find(config_hash(c)) != std::string::npos);
  CHECK(meta.find("\"seed\": 3") != std::string::npos);
  CHECK(r.files.size() == 2);
}

TEST_CASE("exit codes follow the error category") {
  CHECK(runner::exit_code(std::make_exception_ptr(ConfigError("x"))) == 2);
  CHECK(runner::exit_code(std::make_exception_ptr(DomainError("x"))) == 3);
  CHECK(runner::exit_code(std::make_exception_ptr(NetHeatingError(2.0, 1.0))) == 3);
  CHECK(runner::exit_code(std::make_exception_ptr(NumericalError("x"))) == 4);
  CHECK(runner::exit_code(std::make_exception_ptr(std::runtime_error("x"))) == 1);
  CHECK(runner::describe(std::make_exception_ptr(NumericalError("boom"))) == "error category=numerical exit=4: boom");
}

TEST_CASE("CLI: deterministic outputs confined to the output directory") {
  const fs::path work = scratch("cli");
  {
    std::ofstream(work / "mc.yaml") << kSmallMc;
  }
  REQUIRE(run_cli("mc.yaml --out a", work) == 0);
  REQUIRE(run_cli("mc.yaml --out b", work) == 0);
  for (const char* f : {"mean_n_mc.csv", "steady_pn.csv", "rates.csv", "mean_n_rate.csv"})
    CHECK(slurp(work / "a" / f) == slurp(work / "b" / f));
  std::set<std::string> top;
  for (const auto& e : fs::directory_iterator(work)) top.insert(e.path().filename().string());
  CHECK(top == std::set<std::string>{"a", "b", "mc.yaml", "stdout.txt", "stderr.txt"});
  REQUIRE(run_cli("mc.yaml --out c --seed 6", work) == 0);
  CHECK(slurp(work / "a" / "mean_n_mc.csv") != slurp(work / "c" / "mean_n_mc.csv"));
}

TEST_CASE("CLI: exit codes") {
  const fs::path work = scratch("cli_codes");
  {
    std::ofstream(work / "bad.yaml") << "scenario: spectrum\n";
    std::string heat = kSmallMc;
    heat.replace(heat.find("scenario: mc"), 12, "scenario: cool");
    heat.replace(heat.find("detuning: -2"), 12, "detuning: 2");
    heat.replace(heat.find("mc:"), 3, "cool:");
    heat.replace(heat.find("  trajectories: 4\n"), 18, "");
    heat.replace(heat.find("  dt: 0.5\n"), 10, "");
    std::ofstream(work / "heat.yaml") << heat;
  }
  CHECK(run_cli("bad.yaml --out x", work) == 2);
  CHECK(slurp(work / "stderr.txt").find("category=config") != std::string::npos);
  CHECK(run_cli("missing.yaml --out x", work) == 2);
  CHECK(run_cli("--bogus", work) == 2);
  CHECK(run_cli("heat.yaml --out h", work) == 3);
  CHECK(slurp(work / "stderr.txt").find("net heating") != std::string::npos);
  CHECK(run_cli("--version", work) == 0);
}
