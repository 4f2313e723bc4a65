#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "nlspin/commands.hpp"
#include "nlspin/config.hpp"
#include "nlspin/errors.hpp"
#include "nlspin/magnetometry.hpp"
#include "nlspin/table.hpp"

using namespace nlspin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlspin_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ConfigError::Kind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigError::Kind::parse_error;
}

std::string key_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

// small grids so every command runs quickly
RunConfig quick(const fs::path& out) {
  RunConfig c;
  c.run.out_dir = out.string();
  c.scan.od_points = 4;
  c.scan.detuning_points = 9;
  c.monte_carlo.samples = 5000;
  c.monte_carlo.configs = 3;
  c.detunings.min = -200;
  c.detunings.max = 200;
  return c;
}

}  // namespace

TEST_CASE("empty config gives the working-point defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.experiment.n_atoms == 5.6e5);
  CHECK(c.experiment.detuning_mhz == -600.0);
  CHECK(c.experiment.electronic_noise == 9.2e5);
  CHECK(c.experiment.eta_dep == 0.034);
  CHECK(c.coupling.k_correction == 0.4);
  CHECK(c.run.strategy == Strategy::aoc);
}

TEST_CASE("values, comments and sections") {
  const RunConfig c = parse_config(
      "# probe\n[experiment]\nn_photons = 1e8   ; short pulse\ndetuning_mhz=-300\n\n"
      "[coupling]\nline_offset_1_mhz = 70.0\n[run]\nstrategy = lte\nformat = json\n"
      "lte_ideal = false\ncrossover_mode = full_budget\nseed = 18446744073709551615\n"
      "[scaling]\nkappa1 = 1.47e-7\nkappa2 = none\n");
  CHECK(c.experiment.n_photons == 1e8);
  CHECK(c.experiment.detuning_mhz == -300);
  CHECK(c.coupling.line_offsets_mhz[1] == 70.0);
  CHECK(kappa1(c.coupling, -600) != kappa1(CouplingModel{}, -600));
  CHECK(c.run.strategy == Strategy::lte);
  CHECK(c.run.format == OutputFormat::json);
  CHECK_FALSE(c.run.lte_ideal);
  CHECK(c.run.crossover_mode == CrossoverMode::full_budget);
  CHECK(c.run.seed == std::numeric_limits<std::uint64_t>::max());
  REQUIRE(c.scaling.kappa1.has_value());
  CHECK(*c.scaling.kappa1 == 1.47e-7);
  CHECK_FALSE(c.scaling.kappa2.has_value());
}

TEST_CASE("errors are distinct and name the key") {
  CHECK(kind_of("[experiment]\nn_photons = -1\n") == ConfigError::Kind::constraint);
  CHECK(key_of("[experiment]\nn_photons = -1\n") == "experiment.n_photons");
  CHECK(kind_of("[experiment]\nn_photon = 1\n") == ConfigError::Kind::unknown_key);
  CHECK(key_of("[experiment]\nn_photon = 1\n") == "experiment.n_photon");
  CHECK(kind_of("[experimnt]\n") == ConfigError::Kind::unknown_key);
  CHECK(kind_of("n_atoms = 1\n") == ConfigError::Kind::parse_error);
  CHECK(kind_of("[experiment]\nn_atoms\n") == ConfigError::Kind::parse_error);
  CHECK(kind_of("[experiment]\nn_atoms = lots\n") == ConfigError::Kind::parse_error);
  CHECK(kind_of("[experiment]\nn_atoms = 1\nn_atoms = 2\n") == ConfigError::Kind::parse_error);
  CHECK(kind_of("[run]\nstrategy = both\n") == ConfigError::Kind::parse_error);
  CHECK(kind_of("[coupling]\nk_correction = 0\n") == ConfigError::Kind::constraint);
  CHECK(key_of("[experiment]\neta_dep = 1\n") == "experiment.eta_dep");
  CHECK(key_of("[photons]\ncoarse_points = 50\n") == "photons.coarse_points");
  CHECK(key_of("[detuning]\nfine_step_mhz = 2\n") == "detuning.fine_step_mhz");
  CHECK_THROWS_AS(load_config("/nonexistent/nlspin.cfg"), ConfigError);
  try {
    load_config("/nonexistent/nlspin.cfg");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::missing_file);
  }
}

TEST_CASE("config round trip") {
  RunConfig c = parse_config("[experiment]\nn_photons = 123456789.125\n[scaling]\nkappa1 = 1.1e-7\n");
  c.coupling.wavelength_m = 0.1 + 0.2;  // not exactly representable in short decimal
  const std::string once = dump_config(c);
  const std::string twice = dump_config(parse_config(once));
  CHECK(once == twice);
  CHECK(parse_config(once).coupling.wavelength_m == c.coupling.wavelength_m);
  CHECK(dump_config(parse_config("")) == dump_config(RunConfig{}));
}

TEST_CASE("table csv round trip is bit exact") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1e10, 1e10);
  Table t{{"a", "b", "c"}, {}};
  for (int i = 0; i < 200; ++i) t.rows.push_back({u(rng), u(rng) * 1e-20, 1.0 / (i + 1)});
  t.rows.push_back({std::nan(""), INFINITY, -0.0});
  const Table back = parse_csv(to_csv(t));
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(back.rows[i][j] == t.rows[i][j]);
  }
  CHECK(std::isnan(back.rows.back()[0]));
  CHECK(std::isinf(back.rows.back()[1]));
  CHECK(to_csv(t).find('\r') == std::string::npos);
}

TEST_CASE("table edge cases") {
  const Table empty{{"x", "y"}, {}};
  CHECK(to_csv(empty) == "x,y\n");
  CHECK(to_json(Table{{"x"}, {{std::nan("")}}}).find("null") != std::string::npos);
  CHECK_THROWS_AS(to_csv(Table{{"x"}, {{1.0, 2.0}}}), ValidationError);
  CHECK_THROWS_AS(write_text("/proc/nlspin/forbidden.csv", "x"), IoError);
  CHECK_THROWS_AS(parse_output_format("xml"), ValidationError);
}

TEST_CASE("json mirror") {
  const fs::path dir = scratch("mirror");
  emit_table(Table{{"x"}, {{1.5}}}, dir / "t.csv", OutputFormat::csv, true);
  CHECK(fs::exists(dir / "t.csv"));
  CHECK(slurp(dir / "t.json").find("1.5") != std::string::npos);
}

TEST_CASE("scaling table of 50 points has 51 lines") {
  const fs::path dir = scratch("scaling");
  const auto out = run_command("scaling", quick(dir));
  REQUIRE(out.files.size() == 1);
  const std::string text = slurp(out.files[0]);
  CHECK(std::count(text.begin(), text.end(), '\n') == 51);
}

TEST_CASE("every command is byte-identical across runs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const fs::path input = scratch("det_in") / "pairs.csv";
  Table pairs{{"j_x", "j_y"}, {}};
  for (double jx : {0.5e5, 1e5, 2e5, 2.8e5}) {
    FieldScenario s;
    s.b_z_tesla = 1.03e-7;
    s.j_x = jx;
    pairs.rows.push_back({jx, larmor_jy(s) + 0.01 * jx});
  }
  write_text(input, to_csv(pairs));

  for (const auto& name : command_names()) {
    for (bool conditional : {false, true}) {
      if (conditional && name != "mc-verify") continue;
      CommandOptions opt;
      opt.conditional = conditional;
      opt.allow_boundary = true;
      opt.input = input;
      const auto ra = run_command(name, quick(a), opt);
      const auto rb = run_command(name, quick(b), opt);
      CHECK(ra.stdout_text == rb.stdout_text);
      REQUIRE(ra.files.size() == rb.files.size());
      for (std::size_t i = 0; i < ra.files.size(); ++i) {
        INFO(name << " " << ra.files[i].filename().string());
        CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
      }
    }
  }
}

TEST_CASE("seed changes sampled output only") {
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  RunConfig ca = quick(a), cb = quick(b);
  cb.run.seed = ca.run.seed + 1;
  CHECK(slurp(run_command("mc-verify", ca).files[0]) != slurp(run_command("mc-verify", cb).files[0]));
  CHECK(slurp(run_command("scaling", ca).files[0]) == slurp(run_command("scaling", cb).files[0]));
}

TEST_CASE("boundary optimum is reported as a failure") {
  RunConfig c = quick(scratch("boundary"));
  c.detunings.min = c.detunings.max = -59.0;
  c.photons.max = 1e6;  // true optimum near 6e6
  const auto out = run_command("optimize", c);
  CHECK_FALSE(out.failure.empty());
  CommandOptions allow;
  allow.allow_boundary = true;
  CHECK(run_command("optimize", c, allow).failure.empty());
}

TEST_CASE("fit-field command") {
  const fs::path dir = scratch("field");
  Table pairs{{"j_y", "j_x"}, {}};
  for (double jx : {1e5, 2e5, 3e5}) {
    FieldScenario s;
    s.b_z_tesla = 1.03e-7;
    s.j_x = jx;
    pairs.rows.push_back({larmor_jy(s), jx});
  }
  write_text(dir / "in.csv", to_csv(pairs));
  RunConfig c = quick(dir);
  CommandOptions opt;
  opt.input = dir / "in.csv";
  const auto out = run_command("fit-field", c, opt);
  const Table t = read_csv(out.files[0]);
  CHECK(t.rows[0][0] == doctest::Approx(1.03e-7).epsilon(1e-10));
  opt.input = dir / "missing.csv";
  CHECK_THROWS_AS(run_command("fit-field", c, opt), IoError);
  CHECK_THROWS_AS(run_command("fit-field", c, {}), ValidationError);
  CHECK_THROWS_AS(run_command("plot", c), ValidationError);
}

TEST_CASE("spacing helpers") {
  const auto g = log_space(1e7, 2e8, 10);
  CHECK(g.front() == 1e7);
  CHECK(g.back() == 2e8);
  CHECK(g[1] / g[0] == doctest::Approx(g[9] / g[8]));
  CHECK(lin_space(-1, 1, 3)[1] == 0.0);
  CHECK_THROWS_AS(log_space(0, 1, 3), ValidationError);
}
