#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "nlspin/commands.hpp"
#include "nlspin/config.hpp"
#include "nlspin/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> strategy;
  std::optional<std::string> format;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "key = value configuration file");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--out-dir", f.out_dir, "directory for output files");
  sub->add_option("--strategy", f.strategy, "measurement strategy")
      ->check(CLI::IsMember({"aoc", "lte"}));
  sub->add_option("--format", f.format, "output table format")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::string describe(const std::string& name) {
  if (name == "scaling") return "readout variance terms against photon number";
  if (name == "crossover") return "photon number where AOC overtakes LTE";
  if (name == "optimize") return "best detuning and photon number for one strategy";
  if (name == "budget") return "per-detuning couplings, damage and optima";
  if (name == "scan") return "optimum squeezing over optical depth and detuning";
  if (name == "mc-verify") return "sampled vs analytic covariance";
  if (name == "fit-field") return "fit B_z from (j_x, j_y) pairs";
  return "";
}

nlspin::RunConfig resolve(const CommonFlags& f) {
  nlspin::RunConfig config = f.config.empty() ? nlspin::RunConfig{} : nlspin::load_config(f.config);
  if (f.seed) config.run.seed = *f.seed;
  if (f.out_dir) config.run.out_dir = *f.out_dir;
  if (f.strategy) config.run.strategy = nlspin::parse_strategy(f.strategy->c_str());
  if (f.format) config.run.format = nlspin::parse_output_format(*f.format);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlspin: nonlinear Faraday spin-measurement model"};
  app.require_subcommand(1);

  CommonFlags flags;
  nlspin::CommandOptions options;

  for (const auto& name : nlspin::command_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    add_common(sub, flags);
    if (name == "optimize") {
      sub->add_flag("--allow-boundary", options.allow_boundary,
                    "accept an optimum at the edge of the photon range");
    } else if (name == "mc-verify") {
      sub->add_flag("--conditional", options.conditional, "two-pulse conditional variance sweep");
    } else if (name == "fit-field") {
      sub->add_option("--input", options.input, "CSV with j_x and j_y columns")->required();
    }
  }
  auto* show = app.add_subcommand("config", "print the effective configuration");
  add_common(show, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    const nlspin::RunConfig config = resolve(flags);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "config") {
      std::cout << nlspin::dump_config(config);
      return kOk;
    }
    const nlspin::CommandOutput out = nlspin::run_command(name, config, options);
    std::cout << out.stdout_text;
    for (const auto& path : out.files) std::cerr << "wrote " << path.string() << "\n";
    if (!out.failure.empty()) {
      std::cerr << "error: " << out.failure << "\n";
      return kNumerical;
    }
    return kOk;
  } catch (const nlspin::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const nlspin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
