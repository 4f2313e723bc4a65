#include "nlspin/experiment.hpp"

#include <cmath>
#include <string>

#include "nlspin/errors.hpp"

namespace nlspin {

const char* to_string(Strategy strategy) {
  return strategy == Strategy::aoc ? "aoc" : "lte";
}

Strategy parse_strategy(const char* text) {
  const std::string s(text);
  if (s == "aoc" || s == "AOC") return Strategy::aoc;
  if (s == "lte" || s == "LTE") return Strategy::lte;
  throw ValidationError("strategy must be 'aoc' or 'lte', got '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("experiment: ") + what);
  };
  require(std::isfinite(n_atoms) && n_atoms > 0.0, "n_atoms must be > 0");
  require(std::isfinite(n_photons) && n_photons >= 0.0, "n_photons must be >= 0");
  require(std::isfinite(detuning_mhz), "detuning_mhz must be finite");
  require(std::isfinite(electronic_noise) && electronic_noise >= 0.0,
          "electronic_noise must be >= 0");
  require(eta_dep >= 0.0 && eta_dep < 1.0, "eta_dep must lie in [0, 1)");
  require(std::isfinite(j_y_mean) && std::isfinite(j_z_mean), "spin means must be finite");
}

}  // namespace nlspin
