#pragma once

#include <span>
#include <utility>

namespace nlspin {

struct PowerLawFit {
  double exponent = 0.0;
  double std_error = 0.0;
  double log_prefactor = 0.0;
};

/// Unweighted least squares of log y on log x. Needs >= 3 points, all
/// strictly positive, and at least two distinct abscissae.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

}  // namespace nlspin
