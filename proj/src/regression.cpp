#include "nlspin/regression.hpp"

#include <cmath>

#include "nlspin/errors.hpp"

namespace nlspin {

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ValidationError("power-law fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw ValidationError("power-law fit needs strictly positive finite values");
    }
    mean_x += std::log(x);
    mean_y += std::log(y);
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - mean_y);
  }
  if (sxx == 0.0) throw ValidationError("power-law fit: all abscissae are equal");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = mean_y - fit.exponent * mean_x;
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - (fit.log_prefactor + fit.exponent * std::log(x));
    ssr += r * r;
  }
  fit.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

}  // namespace nlspin
