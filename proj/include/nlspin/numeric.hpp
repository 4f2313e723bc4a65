#pragma once

#include <cmath>
#include <utility>

namespace nlspin {

/// Golden-section search for a minimum of f on [lo, hi]; stops when the
/// bracket is narrower than abs_tolerance. Returns (x, f(x)).
template <typename F>
std::pair<double, double> golden_section_minimize(F&& f, double lo, double hi,
                                                  double abs_tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > abs_tolerance) {
    // <= keeps the left sub-bracket on ties.
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace nlspin
