#pragma once

// Straight transcriptions of the closed-form model, kept apart from the
// library so tests compare two independent codings.

#include <cmath>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

struct Lines {
  double gamma = 6.1;
  double off[3] = {0.0, 72.218, 229.165};
  double lambda = 780.241e-9;
  double area = 4.1e-9;
  double k = 0.4;
};

inline double d(const Lines& l, double det, int i) {
  const double x = det - l.off[i];
  return 1.0 / std::sqrt(l.gamma * l.gamma + x * x);
}

inline double pref(const Lines& l) { return l.lambda * l.lambda / kPi / l.area; }

inline double kappa1(const Lines& l, double det) {
  return pref(l) * l.gamma / 16.0 * (-4.0 * d(l, det, 0) - 5.0 * d(l, det, 1) + 5.0 * d(l, det, 2));
}

inline double kappa2(const Lines& l, double det) {
  return pref(l) * l.gamma / 16.0 * (4.0 * d(l, det, 0) - 5.0 * d(l, det, 1) + d(l, det, 2));
}

inline double eta_gamma(const Lines& l, double det) {
  const double a = d(l, det, 0), b = d(l, det, 1), c = d(l, det, 2);
  return pref(l) * l.gamma * l.gamma / 64.0 * (4.0 * a * a + 5.0 * b * b + 7.0 * c * c);
}

inline double zeta_lte(double k1, double nl, double na) { return k1 * k1 * nl * na / 4.0; }
inline double zeta_aoc(double k1, double k2, double nl, double na) {
  return zeta_lte(k1, nl, na) * (1.0 + k2 * k2 * nl * nl / 16.0);
}
inline double xi2(double zeta, double eta) { return 1.0 / (1.0 + zeta) + 2.0 * eta; }
inline double xi2_m(double zeta, double eta) {
  return xi2(zeta, eta) / ((1.0 - eta) * (1.0 - eta));
}

inline double var_aoc(double k1, double k2, double nl, double na, double en) {
  const double p = k1 * k1 * k2 * k2;
  return 16.0 / (p * nl * nl * nl) + 4.0 * na / (k2 * k2 * nl * nl) + 64.0 * en / (p * nl * nl * nl * nl);
}
inline double var_lte_ideal(double k2, double nl) { return 1.0 / (k2 * k2 * nl); }

// Output covariance of (S_y', S_z', J_y, J_z) for a coherent input, entry by entry.
struct PulseCov {
  double c[4][4];
};

inline PulseCov pulse_cov(double k1, double k2, double nl, double na) {
  const double sx = nl / 2.0, jx = na / 2.0;
  const double vs = nl / 4.0, vj = na / 4.0;
  const double a = k1 * sx;              // S_y' <- J_z
  const double b = 0.5 * k1 * k2 * sx * sx;  // S_y' <- J_y
  const double c = k2 * jx;              // S_z' <- S_y
  const double e = -k2 * sx;             // S_z' <- J_y
  PulseCov p{};
  p.c[0][0] = vs + a * a * vj + b * b * vj;
  p.c[1][1] = vs + c * c * vs + e * e * vj;
  p.c[0][1] = c * vs + b * e * vj;
  p.c[0][2] = b * vj;
  p.c[0][3] = a * vj;
  p.c[1][2] = e * vj;
  p.c[1][3] = 0.0;
  p.c[2][2] = vj;
  p.c[3][3] = vj;
  p.c[2][3] = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) p.c[i][j] = p.c[j][i];
  return p;
}

}  // namespace oracle
