#pragma once

#include <cmath>

namespace gbeam {

// C^infty transition built from the exp(-1/t) mollifier:
// smooth_step(t) = 0 for t<=0, 1 for t>=1.
inline double psi_bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = psi_bump(t), b = psi_bump(1.0 - t);
  return a / (a + b);
}

// Value and first two derivatives of smooth_step.
inline void smooth_step_derivs(double t, double& s, double& s1, double& s2) {
  if (t <= 0.0) { s = 0.0; s1 = 0.0; s2 = 0.0; return; }
  if (t >= 1.0) { s = 1.0; s1 = 0.0; s2 = 0.0; return; }
  const double u = 1.0 - t;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / u);
  const double a1 = a / (t * t);
  const double b1 = b / (u * u);
  const double a2 = a * (1.0 / (t * t * t * t) - 2.0 / (t * t * t));
  const double b2 = b * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
  const double D = a + b;
  const double D1 = a1 - b1;
  const double D2 = a2 + b2;
  s = a / D;
  s1 = a1 / D - a * D1 / (D * D);
  s2 = a2 / D - (2.0 * a1 * D1 + a * D2) / (D * D) + 2.0 * a * D1 * D1 / (D * D * D);
}

// Plateau cutoff: 1 on [0,1/2], 0 on [1,inf), smooth in between.
// Used for the medium's compact-support factor and the tube cutoff.
inline double plateau_cutoff(double u) { return smooth_step(2.0 * (1.0 - u)); }

inline void plateau_cutoff_derivs(double u, double& c, double& c1, double& c2) {
  double s, s1, s2;
  smooth_step_derivs(2.0 * (1.0 - u), s, s1, s2);
  c = s;
  c1 = -2.0 * s1;
  c2 = 4.0 * s2;
}

// Standard bump profile on (-1,1), value 1 at 0, vanishing to all orders at +-1.
inline double bump_profile(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

}  // namespace gbeam
