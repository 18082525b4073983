#pragma once

#include <string>
#include <vector>

#include "gbeam/medium.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

// |H(x_i,p_i) - H0| <= kHamiltonianDriftTol * (1 + |H0|) along every trajectory.
inline constexpr double kHamiltonianDriftTol = 1e-9;
inline constexpr double kSingularFrameTol = 1e-12;

inline double hamiltonian(const MediumModel& m, const Vec& x, const Vec& p) {
  return p.squaredNorm() - eval_n2(m, x);
}

// Sampled solution of x' = 2p, p' = +grad n^2(x), the Hamiltonian flow of
// H = |p|^2 - n^2. Data is given at s = 0; the grid covers [s_lo, s_hi] with
// uniform steps on each side of the origin. Dense output between samples is
// cubic Hermite using x' = 2p and p' = grad n^2(x).
struct Bicharacteristic {
  MediumModel medium;
  std::vector<double> s_grid;
  std::vector<Vec> x;
  std::vector<Vec> p;
  double H0 = 0.0;
  int origin = 0;  // index of s = 0
  Vec z;           // launch point x(0)

  int size() const { return static_cast<int>(s_grid.size()); }
  double s_front() const { return s_grid.front(); }
  double s_back() const { return s_grid.back(); }

  // Bracketing interval index for dense output (clamped to the grid).
  int interval_of(double s) const;

  Vec position(double s) const;
  Vec momentum(double s) const;
  Vec velocity(double s) const { return 2.0 * momentum(s); }       // x'(s)
  Vec acceleration(double s) const;                                // x''(s) = 2 p'(s)
  double max_hamiltonian_drift() const;
};

// Fixed-step classical 4th-order integration over [s_lo, s_hi] (s_lo <= 0 <= s_hi).
// Throws StepTooLarge when the Hamiltonian drift tolerance is violated; the
// caller is expected to refine (see integrate_with_refinement).
// Precondition: H(x0,p0) = 0 up to 1e-8 (beam data has |p0| = n(x0)).
Bicharacteristic integrate_bicharacteristic(const MediumModel& m, const Vec& x0, const Vec& p0,
                                            double s_lo, double s_hi, double step);

// Halves the step (up to max_halvings) until the drift tolerance holds.
Bicharacteristic integrate_with_refinement(const MediumModel& m, const Vec& x0, const Vec& p0,
                                           double s_lo, double s_hi, double step,
                                           int max_halvings = 10);

// Extends s_hi in chunks until |x(s)| >= r_stop (throws TrajectoryFailure if the
// ray has not escaped by s_cap).
Bicharacteristic integrate_to_radius(const MediumModel& m, const Vec& x0, const Vec& p0,
                                     double s_lo, double r_stop, double step,
                                     double s_cap = 1e3);

// Linearized flow B' = 2C, C' = D^2(n^2)(x(s)) B along a ray; M(s) = C(s)B(s)^-1
// then solves the Riccati equation M' = D^2(n^2) - 2M^2 without blow-up at
// caustics. Integrated with the same steps as the ray so samples align.
struct VariationalFrame {
  std::vector<CMat> B;
  std::vector<CMat> C;

  CMat M_at(int i) const;

  // Dense output (cubic Hermite on B and C, then M = C B^-1).
  CMat B_dense(const Bicharacteristic& ray, double s) const;
  CMat C_dense(const Bicharacteristic& ray, double s) const;
  CMat M_dense(const Bicharacteristic& ray, double s) const;
};

// Throws SingularFrame if |det B| < kSingularFrameTol at any sample.
// Precondition: B0 invertible; M0 = C0 B0^-1 admissible beam data.
VariationalFrame integrate_variational(const MediumModel& m, const Bicharacteristic& ray,
                                       const CMat& B0, const CMat& C0);

// CSV dump: s, x1..xd, p1..pd, H (one row per sample).
void write_ray_csv(const Bicharacteristic& ray, const std::string& path,
                   const std::string& header_comment = "");

}  // namespace gbeam
