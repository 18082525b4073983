#pragma once

#include <optional>
#include <string>

#include "gbeam/raytrace.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

// First-order Gaussian beam data along one ray: phase S(s) on the ray,
// complex symmetric Hessian M(s) through the (B,C) frame, amplitude A0(s)
// by the determinant identity A0 = (det B(0)/det B(s))^{1/2} (branch
// continued) times exp(-alpha * int n^2), and a tube radius eta.
// Beam data is k-independent; k enters only at evaluation time.
struct BeamData {
  MediumModel medium;
  Bicharacteristic ray;
  VariationalFrame frame;
  Vec S;            // phase on the ray, aligned with ray.s_grid, S(0) = 0
  Vec n2_integral;  // int_0^s n^2(x(tau)) dtau
  CVec sqrt_part;   // branch-tracked (det B0 / det B(s))^{1/2}
  CVec A0;          // sqrt_part * exp(-alpha*n2_integral)
  double alpha = 0.0;
  double eta = 0.3;
  Vec aabb_lo, aabb_hi;  // tube bounding box (built for the construction-time eta)

  double phase_on_ray(double s) const;
  double n2_integral_at(double s) const;
  cplx amplitude_on_ray(double s) const;
  CMat hessian_on_ray(double s) const { return frame.M_dense(ray, s); }
};

struct Projection {
  double s = 0.0;
  Vec foot;        // x(s)
  Vec transverse;  // y = x - x(s)
  double dist = 0.0;
};

// Closest-point parameter with (x - x(s)) . x'(s) = 0 and |x - x(s)| <= eta.
// Coarse scan over the sample grid followed by Newton iteration. Returns
// nullopt (Outside) when the distance exceeds eta or the foot falls past the
// integrated span; throws AmbiguousProjection when two local minima within
// the tube differ by < 1e-8 in distance.
std::optional<Projection> project_to_ray(const BeamData& beam, const Vec& x);

struct BeamValue {
  cplx value{0.0, 0.0};
  cplx phase{0.0, 0.0};
  cplx amplitude{0.0, 0.0};
  double s_proj = 0.0;
  Vec transverse;
  bool inside = false;
};

// phi(x) = S(s) + p(s).y + y.M(s)y/2 with s the projection parameter;
// value = A0(s) e^{ik phi} rho_eta(|y|); zero outside the tube.
BeamValue eval_beam(const BeamData& beam, const Vec& x, double k);

// Analytic first derivatives at x: grad phi and grad a0 via the implicit
// function theorem applied to the projection condition.
struct PhaseGradient {
  cplx phi;
  CVec grad_phi;
  cplx a0;
  CVec grad_a0;
  double s = 0.0;
  Vec transverse;
};
std::optional<PhaseGradient> phase_gradient(const BeamData& beam, const Vec& x);

struct ResidualCoefficients {
  cplx c_minus2;  // (n^2 - grad phi . grad phi) a0
  cplx c_minus1;  // i alpha n^2 a0 + a0 lap(phi) + 2 grad a0 . grad phi
  cplx c_0;       // lap(a0)
};

// Laplacians come from central differences (step kResidualFdStep) of the
// analytic first derivatives.
inline constexpr double kResidualFdStep = 1e-5;
std::optional<ResidualCoefficients> residual_coefficients(const BeamData& beam, const Vec& x);

// f_GB(x) = e^{ik phi}(k^2 c_{-2} + k c_{-1} + c_0) rho_eta(|y|); zero outside.
cplx eval_residual_field(const BeamData& beam, const Vec& x, double k);

// Admissibility check for Eq. beam data: M0 symmetric, M0 x'(0) = p'(0),
// Im M0 positive definite on x'(0)^perp. Throws BadInitialHessian.
void check_initial_hessian(const MediumModel& m, const Vec& x0, const Vec& p0, const CMat& M0,
                           double tol = 1e-10);

BeamData build_first_order_beam(const MediumModel& m, const Vec& x0, const Vec& p0,
                                const CMat& M0, double alpha, double s_lo, double s_hi,
                                double step, double eta = -1.0);

// As above but integrates until |x(s)| >= r_stop.
BeamData build_beam_to_radius(const MediumModel& m, const Vec& x0, const Vec& p0, const CMat& M0,
                              double alpha, double r_stop, double s_back, double step,
                              double eta = -1.0);

// Halves eta (down to eta_min) until tube sampling sees no AmbiguousProjection
// and a positive phase-positivity constant. Returns the fitted delta.
double auto_tube_radius(BeamData& beam, int samples = 400, double eta_min = 1e-3);

// min over samples of Im phi / |x - x(s)|^2 (the Eq. phase-positivity constant).
double phase_positivity_constant(const BeamData& beam, int samples,
                                 std::uint64_t seed = kDefaultProbeSeed,
                                 double s_lo = 0.0, double s_hi = -1.0);

void write_beam_csv(const BeamData& beam, const std::string& path,
                    const std::string& header_comment = "");

}  // namespace gbeam
