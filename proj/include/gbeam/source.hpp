#pragma once

#include <optional>

#include "gbeam/beam.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

// Source geometry on the fixed hypersurface Sigma = {rho(x) = x1 = 0}.
// Points z live in Sigma coordinates (d-1 components); embed(z) = (0, z).
// The weight h is a standard bump supported on |z - h_center| < h_radius.
struct SourceSpec {
  Vec z_lo, z_hi;        // compact box in Sigma coordinates
  double h_radius = 0.4;
  Vec h_center;          // defaults to the box center
  double k = 1.0;

  Vec center() const { return h_center.size() ? h_center : Vec(0.5 * (z_lo + z_hi)); }
  double weight(const Vec& z) const;
  int surface_dim() const { return static_cast<int>(z_lo.size()); }
};

SourceSpec make_source_spec(const Vec& z_lo, const Vec& z_hi, double h_radius, double k);

inline Vec embed_surface_point(const Vec& z) {
  Vec x(z.size() + 1);
  x[0] = 0.0;
  x.tail(z.size()) = z;
  return x;
}

// Matched beams u+ (supported on x1 >= 0) and u- (x1 <= 0) whose jump across
// Sigma realizes the Gaussian surface source. Launch data at z:
//   p0(+-) = +-n(z) e1,  M0(+-) = (+-)S0 + iP,
// with P the projector onto e1^perp and S0 the unique symmetric matrix with
// S0 p0 = p'(0)/2 and vanishing tangential block, so that both beams satisfy
// the admissibility conditions, the tangential blocks equal i I on T Sigma
// (trace e^{-k|y|^2/2} on Sigma) and phases/amplitudes match at z.
struct BeamPair {
  BeamData forward;
  BeamData backward;
  Vec z;        // Sigma coordinates
  Vec z_point;  // embedded launch point

  // u_GB = u+ on {x1 >= 0}, u- on {x1 < 0}.
  cplx eval(const Vec& x, double k) const;
  // f_GB with the same side convention.
  cplx residual(const Vec& x, double k) const;
};

// The second-fundamental-form completion used for M0.
Mat normal_hessian_completion(const Vec& p0, const Vec& b);

BeamPair build_beam_pair(const MediumModel& m, const Vec& z, const SourceSpec& spec,
                         double alpha, double eta = -1.0, double step = 1e-3,
                         double r_stop = -1.0);

// g0(x) = [ik (d_nu phi+ - d_nu phi-) A + (d_nu A+ - d_nu A-)] e^{ik phi+} for
// x on Sigma inside both tubes; nullopt (Outside) otherwise. The A-derivatives
// are one-sided derivatives of the s-dependent amplitude.
std::optional<cplx> eval_source_amplitude(const BeamPair& pair, const Vec& x, double k);

// The two bracket pieces and the shared phase, for tests and diagnostics.
struct SourceBracket {
  cplx dphi_jump;  // d_nu phi+ - d_nu phi-
  cplx dA_jump;    // d_nu A+ - d_nu A-
  cplx amplitude;  // A on Sigma
  cplx phi_plus;
};
std::optional<SourceBracket> source_bracket(const BeamPair& pair, const Vec& x);

}  // namespace gbeam
