#include "gbeam/source.hpp"

#include <cmath>

#include "gbeam/errors.hpp"
#include "gbeam/mollifier.hpp"

namespace gbeam {

double SourceSpec::weight(const Vec& z) const {
  const Vec c = center();
  return bump_profile((z - c).norm() / h_radius);
}

SourceSpec make_source_spec(const Vec& z_lo, const Vec& z_hi, double h_radius, double k) {
  if (z_lo.size() != z_hi.size() || z_lo.size() < 1)
    throw SchemaError("source: z_domain bounds must have matching nonzero size");
  for (int i = 0; i < z_lo.size(); ++i)
    if (!(z_lo[i] < z_hi[i])) throw SchemaError("source: z_domain must have positive extent");
  if (!(h_radius > 0.0)) throw SchemaError("source: h radius must be positive");
  if (!(k > 0.0)) throw SchemaError("source: k must be positive");
  SourceSpec s;
  s.z_lo = z_lo;
  s.z_hi = z_hi;
  s.h_radius = h_radius;
  s.k = k;
  return s;
}

Mat normal_hessian_completion(const Vec& p0, const Vec& b) {
  const double q2 = p0.squaredNorm();
  return (b * p0.transpose() + p0 * b.transpose()) / q2 -
         (p0.dot(b) / (q2 * q2)) * (p0 * p0.transpose());
}

BeamPair build_beam_pair(const MediumModel& m, const Vec& z, const SourceSpec& spec,
                         double alpha, double eta, double step, double r_stop) {
  const int d = m.dim;
  if (z.size() != d - 1) throw SchemaError("build_beam_pair: z must have d-1 components");
  for (int i = 0; i < z.size(); ++i)
    if (z[i] < spec.z_lo[i] - 1e-12 || z[i] > spec.z_hi[i] + 1e-12)
      throw SchemaError("build_beam_pair: z outside z_domain");
  const Vec x0 = embed_surface_point(z);
  const double n0 = eval_n(m, x0);
  Vec nu = Vec::Zero(d);
  nu[0] = 1.0;

  const Vec p_fwd = n0 * nu;
  const Vec b = 0.5 * eval_medium(m, x0).grad_n2;
  const Mat S0 = normal_hessian_completion(p_fwd, b);
  const Mat P = Mat::Identity(d, d) - nu * nu.transpose();
  const CMat M0_fwd = S0.cast<cplx>() + iu * P.cast<cplx>();
  const CMat M0_bwd = -S0.cast<cplx>() + iu * P.cast<cplx>();

  if (r_stop <= 0.0) r_stop = 5.0 * m.support_radius + 2.0 * (eta > 0 ? eta : 0.3 * m.support_radius);
  const double s_back = 0.75 * (eta > 0 ? eta : 0.3 * m.support_radius) / n0;

  BeamPair pair;
  pair.z = z;
  pair.z_point = x0;
  pair.forward = build_beam_to_radius(m, x0, p_fwd, M0_fwd, alpha, r_stop, s_back, step, eta);
  pair.backward = build_beam_to_radius(m, x0, -p_fwd, M0_bwd, alpha, r_stop, s_back, step, eta);
  return pair;
}

cplx BeamPair::eval(const Vec& x, double k) const {
  return x[0] >= 0.0 ? eval_beam(forward, x, k).value : eval_beam(backward, x, k).value;
}

cplx BeamPair::residual(const Vec& x, double k) const {
  return x[0] >= 0.0 ? eval_residual_field(forward, x, k) : eval_residual_field(backward, x, k);
}

std::optional<SourceBracket> source_bracket(const BeamPair& pair, const Vec& x) {
  if (std::abs(x[0]) > 1e-12) throw OnSourcePlane("source_bracket: x must lie on Sigma (x1 = 0)");
  const auto pg_f = phase_gradient(pair.forward, x);
  if (!pg_f) return std::nullopt;
  const auto pg_b = phase_gradient(pair.backward, x);
  if (!pg_b) return std::nullopt;

  SourceBracket sb;
  sb.phi_plus = pg_f->phi;
  sb.amplitude = pg_f->a0;
  sb.dphi_jump = pg_f->grad_phi[0] - pg_b->grad_phi[0];
  sb.dA_jump = pg_f->grad_a0[0] - pg_b->grad_a0[0];
  return sb;
}

std::optional<cplx> eval_source_amplitude(const BeamPair& pair, const Vec& x, double k) {
  const auto sb = source_bracket(pair, x);
  if (!sb) return std::nullopt;
  return (iu * k * sb->dphi_jump * sb->amplitude + sb->dA_jump) * std::exp(iu * k * sb->phi_plus);
}

}  // namespace gbeam
