#include "gbeam/beam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "gbeam/errors.hpp"
#include "gbeam/mollifier.hpp"
#include "gbeam/rng.hpp"

namespace gbeam {

namespace {

double hermite_scalar(double v0, double d0, double v1, double d1, double h, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * v1 +
         (t3 - t2) * h * d1;
}

}  // namespace

double BeamData::phase_on_ray(double s) const {
  const int i = ray.interval_of(s);
  const double h = ray.s_grid[i + 1] - ray.s_grid[i];
  return hermite_scalar(S[i], 2.0 * eval_n2(medium, ray.x[i]), S[i + 1],
                        2.0 * eval_n2(medium, ray.x[i + 1]), h, (s - ray.s_grid[i]) / h);
}

double BeamData::n2_integral_at(double s) const {
  const int i = ray.interval_of(s);
  const double h = ray.s_grid[i + 1] - ray.s_grid[i];
  return hermite_scalar(n2_integral[i], eval_n2(medium, ray.x[i]), n2_integral[i + 1],
                        eval_n2(medium, ray.x[i + 1]), h, (s - ray.s_grid[i]) / h);
}

cplx BeamData::amplitude_on_ray(double s) const {
  const int i = ray.interval_of(s);
  const cplx detB0 = frame.B[ray.origin].determinant();
  cplx root = std::sqrt(detB0 / frame.B_dense(ray, s).determinant());
  // Continuous branch: stay within a quarter turn of the bracketing sample.
  if ((root * std::conj(sqrt_part[i])).real() < 0.0) root = -root;
  return root * std::exp(-alpha * n2_integral_at(s));
}

void check_initial_hessian(const MediumModel& m, const Vec& x0, const Vec& p0, const CMat& M0,
                           double tol) {
  const int d = m.dim;
  if ((M0 - M0.transpose()).norm() > tol)
    throw BadInitialHessian("M0 is not symmetric");
  const Vec xdot = 2.0 * p0;
  const Vec pdot = eval_medium(m, x0).grad_n2;
  if ((M0 * xdot.cast<cplx>() - pdot.cast<cplx>()).norm() > tol * (1.0 + pdot.norm()))
    throw BadInitialHessian("M0 x'(0) != p'(0)");
  // Orthonormal basis of x'(0)^perp via full pivoting on (I - tt^T).
  const Vec t = xdot.normalized();
  Mat proj = Mat::Identity(d, d) - t * t.transpose();
  Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeFullU);
  Mat Q = svd.matrixU().leftCols(d - 1);
  const CMat imM = ((M0 - M0.adjoint()) / (2.0 * iu));
  Eigen::SelfAdjointEigenSolver<CMat> es(Q.cast<cplx>().adjoint() * imM * Q.cast<cplx>());
  if (es.eigenvalues().minCoeff() <= tol)
    throw BadInitialHessian("Im M0 is not positive definite on x'(0)^perp");
}

BeamData build_first_order_beam(const MediumModel& m, const Vec& x0, const Vec& p0,
                                const CMat& M0, double alpha, double s_lo, double s_hi,
                                double step, double eta) {
  check_initial_hessian(m, x0, p0, M0);
  BeamData beam;
  beam.medium = m;
  beam.alpha = alpha;
  beam.eta = eta > 0.0 ? eta : 0.3 * m.support_radius;
  beam.ray = integrate_with_refinement(m, x0, p0, s_lo, s_hi, step);
  beam.frame = integrate_variational(m, beam.ray, CMat::Identity(m.dim, m.dim), M0);

  const auto& ray = beam.ray;
  const int n = ray.size();
  beam.S = Vec::Zero(n);
  beam.n2_integral = Vec::Zero(n);
  // Composite Simpson with Hermite midpoints, outward from the origin.
  const auto accumulate = [&](int from, int to, int dir) {
    for (int i = from; i != to; i += dir) {
      const double h = ray.s_grid[i + dir] - ray.s_grid[i];
      const double f0 = eval_n2(m, ray.x[i]);
      const double fm = eval_n2(m, ray.position(ray.s_grid[i] + 0.5 * h));
      const double f1 = eval_n2(m, ray.x[i + dir]);
      const double inc = (h / 6.0) * (f0 + 4.0 * fm + f1);
      beam.S[i + dir] = beam.S[i] + 2.0 * inc;
      beam.n2_integral[i + dir] = beam.n2_integral[i] + inc;
    }
  };
  accumulate(ray.origin, n - 1, 1);
  accumulate(ray.origin, 0, -1);

  beam.sqrt_part = CVec::Zero(n);
  beam.A0 = CVec::Zero(n);
  const cplx detB0 = beam.frame.B[ray.origin].determinant();
  beam.sqrt_part[ray.origin] = 1.0;
  const auto track = [&](int from, int to, int dir) {
    for (int i = from; i != to; i += dir) {
      cplx root = std::sqrt(detB0 / beam.frame.B[i + dir].determinant());
      if ((root * std::conj(beam.sqrt_part[i])).real() < 0.0) root = -root;
      beam.sqrt_part[i + dir] = root;
    }
  };
  track(ray.origin, n - 1, 1);
  track(ray.origin, 0, -1);
  for (int i = 0; i < n; ++i)
    beam.A0[i] = beam.sqrt_part[i] * std::exp(-alpha * beam.n2_integral[i]);

  beam.aabb_lo = ray.x[0];
  beam.aabb_hi = ray.x[0];
  for (int i = 1; i < n; ++i) {
    beam.aabb_lo = beam.aabb_lo.cwiseMin(ray.x[i]);
    beam.aabb_hi = beam.aabb_hi.cwiseMax(ray.x[i]);
  }
  const double margin = beam.eta + 4.0 * step;
  beam.aabb_lo.array() -= margin;
  beam.aabb_hi.array() += margin;
  return beam;
}

BeamData build_beam_to_radius(const MediumModel& m, const Vec& x0, const Vec& p0, const CMat& M0,
                              double alpha, double r_stop, double s_back, double step,
                              double eta) {
  check_initial_hessian(m, x0, p0, M0);
  const Bicharacteristic probe = integrate_to_radius(m, x0, p0, 0.0, r_stop, 4.0 * step);
  double s_hi = probe.s_back();
  for (int i = 0; i < probe.size(); ++i) {
    if (probe.x[i].norm() >= r_stop) {
      s_hi = std::max(probe.s_grid[i], 4.0 * step);
      break;
    }
  }
  return build_first_order_beam(m, x0, p0, M0, alpha, -std::abs(s_back), s_hi, step, eta);
}

std::optional<Projection> project_to_ray(const BeamData& beam, const Vec& x) {
  const auto& ray = beam.ray;
  const int n = ray.size();
  if (n < 2) return std::nullopt;
  if (beam.aabb_lo.size() == x.size()) {
    for (int j = 0; j < x.size(); ++j)
      if (x[j] < beam.aabb_lo[j] || x[j] > beam.aabb_hi[j]) return std::nullopt;
  }
  const double h_ray = ray.s_grid[1] - ray.s_grid[0];
  const double scan_ds = std::max(h_ray, std::min(beam.eta, 0.2) / 4.0);
  const int stride = std::max(1, static_cast<int>(std::floor(scan_ds / h_ray)));

  // Strided scan for local minima of the node distances.
  std::vector<int> idx;
  for (int i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  const int ns = static_cast<int>(idx.size());
  std::vector<double> dist(ns);
  for (int j = 0; j < ns; ++j) dist[j] = (x - ray.x[idx[j]]).norm();

  struct Candidate {
    double s, d;
    bool endpoint;
  };
  std::vector<Candidate> cands;
  const double vel_scale = 2.0 * std::max(1.0, x.norm() + 1.0);

  const auto refine = [&](int j) {
    const double s_min = ray.s_grid[idx[std::max(0, j - 1)]];
    const double s_max = ray.s_grid[idx[std::min(ns - 1, j + 1)]];
    double s = ray.s_grid[idx[j]];
    const auto g = [&](double ss) {
      return (x - ray.position(ss)).dot(ray.velocity(ss));
    };
    const auto gprime = [&](double ss) {
      const Vec y = x - ray.position(ss);
      return -ray.velocity(ss).squaredNorm() + y.dot(ray.acceleration(ss));
    };
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const double gv = g(s);
      if (std::abs(gv) < 1e-12 * vel_scale) {
        converged = true;
        break;
      }
      const double gp = gprime(s);
      if (gp == 0.0) break;
      double snew = s - gv / gp;
      if (snew < s_min || snew > s_max) {
        // Bisection fallback on the bracketing interval.
        double a = s_min, b = s_max;
        double ga = g(a), gb = g(b);
        if (ga * gb > 0.0) break;
        for (int bi = 0; bi < 80; ++bi) {
          const double mid = 0.5 * (a + b);
          const double gm = g(mid);
          if (ga * gm <= 0.0) {
            b = mid;
            gb = gm;
          } else {
            a = mid;
            ga = gm;
          }
        }
        snew = 0.5 * (a + b);
        s = snew;
        converged = std::abs(g(s)) < 1e-9 * vel_scale;
        break;
      }
      s = snew;
    }
    if (!converged && std::abs(g(s)) > 1e-9 * vel_scale) return;
    const double d = (x - ray.position(s)).norm();
    cands.push_back({s, d, false});
  };

  for (int j = 0; j < ns; ++j) {
    const bool lmin = (j == 0 || dist[j] <= dist[j - 1]) && (j == ns - 1 || dist[j] <= dist[j + 1]);
    if (!lmin) continue;
    if (dist[j] > beam.eta + 8.0 * scan_ds) continue;
    if (j == 0 || j == ns - 1) {
      // Endpoint: valid as-is only if x lies on the endpoint's normal plane;
      // otherwise the minimum may still sit inside the adjacent interval.
      const double s_end = ray.s_grid[idx[j]];
      const Vec y = x - ray.x[idx[j]];
      if (std::abs(y.dot(2.0 * ray.p[idx[j]])) < 1e-9 * vel_scale)
        cands.push_back({s_end, y.norm(), true});
      else
        refine(j);
      continue;
    }
    refine(j);
  }
  if (cands.empty()) return std::nullopt;

  // Merge candidates that converged to the same parameter.
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.s < b.s;
  });
  std::vector<Candidate> merged;
  for (const auto& c : cands) {
    if (!merged.empty() && std::abs(c.s - merged.back().s) < 0.5 * scan_ds) {
      if (c.d < merged.back().d) merged.back() = c;
    } else {
      merged.push_back(c);
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
    return a.d < b.d;
  });
  if (merged[0].d > beam.eta) return std::nullopt;
  if (merged.size() > 1 && merged[1].d <= beam.eta &&
      std::abs(merged[0].d - merged[1].d) < 1e-8)
    throw AmbiguousProjection("two projection minima at distance " + std::to_string(merged[0].d) +
                              "; shrink eta");
  Projection pr;
  pr.s = merged[0].s;
  pr.foot = ray.position(pr.s);
  pr.transverse = x - pr.foot;
  pr.dist = merged[0].d;
  return pr;
}

BeamValue eval_beam(const BeamData& beam, const Vec& x, double k) {
  BeamValue bv;
  bv.transverse = Vec::Zero(beam.medium.dim);
  const auto proj = project_to_ray(beam, x);
  if (!proj) return bv;
  const double s = proj->s;
  const Vec& y = proj->transverse;
  const CVec yc = y.cast<cplx>();
  const CMat M = beam.frame.M_dense(beam.ray, s);
  const cplx phi = beam.phase_on_ray(s) + beam.ray.momentum(s).dot(y) +
                   0.5 * (yc.transpose() * M * yc)(0, 0);
  bv.phase = phi;
  bv.amplitude = beam.amplitude_on_ray(s);
  bv.s_proj = s;
  bv.transverse = y;
  bv.inside = true;
  bv.value = bv.amplitude * std::exp(iu * k * phi) * plateau_cutoff(proj->dist / beam.eta);
  return bv;
}

std::optional<PhaseGradient> phase_gradient(const BeamData& beam, const Vec& x) {
  const auto proj = project_to_ray(beam, x);
  if (!proj) return std::nullopt;
  const double s = proj->s;
  const Vec& y = proj->transverse;
  const CVec yc = y.cast<cplx>();

  const Vec xs = proj->foot;
  const Vec ps = beam.ray.momentum(s);
  const Vec xdot = 2.0 * ps;
  const Vec xddot = beam.ray.acceleration(s);
  const MediumEval me = eval_medium(beam.medium, xs);
  const CMat M = beam.frame.M_dense(beam.ray, s);
  const CMat Mdot = me.hess_n2.cast<cplx>() - 2.0 * M * M;

  const Vec grad_s = xdot / (xdot.squaredNorm() - y.dot(xddot));
  const CVec p_plus_My = ps.cast<cplx>() + M * yc;
  const cplx bracket = 2.0 * me.n2 + me.grad_n2.dot(y) +
                       0.5 * (yc.transpose() * Mdot * yc)(0, 0) -
                       bilinear_dot(p_plus_My, xdot);

  PhaseGradient pg;
  pg.s = s;
  pg.transverse = y;
  pg.phi = beam.phase_on_ray(s) + ps.dot(y) + 0.5 * (yc.transpose() * M * yc)(0, 0);
  pg.grad_phi = p_plus_My + bracket * grad_s.cast<cplx>();
  pg.a0 = beam.amplitude_on_ray(s);
  const cplx a0dot = -(M.trace() + beam.alpha * me.n2) * pg.a0;
  pg.grad_a0 = a0dot * grad_s.cast<cplx>();
  return pg;
}

namespace {

std::optional<ResidualCoefficients> residual_from_gradient(const BeamData& beam, const Vec& x,
                                                           const PhaseGradient& pg) {
  const int d = beam.medium.dim;
  const double h = kResidualFdStep;
  cplx lap_phi = 0.0, lap_a0 = 0.0;
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto pgp = phase_gradient(beam, xp);
    const auto pgm = phase_gradient(beam, xm);
    if (!pgp || !pgm) return std::nullopt;
    lap_phi += (pgp->grad_phi[j] - pgm->grad_phi[j]) / (2.0 * h);
    lap_a0 += (pgp->grad_a0[j] - pgm->grad_a0[j]) / (2.0 * h);
  }
  const double n2x = eval_n2(beam.medium, x);
  ResidualCoefficients rc;
  rc.c_minus2 = (n2x - bilinear_dot(pg.grad_phi, pg.grad_phi)) * pg.a0;
  rc.c_minus1 = iu * beam.alpha * n2x * pg.a0 + pg.a0 * lap_phi +
                2.0 * bilinear_dot(pg.grad_a0, pg.grad_phi);
  rc.c_0 = lap_a0;
  return rc;
}

}  // namespace

std::optional<ResidualCoefficients> residual_coefficients(const BeamData& beam, const Vec& x) {
  const auto pg = phase_gradient(beam, x);
  if (!pg) return std::nullopt;
  return residual_from_gradient(beam, x, *pg);
}

cplx eval_residual_field(const BeamData& beam, const Vec& x, double k) {
  const auto pg = phase_gradient(beam, x);
  if (!pg) return 0.0;
  const auto rc = residual_from_gradient(beam, x, *pg);
  if (!rc) return 0.0;
  const double cut = plateau_cutoff(pg->transverse.norm() / beam.eta);
  return std::exp(iu * k * pg->phi) * (k * k * rc->c_minus2 + k * rc->c_minus1 + rc->c_0) * cut;
}

double phase_positivity_constant(const BeamData& beam, int samples, std::uint64_t seed,
                                 double s_lo, double s_hi) {
  CounterRng rng(seed);
  if (s_hi < s_lo) {
    s_lo = beam.ray.s_front();
    s_hi = beam.ray.s_back();
  }
  const int d = beam.medium.dim;
  double delta = std::numeric_limits<double>::infinity();
  int used = 0, attempts = 0;
  while (used < samples && ++attempts < 50 * samples) {
    const double s = rng.uniform(s_lo, s_hi);
    const Vec xs = beam.ray.position(s);
    const Vec t = beam.ray.velocity(s).normalized();
    Vec y = rng.in_ball(d, beam.eta);
    y -= y.dot(t) * t;
    if (y.norm() < 1e-6 * beam.eta) continue;
    const Vec x = xs + y;
    std::optional<Projection> proj;
    try {
      proj = project_to_ray(beam, x);
    } catch (const AmbiguousProjection&) {
      return -std::numeric_limits<double>::infinity();
    }
    if (!proj || proj->dist < 1e-9) continue;
    const CVec yc = proj->transverse.cast<cplx>();
    const CMat M = beam.frame.M_dense(beam.ray, proj->s);
    const double im_phi = (0.5 * (yc.transpose() * M * yc)(0, 0)).imag();
    delta = std::min(delta, im_phi / (proj->dist * proj->dist));
    ++used;
  }
  return delta;
}

double auto_tube_radius(BeamData& beam, int samples, double eta_min) {
  for (;;) {
    const double delta = phase_positivity_constant(beam, samples);
    if (delta > 0.0) return delta;
    if (beam.eta * 0.5 < eta_min)
      throw AmbiguousProjection("tube radius collapsed below eta_min while fitting");
    beam.eta *= 0.5;
  }
}

void write_beam_csv(const BeamData& beam, const std::string& path,
                    const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  const int d = beam.medium.dim;
  out << "s,S";
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out << ",ReM" << a << b << ",ImM" << a << b;
  out << ",ReA0,ImA0\n";
  char buf[64];
  for (int i = 0; i < beam.ray.size(); ++i) {
    const CMat M = beam.frame.M_at(i);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", beam.ray.s_grid[i], beam.S[i]);
    out << buf;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", M(a, b).real(), M(a, b).imag());
        out << buf;
      }
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", beam.A0[i].real(), beam.A0[i].imag());
    out << buf;
  }
}

}  // namespace gbeam
