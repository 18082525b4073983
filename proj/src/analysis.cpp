#include "gbeam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gbeam/errors.hpp"
#include "gbeam/raytrace.hpp"

namespace gbeam {

int GridField::size() const {
  int n = 1;
  for (int s : shape) n *= s;
  return n;
}

Vec GridField::point(int flat) const {
  Vec x(dim);
  for (int j = dim - 1; j >= 0; --j) {
    const int i = flat % shape[j];
    flat /= shape[j];
    x[j] = lo[j] + (i + 0.5) * spacing;
  }
  return x;
}

GridField make_centered_grid(int dim, const Vec& lo, const Vec& hi, double spacing, double k,
                             bool oscillatory) {
  GridField f;
  f.dim = dim;
  f.lo = lo;
  f.spacing = spacing;
  f.k = k;
  f.oscillatory = oscillatory;
  int total = 1;
  for (int j = 0; j < dim; ++j) {
    const int n = std::max(1, static_cast<int>(std::round((hi[j] - lo[j]) / spacing)));
    f.shape.push_back(n);
    total *= n;
  }
  f.values.assign(total, cplx(0.0, 0.0));
  return f;
}

void fill_field(GridField& f, const std::function<cplx(const Vec&)>& fn) {
  const int n = f.size();
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n; ++i) f.values[i] = fn(f.point(i));
}

double l2_norm_ball(const GridField& f, double radius) {
  if (f.oscillatory && f.k > 0.0) {
    const double max_spacing = (2.0 * M_PI / f.k) / 10.0;
    if (f.spacing > max_spacing * (1.0 + 1e-12))
      throw ResolutionGuard("grid spacing " + std::to_string(f.spacing) +
                            " exceeds (2pi/k)/10 = " + std::to_string(max_spacing));
  }
  const double r2 = radius * radius;
  double acc = 0.0;  // fixed-order summation for reproducibility
  const int n = f.size();
  for (int i = 0; i < n; ++i) {
    const Vec x = f.point(i);
    if (x.squaredNorm() < r2) acc += std::norm(f.values[i]);
  }
  return std::sqrt(acc * std::pow(f.spacing, f.dim));
}

ConvergenceReport fit_slope(const Vec& ks, const Vec& errs) {
  const int n = ks.size();
  if (n < 3 || errs.size() != n) throw DegenerateFit("fit_slope: need >= 3 matched points");
  for (int i = 0; i < n; ++i) {
    if (!(errs[i] > 0.0)) throw DegenerateFit("fit_slope: errors must be positive");
    if (!(ks[i] > 0.0)) throw DegenerateFit("fit_slope: k must be positive");
    if (i > 0 && !(ks[i] > ks[i - 1]))
      throw DegenerateFit("fit_slope: k list must be strictly increasing");
  }
  Vec lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(ks[i]);
    ly[i] = std::log(errs[i]);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  const double syy = (ly.array() - my).square().sum();
  ConvergenceReport r;
  r.k_list = ks;
  r.errors = errs;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_report_json(const ConvergenceReport& r, const std::string& path,
                       const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << "{";
  if (!header_comment.empty()) out << "\"comment\":\"" << header_comment << "\",";
  out << "\"k\":[";
  for (int i = 0; i < r.k_list.size(); ++i) out << (i ? "," : "") << fmt(r.k_list[i]);
  out << "],\"err\":[";
  for (int i = 0; i < r.errors.size(); ++i) out << (i ? "," : "") << fmt(r.errors[i]);
  out << "],\"slope\":" << fmt(r.slope) << ",\"intercept\":" << fmt(r.intercept)
      << ",\"r2\":" << fmt(r.r2) << "}\n";
}

void write_report_csv(const ConvergenceReport& r, const std::string& path,
                      const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "k,err\n";
  for (int i = 0; i < r.k_list.size(); ++i)
    out << fmt(r.k_list[i]) << "," << fmt(r.errors[i]) << "\n";
}

void write_field_text(const GridField& f, const std::string& path,
                      const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "dim " << f.dim << "\n";
  out << "lo";
  for (int j = 0; j < f.dim; ++j) out << " " << fmt(f.lo[j]);
  out << "\nspacing " << fmt(f.spacing) << "\nshape";
  for (int s : f.shape) out << " " << s;
  out << "\nk " << fmt(f.k) << "\n";
  const int n = f.size();
  for (int i = 0; i < n; ++i) {
    const Vec x = f.point(i);
    for (int j = 0; j < f.dim; ++j) out << fmt(x[j]) << " ";
    out << fmt(f.values[i].real()) << " " << fmt(f.values[i].imag()) << "\n";
  }
}

NonSqueezeResult nonsqueezing_probe(const MediumModel& m, const SourceSpec& spec, int pairs,
                                    const std::function<double(const Vec&)>& S_rule,
                                    double S_lipschitz, std::uint64_t seed, double step) {
  NonSqueezeResult res;
  res.pairs = pairs;
  res.seed = seed;
  res.s_lipschitz = S_lipschitz;
  res.c1_hat = std::numeric_limits<double>::infinity();
  res.c2_hat = 0.0;
  CounterRng rng(seed);
  const int sd = spec.surface_dim();

  const auto flow_at = [&](const Vec& z) {
    const Vec x0 = embed_surface_point(z);
    Vec p0 = Vec::Zero(m.dim);
    p0[0] = eval_n(m, x0);
    const double s_eval = S_rule(z);
    const double lo = std::min(0.0, s_eval);
    const double hi = std::max(step, std::max(0.0, s_eval));
    Bicharacteristic ray = integrate_with_refinement(m, x0, p0, lo, hi, step);
    return std::make_pair(ray.position(s_eval), ray.momentum(s_eval));
  };

  for (int it = 0; it < pairs; ++it) {
    Vec z(sd), zp(sd);
    for (int j = 0; j < sd; ++j) {
      z[j] = rng.uniform(spec.z_lo[j], spec.z_hi[j]);
      zp[j] = rng.uniform(spec.z_lo[j], spec.z_hi[j]);
    }
    const double dz = (z - zp).norm();
    if (dz < 1e-8) continue;
    const auto [xa, pa] = flow_at(z);
    const auto [xb, pb] = flow_at(zp);
    const double ratio = ((pa - pb).norm() + (xa - xb).norm()) / dz;
    if (ratio < res.c1_hat) {
      res.c1_hat = ratio;
      res.argmin_z = z;
      res.argmin_zp = zp;
    }
    if (ratio > res.c2_hat) {
      res.c2_hat = ratio;
      res.argmax_z = z;
      res.argmax_zp = zp;
    }
  }
  return res;
}

PhaseSeparationResult phase_separation_probe(const BeamPair& a, const BeamPair& b, int samples,
                                             double theta, std::uint64_t seed) {
  PhaseSeparationResult res;
  res.delta_hat = std::numeric_limits<double>::infinity();
  res.grad_min_ratio_near = std::numeric_limits<double>::infinity();
  res.grad_min_ratio_all = std::numeric_limits<double>::infinity();
  CounterRng rng(seed);
  const BeamData& beamA = a.forward;
  const BeamData& beamB = b.forward;
  const double dz = (a.z - b.z).norm();
  const int d = beamA.medium.dim;

  int attempts = 0;
  while (res.n_samples < samples && ++attempts < 200 * samples) {
    const double s = rng.uniform(std::max(0.0, beamA.ray.s_front()), beamA.ray.s_back());
    const Vec xs = beamA.ray.position(s);
    const Vec x = xs + rng.in_ball(d, beamA.eta);
    const auto pga = phase_gradient(beamA, x);
    if (!pga || pga->transverse.norm() > beamA.eta) continue;
    const auto pgb = phase_gradient(beamB, x);
    if (!pgb || pgb->transverse.norm() > beamB.eta) continue;
    ++res.n_samples;

    const double da = pga->transverse.norm(), db = pgb->transverse.norm();
    const double denom = da * da + db * db;
    const cplx psi = pgb->phi - std::conj(pga->phi);
    if (denom > 1e-14) res.delta_hat = std::min(res.delta_hat, psi.imag() / denom);
    if (std::abs(psi.imag() / std::max(denom, 1e-300)) < res.delta_hat) res.argmin_x = x;

    if (dz > 0.0) {
      const CVec grad_psi = pgb->grad_phi - pga->grad_phi.conjugate();
      const double ratio = grad_psi.norm() / dz;
      res.grad_min_ratio_all = std::min(res.grad_min_ratio_all, ratio);
      const Vec gamma_a = x - pga->transverse;
      const Vec gamma_b = x - pgb->transverse;
      if ((gamma_a - gamma_b).norm() < theta * dz) {
        ++res.n_near;
        res.grad_min_ratio_near = std::min(res.grad_min_ratio_near, ratio);
      }
    }
  }
  if (res.n_samples == 0) throw EmptyOverlap("phase_separation_probe: tubes do not intersect");
  res.grad_bound_ok = res.n_near == 0 || res.grad_min_ratio_near > 0.0;
  return res;
}

}  // namespace gbeam
