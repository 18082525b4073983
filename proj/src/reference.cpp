#include "gbeam/reference.hpp"

#include <algorithm>
#include <cmath>

#include "gbeam/errors.hpp"
#include "gbeam/hankel.hpp"
#include "gbeam/quadrature.hpp"

namespace gbeam {

WaveParams::WaveParams(double k_, double alpha_) : k(k_), alpha(alpha_) {
  if (!(k > 0.0)) throw std::invalid_argument("WaveParams: k > 0 required");
  if (alpha < 0.0) throw std::invalid_argument("WaveParams: alpha >= 0 required");
  k_alpha = std::sqrt(cplx(k * k, k * alpha));
}

cplx green_kernel_radial(int d, const WaveParams& wp, double r) {
  if (!(r > 0.0)) throw SingularPoint("green_kernel: |x| > 0 required");
  if (d == 3) return -std::exp(iu * wp.k_alpha * r) / (4.0 * M_PI * r);
  if (d == 2) return -0.25 * iu * hankel1_0(wp.k_alpha * r);
  throw std::invalid_argument("green_kernel: d must be 2 or 3");
}

cplx green_kernel(int d, const WaveParams& wp, const Vec& x) {
  return green_kernel_radial(d, wp, x.norm());
}

cplx green_kernel_radial_derivative(int d, const WaveParams& wp, double r) {
  if (!(r > 0.0)) throw SingularPoint("green_kernel: |x| > 0 required");
  if (d == 3)
    return -std::exp(iu * wp.k_alpha * r) * (iu * wp.k_alpha * r - 1.0) / (4.0 * M_PI * r * r);
  if (d == 2) return 0.25 * iu * wp.k_alpha * hankel1_1(wp.k_alpha * r);
  throw std::invalid_argument("green_kernel: d must be 2 or 3");
}

namespace {

std::vector<PanelGrid1D> build_axis(double lo, double hi, double panel_width, int pts,
                                    const std::function<cplx(double)>& f) {
  const int n_panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
  const QuadRule base = gauss_legendre(pts);
  std::vector<PanelGrid1D> panels(n_panels);
  const double w = (hi - lo) / n_panels;
  for (int p = 0; p < n_panels; ++p) {
    PanelGrid1D& pg = panels[p];
    pg.lo = lo + p * w;
    pg.hi = pg.lo + w;
    pg.nodes = Vec(pts);
    pg.weights = Vec(pts);
    pg.values = CVec(pts);
    for (int i = 0; i < pts; ++i) {
      pg.nodes[i] = pg.lo + 0.5 * w * (base.nodes[i] + 1.0);
      pg.weights[i] = 0.5 * w * base.weights[i];
      if (f) pg.values[i] = f(pg.nodes[i]);
    }
  }
  return panels;
}

// Barycentric Lagrange interpolation on a panel's Gauss nodes (near-Chebyshev,
// so the plain product weights are stable).
cplx panel_interp(const PanelGrid1D& pg, double y) {
  const int n = pg.nodes.size();
  cplx num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dy = y - pg.nodes[i];
    if (std::abs(dy) < 1e-14) return pg.values[i];
    double w = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) w /= (pg.nodes[i] - pg.nodes[j]);
    num += w / dy * pg.values[i];
    den += w / dy;
  }
  return num / den;
}

}  // namespace

SurfaceSourceTable tabulate_surface_density(int dim, double k, double alpha, const Vec& lo,
                                            const Vec& hi, const SurfaceDensity& g,
                                            double panel_width, int pts_per_panel) {
  SurfaceSourceTable t;
  t.dim = dim;
  t.k = k;
  t.alpha = alpha;
  if (dim == 2) {
    t.axis0 = build_axis(lo[0], hi[0], panel_width, pts_per_panel, [&](double y) {
      Vec z(1);
      z[0] = y;
      return g(z);
    });
    return t;
  }
  t.axis0 = build_axis(lo[0], hi[0], panel_width, pts_per_panel, nullptr);
  t.axis1 = build_axis(lo[1], hi[1], panel_width, pts_per_panel, nullptr);
  std::vector<double> ys0, ys1;
  for (const auto& p : t.axis0)
    for (int i = 0; i < p.nodes.size(); ++i) ys0.push_back(p.nodes[i]);
  for (const auto& p : t.axis1)
    for (int i = 0; i < p.nodes.size(); ++i) ys1.push_back(p.nodes[i]);
  t.values = CVec(static_cast<int>(ys0.size() * ys1.size()));
  for (std::size_t a = 0; a < ys0.size(); ++a)
    for (std::size_t b = 0; b < ys1.size(); ++b) {
      Vec z(2);
      z[0] = ys0[a];
      z[1] = ys1[b];
      t.values[static_cast<int>(a * ys1.size() + b)] = g(z);
    }
  return t;
}

SurfaceSourceTable tabulate_superposition_source(const Superposition& sp,
                                                 double window_halfwidth) {
  const double k = sp.k();
  if (window_halfwidth <= 0.0) window_halfwidth = 6.0 / std::sqrt(k);
  const int sd = sp.spec.surface_dim();
  Vec lo = sp.spec.z_lo, hi = sp.spec.z_hi;
  for (int i = 0; i < sd; ++i) {
    lo[i] -= window_halfwidth;
    hi[i] += window_halfwidth;
  }
  const double pref = sp.prefactor();
  const double w2 = window_halfwidth;
  const auto g = [&sp, pref, k, w2](const Vec& y) -> cplx {
    cplx acc = 0.0;
    const Vec x = embed_surface_point(y);
    for (std::size_t j = 0; j < sp.pairs.size(); ++j) {
      const double wh = sp.weights[static_cast<int>(j)] * sp.h_vals[static_cast<int>(j)];
      if (wh == 0.0) continue;
      if ((y - sp.pairs[j].z).norm() > w2) continue;
      const auto g0 = eval_source_amplitude(sp.pairs[j], x, k);
      if (g0) acc += wh * *g0;
    }
    return pref * acc;
  };
  const double panel_width = (2.0 * M_PI / k) / 3.0;
  return tabulate_surface_density(sp.dim(), k, sp.alpha, lo, hi, g, panel_width);
}

namespace {

// Adaptive near-singular panel contribution (d=2): subdivide toward the foot
// of x, interpolating the density from the parent panel's nodes.
cplx panel_contribution(const PanelGrid1D& pg, const WaveParams& wp, const Vec& x, double a,
                        double b, const QuadRule& base, int depth) {
  const double width = b - a;
  const double yc = std::clamp(x[1], a, b);
  Vec q(2);
  q[0] = 0.0;
  q[1] = yc;
  const double dist = std::max(std::abs(x[0]), (x - q).norm());
  if (depth > 14 || width <= 0.7 * dist || width < 1e-14) {
    cplx acc = 0.0;
    for (int i = 0; i < base.nodes.size(); ++i) {
      const double y = a + 0.5 * width * (base.nodes[i] + 1.0);
      Vec p(2);
      p[0] = 0.0;
      p[1] = y;
      acc += 0.5 * width * base.weights[i] * green_kernel(2, wp, x - p) * panel_interp(pg, y);
    }
    return acc;
  }
  const double mid = 0.5 * (a + b);
  return panel_contribution(pg, wp, x, a, mid, base, depth + 1) +
         panel_contribution(pg, wp, x, mid, b, base, depth + 1);
}

}  // namespace

cplx eval_layer_potential(const SurfaceSourceTable& src, const Vec& x) {
  const WaveParams wp(src.k, src.alpha);
  if (src.dim == 2) {
    static thread_local QuadRule base = gauss_legendre(12);
    cplx acc = 0.0;
    for (const auto& pg : src.axis0) {
      const double width = pg.hi - pg.lo;
      const double yc = std::clamp(x[1], pg.lo, pg.hi);
      Vec q(2);
      q[0] = 0.0;
      q[1] = yc;
      const double dist = (x - q).norm();
      if (width <= 0.7 * dist) {
        for (int i = 0; i < pg.nodes.size(); ++i) {
          Vec p(2);
          p[0] = 0.0;
          p[1] = pg.nodes[i];
          acc += pg.weights[i] * green_kernel(2, wp, x - p) * pg.values[i];
        }
      } else {
        acc += panel_contribution(pg, wp, x, pg.lo, pg.hi, base, 0);
      }
    }
    return acc;
  }
  // d=3: plain tensor sum (used away from Sigma).
  cplx acc = 0.0;
  std::vector<double> n1;
  std::vector<double> w1;
  for (const auto& p : src.axis1)
    for (int i = 0; i < p.nodes.size(); ++i) {
      n1.push_back(p.nodes[i]);
      w1.push_back(p.weights[i]);
    }
  int a = 0;
  for (const auto& p0 : src.axis0) {
    for (int i = 0; i < p0.nodes.size(); ++i, ++a) {
      for (std::size_t b = 0; b < n1.size(); ++b) {
        Vec q(3);
        q[0] = 0.0;
        q[1] = p0.nodes[i];
        q[2] = n1[b];
        acc += p0.weights[i] * w1[b] * green_kernel(3, wp, x - q) *
               src.values[static_cast<int>(a * n1.size() + b)];
      }
    }
  }
  return acc;
}

cplx exact_constant_medium_solution(const Superposition& sp, const Vec& x) {
  if (!sp.medium.is_constant())
    throw MediumNotConstant("exact_constant_medium_solution requires n == 1");
  const SurfaceSourceTable src = tabulate_superposition_source(sp);
  return eval_layer_potential(src, x);
}

cplx example5_quadrature(const Vec& x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("example5_quadrature: k > 0 required");
  if (x.size() != 3) throw std::invalid_argument("example5_quadrature: x must be 3D");
  if (x[0] == 0.0) throw OnSourcePlane("example5_quadrature: x1 != 0 required");
  const double L = 8.0 / std::sqrt(k);
  const int n = 72;
  static thread_local int cached_n = 0;
  static thread_local QuadRule rule;
  if (cached_n != n) {
    rule = gauss_legendre(n);
    cached_n = n;
  }
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y1 = L * rule.nodes[i];
    for (int j = 0; j < n; ++j) {
      const double y2 = L * rule.nodes[j];
      const double dx1 = x[0];
      const double dy1 = x[1] - y1;
      const double dy2 = x[2] - y2;
      const double r = std::sqrt(dx1 * dx1 + dy1 * dy1 + dy2 * dy2);
      acc += (L * rule.weights[i]) * (L * rule.weights[j]) *
             std::exp(iu * k * r - 0.5 * k * (y1 * y1 + y2 * y2)) / r;
    }
  }
  const cplx value = (-2.0 * iu * k / (4.0 * M_PI)) * acc;
  // Gaussian tail beyond |y'| = L: bounded by e^{-k L^2/2} * (2k/4pi) * (2pi/k) / |x1|.
  const double tail = std::exp(-0.5 * k * L * L) / std::abs(x[0]);
  if (tail > 1e-9 * (std::abs(value) + 1e-300))
    throw Error("example5_quadrature: truncation tail bound violated");
  return value;
}

cplx example5_stationary_phase(double x1, double k) {
  const double ax = std::abs(x1);
  if (!(ax > 0.0)) throw OnSourcePlane("example5_stationary_phase: x1 != 0 required");
  const cplx det_factor = 1.0 / (-iu / ax + 1.0);
  return (2.0 * M_PI / k) * det_factor * (-2.0 * iu * k / (4.0 * M_PI)) *
         std::exp(iu * k * ax) / ax;
}

}  // namespace gbeam
