#pragma once

#include <functional>
#include <vector>

#include "gbeam/superpose.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

// Complex wave number k_alpha = sqrt(k^2 + i k alpha), principal branch
// (Im k_alpha >= 0, |k_alpha| >= k, k_alpha = k when alpha = 0).
struct WaveParams {
  double k = 1.0;
  double alpha = 0.0;
  cplx k_alpha{1.0, 0.0};

  WaveParams() = default;
  WaveParams(double k_, double alpha_);
};

// Free-space outgoing kernels with (Delta + k_alpha^2) G = delta:
//   d=3: -e^{i k_alpha |x|} / (4 pi |x|)
//   d=2: -(i/4) H0^(1)(k_alpha |x|)
cplx green_kernel(int d, const WaveParams& wp, const Vec& x);
cplx green_kernel_radial(int d, const WaveParams& wp, double r);
cplx green_kernel_radial_derivative(int d, const WaveParams& wp, double r);  // dG/dr

struct PanelGrid1D {
  double lo = 0.0, hi = 0.0;
  Vec nodes;      // Gauss nodes in [lo,hi]
  Vec weights;
  CVec values;    // g_tot at the nodes
};

// Realized surface source density tabulated on a composite Gauss grid over
// the union of the per-pair windows |y - z_j| <= 6 k^{-1/2}:
//   g_tot(y) = (k/2pi)^{(d-1)/2} sum_j w_j h(z_j) g0_j(y).
struct SurfaceSourceTable {
  int dim = 2;
  double k = 1.0;
  double alpha = 0.0;
  // d=2: one axis of panels. d=3: tensor grid, values stored row-major over
  // (axis0 node) x (axis1 node).
  std::vector<PanelGrid1D> axis0;
  std::vector<PanelGrid1D> axis1;  // empty when dim == 2
  CVec values;                     // d=3 only
};

using SurfaceDensity = std::function<cplx(const Vec& y)>;  // y in Sigma coords

SurfaceSourceTable tabulate_surface_density(int dim, double k, double alpha, const Vec& lo,
                                            const Vec& hi, const SurfaceDensity& g,
                                            double panel_width, int pts_per_panel = 12);

// Realized source of a superposition (includes the (k/2pi)^{(d-1)/2} prefactor).
SurfaceSourceTable tabulate_superposition_source(const Superposition& sp,
                                                 double window_halfwidth = -1.0);

// u_E(x) = int_Sigma G(x - (0,y)) g(y) dy. Panels close to the foot of x are
// subdivided dyadically (d=2) with the density interpolated from its panel
// nodes, so grid points arbitrarily close to Sigma stay accurate.
cplx eval_layer_potential(const SurfaceSourceTable& src, const Vec& x);

// Exact reference for constant media: layer potential of the superposition's
// own realized source. Throws MediumNotConstant.
cplx exact_constant_medium_solution(const Superposition& sp, const Vec& x);

// Oscillatory-integral oracle (d=3): tensor Gauss quadrature of
//   u(x,k) = (-2ik/4pi) int e^{ik|x-(0,y')| - k|y'|^2/2} / |x-(0,y')| dy'
// over |y'| <= 8 k^{-1/2}, with a tail bound check. Throws OnSourcePlane.
cplx example5_quadrature(const Vec& x, double k);

// Leading stationary-phase term, which simplifies to (1+i|x1|)^{-1} e^{ik|x1|}.
cplx example5_stationary_phase(double x1, double k);

}  // namespace gbeam
