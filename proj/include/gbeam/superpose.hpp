#pragma once

#include <string>
#include <vector>

#include "gbeam/source.hpp"

namespace gbeam {

// Gaussian-beam superposition over Sigma:
//   u(x) = (k/2pi)^{(d-1)/2} sum_j w_j h(z_j) [u+(x;z_j) + u-(x;z_j)],
// with z_j a tensor-product composite Gauss-Legendre grid on z_domain.
struct Superposition {
  MediumModel medium;
  SourceSpec spec;
  double alpha = 0.0;
  std::vector<BeamPair> pairs;
  Vec weights;  // quadrature weight per pair
  Vec h_vals;   // h(z_j)

  double k() const { return spec.k; }
  int dim() const { return medium.dim; }
  double prefactor() const;
};

// Panel width obeys the beam-spacing rule <= sqrt(2pi/k)/2 so neighboring
// Gaussians of width ~k^{-1/2} overlap; n_quad points per panel.
Superposition assemble(const MediumModel& m, const SourceSpec& spec, int n_quad, double alpha,
                       double eta = -1.0, double step = 1e-3);

cplx eval_superposition(const Superposition& sp, const Vec& x);
cplx eval_superposition_residual(const Superposition& sp, const Vec& x);

}  // namespace gbeam
