#include "gbeam/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace gbeam {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  if (n == 1) {
    QuadRule r;
    r.nodes = Vec::Zero(1);
    r.weights = Vec::Constant(1, 2.0);
    return r;
  }
  Mat J = Mat::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    const double b = j / std::sqrt(4.0 * j * j - 1.0);
    J(j, j - 1) = b;
    J(j - 1, j) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  QuadRule r;
  r.nodes = es.eigenvalues();
  r.weights = 2.0 * es.eigenvectors().row(0).array().square();
  return r;
}

PanelRule composite_gauss(double a, double b, int panels, int n) {
  if (panels < 1) throw std::invalid_argument("composite_gauss: panels >= 1");
  const QuadRule base = gauss_legendre(n);
  PanelRule r;
  r.points_per_panel = n;
  r.nodes.resize(panels * n);
  r.weights.resize(panels * n);
  r.panel_edges.resize(panels + 1);
  const double w = (b - a) / panels;
  for (int p = 0; p <= panels; ++p) r.panel_edges[p] = a + p * w;
  for (int p = 0; p < panels; ++p) {
    const double lo = r.panel_edges[p];
    for (int i = 0; i < n; ++i) {
      r.nodes[p * n + i] = lo + 0.5 * w * (base.nodes[i] + 1.0);
      r.weights[p * n + i] = 0.5 * w * base.weights[i];
    }
  }
  return r;
}

}  // namespace gbeam
