#pragma once

#include <vector>

#include "gbeam/types.hpp"

namespace gbeam {

struct QuadRule {
  Vec nodes;    // on [-1,1]
  Vec weights;  // sum = 2
};

// Gauss-Legendre rule via Golub-Welsch on the Jacobi matrix.
QuadRule gauss_legendre(int n);

// Composite rule on [a,b] with `panels` equal panels of an n-point rule.
struct PanelRule {
  Vec nodes;
  Vec weights;
  std::vector<double> panel_edges;  // panels+1 entries
  int points_per_panel = 0;
};

PanelRule composite_gauss(double a, double b, int panels, int n);

}  // namespace gbeam
