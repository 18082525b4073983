#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gbeam/medium.hpp"
#include "gbeam/source.hpp"
#include "gbeam/types.hpp"

namespace gbeam {

// Uniform cell-centered tensor grid over a box, complex values per cell.
// Fields flagged `oscillatory` (the default) hold wave solutions and must
// satisfy spacing <= (2pi/k)/10; envelope fields (|f|-type data) are exempt.
struct GridField {
  int dim = 2;
  Vec lo;
  double spacing = 0.0;
  std::vector<int> shape;
  std::vector<cplx> values;
  double k = 0.0;
  bool oscillatory = true;

  int size() const;
  Vec point(int flat) const;  // cell center
  cplx& at(int flat) { return values[flat]; }
};

GridField make_centered_grid(int dim, const Vec& lo, const Vec& hi, double spacing, double k,
                             bool oscillatory = true);

// Fills in parallel; values are written per-cell so results are independent
// of the thread count.
void fill_field(GridField& f, const std::function<cplx(const Vec&)>& fn);

// Midpoint-rule L2 norm over cells with |x| < radius.
// Throws ResolutionGuard when an oscillatory field violates the spacing rule.
double l2_norm_ball(const GridField& f, double radius);

struct ConvergenceReport {
  Vec k_list;
  Vec errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least-squares line through (log k, log err). Throws DegenerateFit for fewer
// than 3 points, nonpositive errors, or non-increasing k.
ConvergenceReport fit_slope(const Vec& ks, const Vec& errs);

void write_report_json(const ConvergenceReport& r, const std::string& path,
                       const std::string& header_comment = "");
void write_report_csv(const ConvergenceReport& r, const std::string& path,
                      const std::string& header_comment = "");

// Text grid dump: header lines (dim, bounds, shape, k), then one row per cell
// "x1 ... xd Re(u) Im(u)".
void write_field_text(const GridField& f, const std::string& path,
                      const std::string& header_comment = "");

// Empirical probe of the trajectory non-squeezing inequality
//   c1 |z-z'| <= |p(S(z);z)-p(S(z');z')| + |x(S(z);z)-x(S(z');z')| <= c2 |z-z'|
// over sampled pairs (z, z') in z_domain, rays launched normal to Sigma.
struct NonSqueezeResult {
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  int pairs = 0;
  std::uint64_t seed = 0;
  double s_lipschitz = 0.0;
  Vec argmin_z, argmin_zp;  // evidence: extremal sample locations
  Vec argmax_z, argmax_zp;
};
NonSqueezeResult nonsqueezing_probe(const MediumModel& m, const SourceSpec& spec, int pairs,
                                    const std::function<double(const Vec&)>& S_rule,
                                    double S_lipschitz, std::uint64_t seed = kDefaultProbeSeed,
                                    double step = 1e-3);

// Empirical probe of the two-beam phase estimates on the tube intersection:
// delta_hat = min Im psi / (|x-gamma|^2 + |x-gamma'|^2) with
// psi(x,z,z') = phi(x;z') - conj(phi(x;z)); the gradient bound is checked on
// samples where |gamma - gamma'| < theta |z - z'|.
struct PhaseSeparationResult {
  double delta_hat = 0.0;
  bool grad_bound_ok = false;
  double grad_min_ratio_near = 0.0;  // min |grad psi| / |z-z'| on the near set
  double grad_min_ratio_all = 0.0;
  int n_samples = 0;
  int n_near = 0;
  Vec argmin_x;  // evidence: location of the extremal Im psi ratio
};
PhaseSeparationResult phase_separation_probe(const BeamPair& a, const BeamPair& b, int samples,
                                             double theta = 0.1,
                                             std::uint64_t seed = kDefaultProbeSeed);

}  // namespace gbeam
