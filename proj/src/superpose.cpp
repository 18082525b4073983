#include "gbeam/superpose.hpp"

#include <cmath>

#include "gbeam/errors.hpp"
#include "gbeam/quadrature.hpp"

namespace gbeam {

double Superposition::prefactor() const {
  return std::pow(spec.k / (2.0 * M_PI), 0.5 * (dim() - 1));
}

Superposition assemble(const MediumModel& m, const SourceSpec& spec, int n_quad, double alpha,
                       double eta, double step) {
  if (n_quad < 1) throw std::invalid_argument("assemble: n_quad >= 1");
  const int sd = spec.surface_dim();
  if (sd != m.dim - 1) throw SchemaError("assemble: z_domain dimension must be d-1");

  const double max_panel = 0.5 * std::sqrt(2.0 * M_PI / spec.k);
  std::vector<PanelRule> rules;
  for (int i = 0; i < sd; ++i) {
    const double len = spec.z_hi[i] - spec.z_lo[i];
    const int panels = std::max(1, static_cast<int>(std::ceil(len / max_panel)));
    rules.push_back(composite_gauss(spec.z_lo[i], spec.z_hi[i], panels, n_quad));
  }

  Superposition sp;
  sp.medium = m;
  sp.spec = spec;
  sp.alpha = alpha;

  std::vector<Vec> zs;
  std::vector<double> ws;
  if (sd == 1) {
    for (int i = 0; i < rules[0].nodes.size(); ++i) {
      Vec z(1);
      z[0] = rules[0].nodes[i];
      zs.push_back(z);
      ws.push_back(rules[0].weights[i]);
    }
  } else {
    for (int i = 0; i < rules[0].nodes.size(); ++i)
      for (int j = 0; j < rules[1].nodes.size(); ++j) {
        Vec z(2);
        z[0] = rules[0].nodes[i];
        z[1] = rules[1].nodes[j];
        zs.push_back(z);
        ws.push_back(rules[0].weights[i] * rules[1].weights[j]);
      }
  }

  sp.weights = Vec(static_cast<int>(zs.size()));
  sp.h_vals = Vec(static_cast<int>(zs.size()));
  for (std::size_t j = 0; j < zs.size(); ++j) {
    sp.weights[static_cast<int>(j)] = ws[j];
    sp.h_vals[static_cast<int>(j)] = spec.weight(zs[j]);
    sp.pairs.push_back(build_beam_pair(m, zs[j], spec, alpha, eta, step));
  }
  return sp;
}

cplx eval_superposition(const Superposition& sp, const Vec& x) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < sp.pairs.size(); ++j) {
    const double wh = sp.weights[static_cast<int>(j)] * sp.h_vals[static_cast<int>(j)];
    if (wh == 0.0) continue;
    acc += wh * sp.pairs[j].eval(x, sp.k());
  }
  return sp.prefactor() * acc;
}

cplx eval_superposition_residual(const Superposition& sp, const Vec& x) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < sp.pairs.size(); ++j) {
    const double wh = sp.weights[static_cast<int>(j)] * sp.h_vals[static_cast<int>(j)];
    if (wh == 0.0) continue;
    acc += wh * sp.pairs[j].residual(x, sp.k());
  }
  return sp.prefactor() * acc;
}

}  // namespace gbeam
