#include "gbeam/medium.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gbeam/errors.hpp"
#include "gbeam/mollifier.hpp"
#include "gbeam/raytrace.hpp"

namespace gbeam {

double MediumModel::min_index() const {
  double neg = 0.0;
  for (const auto& b : bumps)
    if (b.amplitude < 0.0) neg += -b.amplitude;
  return std::sqrt(std::max(1.0 - neg, 1e-12));
}

MediumModel make_constant_medium(int dim, double R) {
  MediumModel m;
  m.kind = MediumKind::constant;
  m.dim = dim;
  m.support_radius = R;
  validate_medium(m);
  return m;
}

MediumModel make_gaussian_bump_medium(int dim, double A, double sigma, const Vec& center, double R) {
  MediumModel m;
  m.kind = MediumKind::gaussian_bump;
  m.dim = dim;
  m.support_radius = R;
  GaussianBump b;
  b.amplitude = A;
  b.sigma = sigma;
  b.center = center;
  m.bumps.push_back(b);
  validate_medium(m);
  return m;
}

void validate_medium(const MediumModel& m) {
  if (m.dim != 2 && m.dim != 3) throw SchemaError("medium: dim must be 2 or 3");
  if (!(m.support_radius > 0.0)) throw SchemaError("medium: R must be positive");
  double neg = 0.0;
  for (const auto& b : m.bumps) {
    if (!(std::abs(b.amplitude) < 1.0)) throw SchemaError("medium: each |A| < 1 required");
    if (!(b.sigma > 0.0)) throw SchemaError("medium: sigma must be positive");
    if (b.center.size() != m.dim) throw SchemaError("medium: bump center has wrong dimension");
    if (b.amplitude < 0.0) neg += -b.amplitude;
  }
  if (neg > 0.95) throw SchemaError("medium: total negative perturbation too close to -1");
  if (m.kind == MediumKind::constant && !m.bumps.empty())
    throw SchemaError("medium: constant medium cannot carry bumps");
  if (m.kind == MediumKind::gaussian_bump && m.bumps.size() != 1)
    throw SchemaError("medium: gaussian_bump carries exactly one bump");
}

namespace {

// chi(|x|/R) with gradient and Hessian; identically 1 for |x| <= R/2.
void cutoff_factor(const Vec& x, double R, double& w, Vec& grad, Mat& hess) {
  const int d = static_cast<int>(x.size());
  const double r = x.norm();
  if (r <= 0.5 * R) {
    w = 1.0;
    grad = Vec::Zero(d);
    hess = Mat::Zero(d, d);
    return;
  }
  if (r >= R) {
    w = 0.0;
    grad = Vec::Zero(d);
    hess = Mat::Zero(d, d);
    return;
  }
  double c, c1, c2;
  plateau_cutoff_derivs(r / R, c, c1, c2);
  const Vec rhat = x / r;
  w = c;
  grad = (c1 / R) * rhat;
  hess = (c2 / (R * R)) * (rhat * rhat.transpose()) +
         (c1 / R) * ((Mat::Identity(d, d) - rhat * rhat.transpose()) / r);
}

}  // namespace

MediumEval eval_medium(const MediumModel& m, const Vec& x) {
  const int d = m.dim;
  MediumEval e;
  e.grad_n2 = Vec::Zero(d);
  e.hess_n2 = Mat::Zero(d, d);
  e.n2 = 1.0;
  if (!m.is_constant() && x.norm() < m.support_radius) {
    double w;
    Vec gw;
    Mat hw;
    cutoff_factor(x, m.support_radius, w, gw, hw);
    for (const auto& b : m.bumps) {
      const Vec u = x - b.center;
      const double s2 = b.sigma * b.sigma;
      const double g = std::exp(-0.5 * u.squaredNorm() / s2);
      const Vec gg = -(g / s2) * u;
      const Mat hg = g * (u * u.transpose() / (s2 * s2)) - (g / s2) * Mat::Identity(d, d);
      e.n2 += b.amplitude * g * w;
      e.grad_n2 += b.amplitude * (gg * w + g * gw);
      e.hess_n2 += b.amplitude * (hg * w + gg * gw.transpose() + gw * gg.transpose() + g * hw);
    }
  }
  e.n = std::sqrt(e.n2);
  return e;
}

double eval_n2(const MediumModel& m, const Vec& x) {
  if (m.is_constant() || x.norm() >= m.support_radius) return 1.0;
  double n2 = 1.0;
  const double r = x.norm();
  const double w = r <= 0.5 * m.support_radius ? 1.0 : plateau_cutoff(r / m.support_radius);
  for (const auto& b : m.bumps) {
    const Vec u = x - b.center;
    n2 += b.amplitude * std::exp(-0.5 * u.squaredNorm() / (b.sigma * b.sigma)) * w;
  }
  return n2;
}

namespace {

const char* kind_name(MediumKind k) {
  switch (k) {
    case MediumKind::constant: return "constant";
    case MediumKind::gaussian_bump: return "gaussian_bump";
    case MediumKind::multi_bump: return "multi_bump";
  }
  return "constant";
}

MediumKind kind_from_name(const std::string& s) {
  if (s == "constant") return MediumKind::constant;
  if (s == "gaussian_bump") return MediumKind::gaussian_bump;
  if (s == "multi_bump") return MediumKind::multi_bump;
  throw SchemaError("medium: unknown kind '" + s + "'");
}

}  // namespace

MediumModel medium_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("medium: expected an object");
  MediumModel m;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("medium: missing string field 'kind'");
  m.kind = kind_from_name(j["kind"].get<std::string>());
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw SchemaError("medium: missing integer field 'dim'");
  m.dim = j["dim"].get<int>();
  if (!j.contains("R") || !j["R"].is_number())
    throw SchemaError("medium: missing numeric field 'R'");
  m.support_radius = j["R"].get<double>();
  if (j.contains("bumps")) {
    if (!j["bumps"].is_array()) throw SchemaError("medium: 'bumps' must be an array");
    for (const auto& bj : j["bumps"]) {
      GaussianBump b;
      if (!bj.contains("A") || !bj["A"].is_number())
        throw SchemaError("medium: bump missing numeric 'A'");
      if (!bj.contains("sigma") || !bj["sigma"].is_number())
        throw SchemaError("medium: bump missing numeric 'sigma'");
      if (!bj.contains("center") || !bj["center"].is_array())
        throw SchemaError("medium: bump missing array 'center'");
      b.amplitude = bj["A"].get<double>();
      b.sigma = bj["sigma"].get<double>();
      const auto& c = bj["center"];
      b.center = Vec(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i].is_number()) throw SchemaError("medium: bump center entries must be numbers");
        b.center[static_cast<int>(i)] = c[i].get<double>();
      }
      m.bumps.push_back(std::move(b));
    }
  }
  validate_medium(m);
  return m;
}

nlohmann::json medium_to_json(const MediumModel& m) {
  nlohmann::json j;
  j["kind"] = kind_name(m.kind);
  j["dim"] = m.dim;
  j["R"] = m.support_radius;
  j["bumps"] = nlohmann::json::array();
  for (const auto& b : m.bumps) {
    nlohmann::json bj;
    bj["A"] = b.amplitude;
    bj["sigma"] = b.sigma;
    bj["center"] = std::vector<double>(b.center.data(), b.center.data() + b.center.size());
    j["bumps"].push_back(bj);
  }
  return j;
}

EscapeReport certify_nontrapping_report(const MediumModel& m, int samples, double s_max,
                                        std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("certify_nontrapping: samples >= 1");
  if (!(s_max > 0.0)) throw std::invalid_argument("certify_nontrapping: s_max > 0");
  const double R = m.support_radius;
  EscapeReport rep;
  rep.samples = samples;
  rep.s_max = s_max;
  rep.seed = seed;
  rep.ok = true;
  CounterRng rng(seed);
  const double step = 1e-3 * std::max(R, 1.0);
  for (int i = 0; i < samples; ++i) {
    EscapeReport::RaySample rs;
    rs.x0 = rng.in_ball(m.dim, 0.999 * R);
    rs.p0 = eval_n(m, rs.x0) * rng.on_sphere(m.dim);
    const Bicharacteristic ray =
        integrate_with_refinement(m, rs.x0, rs.p0, 0.0, s_max, step);
    for (int n = 0; n < ray.size(); ++n) {
      if (ray.x[n].norm() > 2.0 * R) {
        rs.escaped = true;
        rs.escape_s = ray.s_grid[n];
        break;
      }
    }
    if (!rs.escaped) rep.ok = false;
    rep.L = std::max(rep.L, rs.escape_s);
    rep.rays.push_back(std::move(rs));
  }
  return rep;
}

EscapeReport certify_nontrapping(const MediumModel& m, int samples, double s_max,
                                 std::uint64_t seed) {
  EscapeReport rep = certify_nontrapping_report(m, samples, s_max, seed);
  if (!rep.ok)
    throw NonTrappingUncertain("a sampled ray stayed inside |x| <= 2R up to s_max=" +
                               std::to_string(s_max));
  return rep;
}

}  // namespace gbeam
