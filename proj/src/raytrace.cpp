#include "gbeam/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gbeam/errors.hpp"

namespace gbeam {

namespace {

struct Hermite {
  // Basis values for t in [0,1].
  double h00, h10, h01, h11;      // value weights
  double d00, d10, d01, d11;      // derivative weights (d/dt)
  explicit Hermite(double t) {
    const double t2 = t * t, t3 = t2 * t;
    h00 = 2 * t3 - 3 * t2 + 1;
    h10 = t3 - 2 * t2 + t;
    h01 = -2 * t3 + 3 * t2;
    h11 = t3 - t2;
    d00 = 6 * t2 - 6 * t;
    d10 = 3 * t2 - 4 * t + 1;
    d01 = -6 * t2 + 6 * t;
    d11 = 3 * t2 - 2 * t;
  }
};

void rk4_xp(const MediumModel& m, Vec& x, Vec& p, double h) {
  const auto f = [&m](const Vec& xx) { return eval_medium(m, xx).grad_n2; };
  const Vec k1x = 2.0 * p,          k1p = f(x);
  const Vec k2x = 2.0 * (p + 0.5 * h * k1p), k2p = f(x + 0.5 * h * k1x);
  const Vec k3x = 2.0 * (p + 0.5 * h * k2p), k3p = f(x + 0.5 * h * k2x);
  const Vec k4x = 2.0 * (p + h * k3p),       k4p = f(x + h * k3x);
  x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

}  // namespace

int Bicharacteristic::interval_of(double s) const {
  const int n = size();
  if (n < 2) return 0;
  auto it = std::upper_bound(s_grid.begin(), s_grid.end(), s);
  int i = static_cast<int>(it - s_grid.begin()) - 1;
  return std::clamp(i, 0, n - 2);
}

Vec Bicharacteristic::position(double s) const {
  const int i = interval_of(s);
  const double h = s_grid[i + 1] - s_grid[i];
  const Hermite hm((s - s_grid[i]) / h);
  return hm.h00 * x[i] + hm.h10 * h * (2.0 * p[i]) + hm.h01 * x[i + 1] +
         hm.h11 * h * (2.0 * p[i + 1]);
}

Vec Bicharacteristic::momentum(double s) const {
  const int i = interval_of(s);
  const double h = s_grid[i + 1] - s_grid[i];
  const Hermite hm((s - s_grid[i]) / h);
  const Vec g0 = eval_medium(medium, x[i]).grad_n2;
  const Vec g1 = eval_medium(medium, x[i + 1]).grad_n2;
  return hm.h00 * p[i] + hm.h10 * h * g0 + hm.h01 * p[i + 1] + hm.h11 * h * g1;
}

Vec Bicharacteristic::acceleration(double s) const {
  const int i = interval_of(s);
  const double h = s_grid[i + 1] - s_grid[i];
  const Hermite hm((s - s_grid[i]) / h);
  const Vec g0 = eval_medium(medium, x[i]).grad_n2;
  const Vec g1 = eval_medium(medium, x[i + 1]).grad_n2;
  // x'' = 2 p'(s), from the derivative of the Hermite interpolant of p.
  return (2.0 / h) * (hm.d00 * p[i] + hm.d10 * h * g0 + hm.d01 * p[i + 1] + hm.d11 * h * g1);
}

double Bicharacteristic::max_hamiltonian_drift() const {
  double drift = 0.0;
  for (int i = 0; i < size(); ++i)
    drift = std::max(drift, std::abs(hamiltonian(medium, x[i], p[i]) - H0));
  return drift;
}

Bicharacteristic integrate_bicharacteristic(const MediumModel& m, const Vec& x0, const Vec& p0,
                                            double s_lo, double s_hi, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate_bicharacteristic: step > 0");
  if (s_lo > 0.0 || s_hi < 0.0 || s_hi <= s_lo)
    throw std::invalid_argument("integrate_bicharacteristic: need s_lo <= 0 <= s_hi");
  const double H0 = hamiltonian(m, x0, p0);
  if (std::abs(H0) > 1e-8 * (1.0 + p0.squaredNorm()))
    throw std::invalid_argument("integrate_bicharacteristic: |p0| = n(x0) required (H != 0)");

  const int n_back = s_lo < 0.0 ? static_cast<int>(std::ceil(-s_lo / step - 1e-12)) : 0;
  const int n_fwd = s_hi > 0.0 ? static_cast<int>(std::ceil(s_hi / step - 1e-12)) : 0;
  const double h_back = n_back > 0 ? -s_lo / n_back : 0.0;
  const double h_fwd = n_fwd > 0 ? s_hi / n_fwd : 0.0;

  Bicharacteristic ray;
  ray.medium = m;
  ray.H0 = H0;
  ray.z = x0;
  ray.origin = n_back;
  const int total = n_back + n_fwd + 1;
  ray.s_grid.resize(total);
  ray.x.resize(total);
  ray.p.resize(total);
  ray.s_grid[n_back] = 0.0;
  ray.x[n_back] = x0;
  ray.p[n_back] = p0;

  Vec xx = x0, pp = p0;
  for (int i = 1; i <= n_back; ++i) {
    rk4_xp(m, xx, pp, -h_back);
    ray.s_grid[n_back - i] = -i * h_back;
    ray.x[n_back - i] = xx;
    ray.p[n_back - i] = pp;
  }
  xx = x0;
  pp = p0;
  for (int i = 1; i <= n_fwd; ++i) {
    rk4_xp(m, xx, pp, h_fwd);
    ray.s_grid[n_back + i] = i * h_fwd;
    ray.x[n_back + i] = xx;
    ray.p[n_back + i] = pp;
  }

  if (ray.max_hamiltonian_drift() > kHamiltonianDriftTol * (1.0 + std::abs(H0)))
    throw StepTooLarge("Hamiltonian drift exceeds tolerance at step " + std::to_string(step));
  return ray;
}

Bicharacteristic integrate_with_refinement(const MediumModel& m, const Vec& x0, const Vec& p0,
                                           double s_lo, double s_hi, double step,
                                           int max_halvings) {
  for (int attempt = 0;; ++attempt) {
    try {
      return integrate_bicharacteristic(m, x0, p0, s_lo, s_hi, step);
    } catch (const StepTooLarge&) {
      if (attempt >= max_halvings) throw;
      step *= 0.5;
    }
  }
}

Bicharacteristic integrate_to_radius(const MediumModel& m, const Vec& x0, const Vec& p0,
                                     double s_lo, double r_stop, double step, double s_cap) {
  // Crude initial guess from straight-line travel, then extend.
  double s_hi = std::max(1.0, (r_stop + x0.norm()) / std::max(2.0 * m.min_index(), 1e-6));
  for (;;) {
    Bicharacteristic ray = integrate_with_refinement(m, x0, p0, s_lo, s_hi, step);
    if (ray.x.back().norm() >= r_stop) return ray;
    if (s_hi >= s_cap)
      throw TrajectoryFailure("ray failed to reach |x| = " + std::to_string(r_stop) +
                              " before s = " + std::to_string(s_cap));
    s_hi = std::min(2.0 * s_hi, s_cap);
  }
}

CMat VariationalFrame::M_at(int i) const {
  return C[i] * B[i].inverse();
}

namespace {

CMat hermite_mat(const std::vector<CMat>& v, const std::vector<CMat>& dv, double h, double t,
                 int i) {
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * v[i] + (h10 * h) * dv[0] + h01 * v[i + 1] + (h11 * h) * dv[1];
}

}  // namespace

CMat VariationalFrame::B_dense(const Bicharacteristic& ray, double s) const {
  const int i = ray.interval_of(s);
  const double h = ray.s_grid[i + 1] - ray.s_grid[i];
  const std::vector<CMat> d = {2.0 * C[i], 2.0 * C[i + 1]};
  return hermite_mat(B, d, h, (s - ray.s_grid[i]) / h, i);
}

CMat VariationalFrame::C_dense(const Bicharacteristic& ray, double s) const {
  const int i = ray.interval_of(s);
  const double h = ray.s_grid[i + 1] - ray.s_grid[i];
  const CMat H0 = eval_medium(ray.medium, ray.x[i]).hess_n2.cast<cplx>();
  const CMat H1 = eval_medium(ray.medium, ray.x[i + 1]).hess_n2.cast<cplx>();
  const std::vector<CMat> d = {H0 * B[i], H1 * B[i + 1]};
  return hermite_mat(C, d, h, (s - ray.s_grid[i]) / h, i);
}

CMat VariationalFrame::M_dense(const Bicharacteristic& ray, double s) const {
  return C_dense(ray, s) * B_dense(ray, s).inverse();
}

namespace {

struct FrameState {
  Vec x, p;
  CMat B, C;
};

void rk4_frame(const MediumModel& m, FrameState& st, double h) {
  struct Deriv {
    Vec dx, dp;
    CMat dB, dC;
  };
  const auto f = [&m](const FrameState& s) {
    const MediumEval e = eval_medium(m, s.x);
    Deriv d;
    d.dx = 2.0 * s.p;
    d.dp = e.grad_n2;
    d.dB = 2.0 * s.C;
    d.dC = e.hess_n2.cast<cplx>() * s.B;
    return d;
  };
  const auto advance = [](const FrameState& s, const Deriv& d, double a) {
    FrameState r;
    r.x = s.x + a * d.dx;
    r.p = s.p + a * d.dp;
    r.B = s.B + a * d.dB;
    r.C = s.C + a * d.dC;
    return r;
  };
  const Deriv k1 = f(st);
  const Deriv k2 = f(advance(st, k1, 0.5 * h));
  const Deriv k3 = f(advance(st, k2, 0.5 * h));
  const Deriv k4 = f(advance(st, k3, h));
  st.x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  st.p += (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  st.B += (h / 6.0) * (k1.dB + 2.0 * k2.dB + 2.0 * k3.dB + k4.dB);
  st.C += (h / 6.0) * (k1.dC + 2.0 * k2.dC + 2.0 * k3.dC + k4.dC);
}

}  // namespace

VariationalFrame integrate_variational(const MediumModel& m, const Bicharacteristic& ray,
                                       const CMat& B0, const CMat& C0) {
  const int n = ray.size();
  if (std::abs(B0.determinant()) < kSingularFrameTol)
    throw std::invalid_argument("integrate_variational: B0 must be invertible");
  VariationalFrame fr;
  fr.B.resize(n);
  fr.C.resize(n);
  fr.B[ray.origin] = B0;
  fr.C[ray.origin] = C0;

  FrameState st{ray.x[ray.origin], ray.p[ray.origin], B0, C0};
  for (int i = ray.origin + 1; i < n; ++i) {
    rk4_frame(m, st, ray.s_grid[i] - ray.s_grid[i - 1]);
    fr.B[i] = st.B;
    fr.C[i] = st.C;
  }
  st = FrameState{ray.x[ray.origin], ray.p[ray.origin], B0, C0};
  for (int i = ray.origin - 1; i >= 0; --i) {
    rk4_frame(m, st, ray.s_grid[i] - ray.s_grid[i + 1]);
    fr.B[i] = st.B;
    fr.C[i] = st.C;
  }

  for (int i = 0; i < n; ++i) {
    if (std::abs(fr.B[i].determinant()) < kSingularFrameTol)
      throw SingularFrame("det B vanished at s = " + std::to_string(ray.s_grid[i]));
  }
  return fr;
}

void write_ray_csv(const Bicharacteristic& ray, const std::string& path,
                   const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  const int d = ray.medium.dim;
  out << "s";
  for (int j = 0; j < d; ++j) out << ",x" << (j + 1);
  for (int j = 0; j < d; ++j) out << ",p" << (j + 1);
  out << ",H\n";
  char buf[64];
  for (int i = 0; i < ray.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ray.s_grid[i]);
    out << buf;
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", ray.x[i][j]);
      out << buf;
    }
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", ray.p[i][j]);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g", hamiltonian(ray.medium, ray.x[i], ray.p[i]));
    out << buf << "\n";
  }
}

}  // namespace gbeam
