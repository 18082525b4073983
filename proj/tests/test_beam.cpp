#include <doctest.h>

#include <cmath>

#include "gbeam/beam.hpp"
#include "gbeam/errors.hpp"
#include "gbeam/mollifier.hpp"
#include "gbeam/rng.hpp"
#include "gbeam/source.hpp"

using namespace gbeam;

namespace {

Vec e1(int d) {
  Vec v = Vec::Zero(d);
  v[0] = 1.0;
  return v;
}

CMat transverse_projector(int d) {
  return (Mat::Identity(d, d) - e1(d) * e1(d).transpose()).cast<cplx>();
}

// The plane-source fixture: constant medium d=3, M0 = iP.
BeamData example5_beam(double alpha = 0.0, double eta = 1.0) {
  const MediumModel m = make_constant_medium(3, 1.0);
  return build_first_order_beam(m, Vec::Zero(3), e1(3), iu * transverse_projector(3), alpha,
                                -0.2, 2.2, 1e-3, eta);
}

// Curved-ray fixture in a small bump medium (the residual-scaling geometry).
BeamData bump_beam(double eta = 0.7) {
  Vec c(2);
  c << 0.15, 0.05;
  const MediumModel m = make_gaussian_bump_medium(2, 0.2, 0.15, c, 0.4);
  Vec z(1);
  z << 0.05;
  SourceSpec spec = make_source_spec(Vec::Constant(1, -0.16), Vec::Constant(1, 0.16), 0.16, 50.0);
  return build_beam_pair(m, z, spec, 0.0, eta, 1e-3).forward;
}

// Independent transport oracle: RK4 on A0' = -(tr M + alpha n^2) A0 with the
// frame's dense Hessian.
cplx transport_amplitude_oracle(const BeamData& beam, double s_to, double h) {
  cplx a = 1.0;
  double s = 0.0;
  const auto rhs = [&](double ss, cplx av) -> cplx {
    const CMat M = beam.frame.M_dense(beam.ray, ss);
    const double n2 = eval_n2(beam.medium, beam.ray.position(ss));
    return -(M.trace() + beam.alpha * n2) * av;
  };
  const int n = static_cast<int>(std::ceil(std::abs(s_to) / h));
  const double dt = s_to / n;
  for (int i = 0; i < n; ++i) {
    const cplx k1 = rhs(s, a);
    const cplx k2 = rhs(s + 0.5 * dt, a + 0.5 * dt * k1);
    const cplx k3 = rhs(s + 0.5 * dt, a + 0.5 * dt * k2);
    const cplx k4 = rhs(s + dt, a + dt * k3);
    a += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += dt;
  }
  return a;
}

// 4th-order finite-difference application of L_n = Delta + (i alpha k + k^2) n^2.
cplx fd_helmholtz_apply(const BeamData& beam, const Vec& x, double k, double h) {
  const int d = beam.medium.dim;
  const cplx u0 = eval_beam(beam, x, k).value;
  cplx lap = 0.0;
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xpp = x, xm = x, xmm = x;
    xp[j] += h;
    xpp[j] += 2 * h;
    xm[j] -= h;
    xmm[j] -= 2 * h;
    const cplx upp = eval_beam(beam, xpp, k).value;
    const cplx up = eval_beam(beam, xp, k).value;
    const cplx um = eval_beam(beam, xm, k).value;
    const cplx umm = eval_beam(beam, xmm, k).value;
    lap += (-upp + 16.0 * up - 30.0 * u0 + 16.0 * um - umm) / (12.0 * h * h);
  }
  const double n2 = eval_n2(beam.medium, x);
  return lap + (iu * beam.alpha * k + k * k) * n2 * u0;
}

}  // namespace

TEST_CASE("plane-source fixture: S(s) = 2s and A0(s) = (1+2is)^{-1}") {
  const BeamData beam = example5_beam();
  for (int i = 0; i < beam.ray.size(); i += 200) {
    const double s = beam.ray.s_grid[i];
    CHECK(std::abs(beam.S[i] - 2.0 * s) < 1e-12);
    const cplx expected = 1.0 / (1.0 + 2.0 * iu * s);
    CHECK(std::abs(beam.A0[i] - expected) < 1e-12);
  }
  CHECK(std::abs(beam.amplitude_on_ray(0.987) - 1.0 / (1.0 + 2.0 * iu * 0.987)) < 1e-11);
}

TEST_CASE("absorption multiplies the fixture amplitude by e^{-alpha s}") {
  const double alpha = 0.3;
  const BeamData beam = example5_beam(alpha);
  for (double s : {0.4, 1.0, 2.0}) {
    const cplx expected = std::exp(-alpha * s) / (1.0 + 2.0 * iu * s);
    CHECK(std::abs(beam.amplitude_on_ray(s) - expected) < 1e-11);
  }
}

TEST_CASE("determinant amplitude matches the transport-ODE oracle") {
  SUBCASE("constant medium") {
    const BeamData beam = example5_beam(0.2);
    for (double s : {0.5, 1.5, 2.1}) {
      const cplx oracle = transport_amplitude_oracle(beam, s, 1e-3);
      CHECK(std::abs(beam.amplitude_on_ray(s) - oracle) / std::abs(oracle) < 1e-8);
    }
  }
  SUBCASE("bump medium") {
    const BeamData beam = bump_beam();
    for (double s : {0.3, 0.8, beam.ray.s_back() * 0.95}) {
      const cplx oracle = transport_amplitude_oracle(beam, s, 5e-4);
      CHECK(std::abs(beam.amplitude_on_ray(s) - oracle) / std::abs(oracle) < 1e-8);
    }
  }
}

TEST_CASE("d/ds log det B = 2 tr M identity holds discretely") {
  const BeamData beam = bump_beam();
  const auto& ray = beam.ray;
  for (int i = 100; i + 100 < ray.size(); i += 300) {
    const double h = ray.s_grid[i + 1] - ray.s_grid[i - 1];
    const cplx dlog = (std::log(beam.frame.B[i + 1].determinant()) -
                       std::log(beam.frame.B[i - 1].determinant())) / h;
    const cplx trM = beam.frame.M_at(i).trace();
    CHECK(std::abs(dlog - 2.0 * trM) < 1e-5);
  }
}

TEST_CASE("projection on a straight ray") {
  const BeamData beam = example5_beam(0.0, 0.5);
  SUBCASE("orthogonal foot") {
    Vec x(3);
    x << 2.0, 0.3, 0.0;
    const auto proj = project_to_ray(beam, x);
    REQUIRE(proj.has_value());
    CHECK(proj->s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(proj->dist == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("outside the tube") {
    Vec x(3);
    x << 2.0, 0.6, 0.0;
    CHECK_FALSE(project_to_ray(beam, x).has_value());
  }
}

TEST_CASE("projection on a curved ray: orthogonality residual and argmin agreement") {
  const BeamData beam = bump_beam();
  CounterRng rng(99);
  for (int t = 0; t < 20; ++t) {
    const double s = rng.uniform(0.1, 0.8 * beam.ray.s_back());
    Vec y = rng.in_ball(2, 0.8 * beam.eta);
    const Vec tvec = beam.ray.velocity(s).normalized();
    y -= y.dot(tvec) * tvec;
    const Vec x = beam.ray.position(s) + y;
    const auto proj = project_to_ray(beam, x);
    REQUIRE(proj.has_value());
    const double resid =
        std::abs((x - beam.ray.position(proj->s)).dot(beam.ray.velocity(proj->s)));
    CHECK(resid < 1e-10);
    // brute-force argmin oracle on a dense s grid
    double best = 1e300, best_s = 0.0;
    const double lo = beam.ray.s_front(), hi = beam.ray.s_back();
    for (int i = 0; i <= 20000; ++i) {
      const double ss = lo + (hi - lo) * i / 20000.0;
      const double dd = (x - beam.ray.position(ss)).norm();
      if (dd < best) {
        best = dd;
        best_s = ss;
      }
    }
    CHECK(std::abs(best_s - proj->s) < (hi - lo) / 20000.0 + 1e-9);
  }
}

TEST_CASE("beam value at the center is 1") {
  const BeamData beam = example5_beam();
  const BeamValue bv = eval_beam(beam, Vec::Zero(3), 37.0);
  CHECK(bv.inside);
  CHECK(std::abs(bv.value - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("plane-source fixture on axis: u = e^{ik}/(1+i)") {
  const BeamData beam = example5_beam();
  Vec x(3);
  x << 1.0, 0.0, 0.0;
  for (double k : {10.0, 100.0}) {
    const cplx expected = std::exp(iu * k) / (1.0 + iu);
    CHECK(std::abs(eval_beam(beam, x, k).value - expected) < 1e-11);
  }
}

TEST_CASE("plane-source fixture phase off axis") {
  const BeamData beam = example5_beam();
  Vec x(3);
  x << 1.0, 0.3, 0.0;
  const BeamValue bv = eval_beam(beam, x, 25.0);
  const cplx expected_phi = 1.0 + iu * 0.09 / (2.0 * (1.0 + iu));
  CHECK(std::abs(bv.phase - expected_phi) < 1e-11);
  CHECK(std::abs(bv.amplitude - 1.0 / (1.0 + iu)) < 1e-11);
}

TEST_CASE("residual coefficients reproduce the symbolic fixture values") {
  const BeamData beam = example5_beam();
  const double x1 = 0.8, yp = 0.25;
  Vec x(3);
  x << x1, yp, 0.0;
  const auto rc = residual_coefficients(beam, x);
  REQUIRE(rc.has_value());
  const cplx den = 1.0 + iu * x1;
  const cplx c2_expected = -std::pow(yp, 4) / (4.0 * std::pow(den, 5));
  const cplx c1_expected = -2.0 * iu * yp * yp / std::pow(den, 4);
  const cplx c0_expected = -2.0 / std::pow(den, 3);
  CHECK(std::abs(rc->c_minus2 - c2_expected) < 1e-10 * std::abs(c2_expected) + 1e-14);
  CHECK(std::abs(rc->c_minus1 - c1_expected) < 1e-7 * std::abs(c1_expected) + 1e-12);
  CHECK(std::abs(rc->c_0 - c0_expected) < 1e-7 * std::abs(c0_expected) + 1e-12);
}

TEST_CASE("residual coefficients vanish on the ray") {
  const BeamData b5 = example5_beam();
  Vec x(3);
  x << 0.9, 0.0, 0.0;
  const auto rc = residual_coefficients(b5, x);
  REQUIRE(rc.has_value());
  CHECK(std::abs(rc->c_minus2) < 1e-12);
  CHECK(std::abs(rc->c_minus1) < 1e-9);
  // on the ray only the Delta a0 term survives
  const double k = 40.0;
  const cplx f = eval_residual_field(b5, x, k);
  CHECK(std::abs(std::abs(f) - std::abs(rc->c_0)) < 1e-8);

  const BeamData bb = bump_beam();
  const Vec xr = bb.ray.position(0.5);
  const auto rcb = residual_coefficients(bb, xr);
  REQUIRE(rcb.has_value());
  CHECK(std::abs(rcb->c_minus2) < 1e-9);
  CHECK(std::abs(rcb->c_minus1) < 1e-7);
}

TEST_CASE("analytic residual matches finite-difference operator application") {
  const BeamData beam = bump_beam();
  const double k = 50.0;
  const double h = (2.0 * M_PI / k) / 128.0;
  CounterRng rng(2024);
  int checked = 0;
  while (checked < 6) {
    const double s = rng.uniform(0.1, 0.7);
    Vec y = rng.in_ball(2, 1.0);
    const Vec tvec = beam.ray.velocity(s).normalized();
    y -= y.dot(tvec) * tvec;
    const double target = rng.uniform(0.5, 1.5) / std::sqrt(k);
    if (y.norm() < 1e-12) continue;
    y *= target / y.norm();
    const Vec x = beam.ray.position(s) + y;
    const auto pg = phase_gradient(beam, x);
    if (!pg || pg->transverse.norm() > 0.4 * beam.eta) continue;
    const auto rc = residual_coefficients(beam, x);
    REQUIRE(rc.has_value());
    const cplx poly = k * k * rc->c_minus2 + k * rc->c_minus1 + rc->c_0;
    if (std::abs(poly / pg->a0) < 0.5) continue;  // relative error needs signal
    const cplx ana = eval_residual_field(beam, x, k);
    const cplx fd = fd_helmholtz_apply(beam, x, k, h);
    CHECK(std::abs(fd - ana) / std::abs(ana) < 1e-3);
    ++checked;
  }
}

TEST_CASE("sup of |f_GB| grows no faster than sqrt(k)") {
  const BeamData beam = bump_beam();
  CounterRng rng(31);
  const auto sup_at = [&](double k) {
    double sup = 0.0;
    for (int t = 0; t < 3000; ++t) {
      const double s = rng.uniform(0.0, beam.ray.s_back());
      Vec y = rng.in_ball(2, 0.5 * beam.eta);
      const Vec tvec = beam.ray.velocity(s).normalized();
      y -= y.dot(tvec) * tvec;
      const Vec x = beam.ray.position(s) + y;
      sup = std::max(sup, std::abs(eval_residual_field(beam, x, k)));
    }
    return sup;
  };
  const double r50 = sup_at(50.0) / std::sqrt(50.0);
  const double r450 = sup_at(450.0) / std::sqrt(450.0);
  CHECK(r450 < 1.35 * r50);
}

TEST_CASE("Taylor-vanishing orders of the residual coefficients") {
  const BeamData beam = bump_beam();
  const double s = 0.45;
  const Vec xs = beam.ray.position(s);
  Vec tvec = beam.ray.velocity(s).normalized();
  Vec nvec(2);
  nvec << -tvec[1], tvec[0];

  std::vector<double> ys, c2s, c1s;
  for (double t = 0.16; t > 0.01; t *= 0.5) {
    const auto rc = residual_coefficients(beam, xs + t * nvec);
    REQUIRE(rc.has_value());
    ys.push_back(std::log(t));
    c2s.push_back(std::log(std::abs(rc->c_minus2)));
    c1s.push_back(std::log(std::abs(rc->c_minus1)));
  }
  const auto slope = [](const std::vector<double>& xv, const std::vector<double>& yv) {
    const int n = static_cast<int>(xv.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
      mx += xv[i];
      my += yv[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < n; ++i) {
      sxy += (xv[i] - mx) * (yv[i] - my);
      sxx += (xv[i] - mx) * (xv[i] - mx);
    }
    return sxy / sxx;
  };
  CHECK(slope(ys, c2s) > 2.7);  // |c_-2| <= C |y|^3
  CHECK(slope(ys, c1s) > 0.9);  // |c_-1| <= C |y|

  // the symmetric plane-source fixture vanishes one order higher (quartic)
  const BeamData b5 = example5_beam();
  std::vector<double> ys5, c2s5;
  for (double t = 0.16; t > 0.01; t *= 0.5) {
    Vec x(3);
    x << 0.8, t, 0.0;
    const auto rc = residual_coefficients(b5, x);
    REQUIRE(rc.has_value());
    ys5.push_back(std::log(t));
    c2s5.push_back(std::log(std::abs(rc->c_minus2)));
  }
  CHECK(slope(ys5, c2s5) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("phase positivity constant is positive over the tube") {
  const BeamData b5 = example5_beam();
  CHECK(phase_positivity_constant(b5, 10000) > 0.0);
  const BeamData bb = bump_beam();
  CHECK(phase_positivity_constant(bb, 10000) > 0.0);
}

TEST_CASE("elementary bound s^p e^{-a s^2} <= (p/e)^{p/2} a^{-p/2} e^{-a s^2/2}") {
  for (int p = 1; p <= 4; ++p) {
    const double cp = std::pow(p / std::exp(1.0), 0.5 * p);
    for (double a : {0.5, 1.0, 5.0, 25.0, 100.0, 400.0}) {
      for (int i = 0; i <= 600; ++i) {
        const double s = 3.0 * i / 600.0;
        const double lhs = std::pow(s, p) * std::exp(-a * s * s);
        const double rhs = cp * std::pow(a, -0.5 * p) * std::exp(-0.5 * a * s * s);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("tube mass of the concentrated Gaussian scales like k^{(1-d)/2}") {
  const BeamData beam = bump_beam();
  const double delta = phase_positivity_constant(beam, 4000);
  REQUIRE(delta > 0.0);
  const double box = 2.0;  // 5R for the small fixture
  std::vector<double> ks = {100.0, 200.0, 400.0, 800.0};
  Vec kv(4), iv(4);
  for (int a = 0; a < 4; ++a) {
    const double k = ks[a];
    const double spacing = 0.02;
    double acc = 0.0;
    const int n = static_cast<int>(std::ceil(2.0 * box / spacing));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec x(2);
        x << -box + (i + 0.5) * spacing, -box + (j + 0.5) * spacing;
        if (x.norm() > box) continue;
        const auto proj = project_to_ray(beam, x);
        if (!proj) continue;
        acc += std::exp(-0.25 * delta * k * proj->dist * proj->dist) * spacing * spacing;
      }
    kv[a] = k;
    iv[a] = acc;
  }
  // least-squares slope in log-log
  Vec lx = kv.array().log(), ly = iv.array().log();
  const double mx = lx.mean(), my = ly.mean();
  const double slope =
      ((lx.array() - mx) * (ly.array() - my)).sum() / (lx.array() - mx).square().sum();
  CHECK(slope < -0.4);
  CHECK(slope > -0.6);
}

TEST_CASE("inadmissible initial Hessians are rejected") {
  const MediumModel m3 = make_constant_medium(3, 1.0);
  CMat M0 = iu * transverse_projector(3);
  SUBCASE("asymmetric") {
    CMat bad = M0;
    bad(0, 1) += 1e-3;
    CHECK_THROWS_AS(
        build_first_order_beam(m3, Vec::Zero(3), e1(3), bad, 0.0, 0.0, 1.0, 1e-3),
        BadInitialHessian);
  }
  SUBCASE("compatibility violated") {
    Vec c(2);
    c << 0.15, 0.05;
    const MediumModel mb = make_gaussian_bump_medium(2, 0.2, 0.15, c, 0.4);
    Vec x0 = Vec::Zero(2);
    const Vec p0 = eval_n(mb, x0) * e1(2);
    // tangential block alone misses the S0 completion when grad n^2 != 0
    const CMat bad = iu * (Mat::Identity(2, 2) - e1(2) * e1(2).transpose()).cast<cplx>();
    CHECK_THROWS_AS(build_first_order_beam(mb, x0, p0, bad, 0.0, 0.0, 1.0, 1e-3),
                    BadInitialHessian);
  }
  SUBCASE("negative transverse imaginary part") {
    CHECK_THROWS_AS(
        build_first_order_beam(m3, Vec::Zero(3), e1(3), -M0, 0.0, 0.0, 1.0, 1e-3),
        BadInitialHessian);
  }
}
