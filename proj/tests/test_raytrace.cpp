#include <doctest.h>

#include <cmath>

#include "gbeam/errors.hpp"
#include "gbeam/raytrace.hpp"
#include "gbeam/rng.hpp"

using namespace gbeam;

namespace {

Vec e1(int d) {
  Vec v = Vec::Zero(d);
  v[0] = 1.0;
  return v;
}

// Direct stiff integration of the Riccati equation M' = D^2(n^2) - 2 M^2
// (the independent oracle for the frame representation).
CMat riccati_oracle(const MediumModel& m, const Bicharacteristic& ray, CMat M, double s_to,
                    double h) {
  double s = 0.0;
  const auto rhs = [&](double ss, const CMat& Mc) -> CMat {
    return eval_medium(m, ray.position(ss)).hess_n2.cast<cplx>() - 2.0 * Mc * Mc;
  };
  const int n = static_cast<int>(std::ceil(std::abs(s_to) / h));
  const double dt = s_to / n;
  for (int i = 0; i < n; ++i) {
    const CMat k1 = rhs(s, M);
    const CMat k2 = rhs(s + 0.5 * dt, M + 0.5 * dt * k1);
    const CMat k3 = rhs(s + 0.5 * dt, M + 0.5 * dt * k2);
    const CMat k4 = rhs(s + dt, M + dt * k3);
    M += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += dt;
  }
  return M;
}

}  // namespace

TEST_CASE("constant medium ray is the straight line of the plane-source example") {
  const MediumModel m = make_constant_medium(3, 1.0);
  const Bicharacteristic ray =
      integrate_bicharacteristic(m, Vec::Zero(3), e1(3), 0.0, 2.0, 1e-3);
  for (int i = 0; i < ray.size(); i += 100) {
    const double s = ray.s_grid[i];
    CHECK(std::abs(ray.x[i][0] - 2.0 * s) < 1e-12);
    CHECK(std::abs(ray.x[i][1]) < 1e-15);
    CHECK((ray.p[i] - e1(3)).norm() < 1e-15);
  }
  // dense output reproduces the line between samples
  CHECK(std::abs(ray.position(0.7351)[0] - 2.0 * 0.7351) < 1e-12);
}

TEST_CASE("Hamiltonian drift stays below tolerance in a bump medium") {
  const MediumModel m = make_gaussian_bump_medium(2, 0.5, 0.25, Vec::Zero(2), 1.0);
  Vec x0(2);
  x0 << -0.9, 0.13;
  const Vec p0 = eval_n(m, x0) * e1(2);
  const Bicharacteristic ray = integrate_bicharacteristic(m, x0, p0, 0.0, 2.0, 1e-3);
  CHECK(ray.max_hamiltonian_drift() < 1e-9);

  // halved-step self-consistency oracle for the endpoint
  const Bicharacteristic fine = integrate_bicharacteristic(m, x0, p0, 0.0, 2.0, 5e-4);
  CHECK((ray.x.back() - fine.x.back()).norm() < 1e-11);
  CHECK((ray.p.back() - fine.p.back()).norm() < 1e-11);
}

TEST_CASE("coarse steps raise StepTooLarge and refinement recovers") {
  const MediumModel m = make_gaussian_bump_medium(2, 0.6, 0.15, Vec::Zero(2), 1.0);
  Vec x0(2);
  x0 << -0.8, 0.05;
  const Vec p0 = eval_n(m, x0) * e1(2);
  CHECK_THROWS_AS(integrate_bicharacteristic(m, x0, p0, 0.0, 2.0, 0.1), StepTooLarge);
  const Bicharacteristic ray = integrate_with_refinement(m, x0, p0, 0.0, 2.0, 0.1);
  CHECK(ray.max_hamiltonian_drift() < 1e-9);
}

TEST_CASE("time reversal: x(s;-p0) = x(-s;p0)") {
  const MediumModel m = make_gaussian_bump_medium(2, 0.5, 0.25, Vec::Zero(2), 1.0);
  Vec x0(2);
  x0 << -0.4, 0.21;
  Vec dir(2);
  dir << 0.8, 0.6;
  const Vec p0 = eval_n(m, x0) * dir;
  const Bicharacteristic fwd = integrate_bicharacteristic(m, x0, -p0, 0.0, 1.0, 1e-3);
  const Bicharacteristic bwd = integrate_bicharacteristic(m, x0, p0, -1.0, 0.0, 1e-3);
  for (double s : {0.25, 0.5, 0.99}) {
    CHECK((fwd.position(s) - bwd.position(-s)).norm() < 1e-12);
    CHECK((fwd.momentum(s) + bwd.momentum(-s)).norm() < 1e-12);
  }
}

TEST_CASE("variational frame reproduces the closed-form constant-medium Hessian") {
  const MediumModel m = make_constant_medium(3, 1.0);
  const Bicharacteristic ray =
      integrate_bicharacteristic(m, Vec::Zero(3), e1(3), 0.0, 2.5, 1e-3);
  const Mat P = Mat::Identity(3, 3) - e1(3) * e1(3).transpose();
  const CMat C0 = iu * P.cast<cplx>();
  const VariationalFrame fr = integrate_variational(m, ray, CMat::Identity(3, 3), C0);
  for (int i = 0; i < ray.size(); i += 250) {
    const double s = ray.s_grid[i];
    CHECK((fr.C[i] - C0).norm() < 1e-13);
    const CMat Bexact = CMat::Identity(3, 3) + 2.0 * iu * s * P.cast<cplx>();
    CHECK((fr.B[i] - Bexact).norm() < 1e-12);
    const CMat Mexact = (iu / (1.0 + 2.0 * iu * s)) * P.cast<cplx>();
    CHECK((fr.M_at(i) - Mexact).norm() < 1e-12);
  }
  // dense output between samples
  const CMat Mdense = fr.M_dense(ray, 1.23456);
  const CMat Mex = (iu / (1.0 + 2.0 * iu * 1.23456)) * P.cast<cplx>();
  CHECK((Mdense - Mex).norm() < 1e-11);
}

TEST_CASE("zero initial Hessian stays zero in a constant medium") {
  const MediumModel m = make_constant_medium(2, 1.0);
  const Bicharacteristic ray =
      integrate_bicharacteristic(m, Vec::Zero(2), e1(2), 0.0, 1.0, 1e-3);
  const VariationalFrame fr =
      integrate_variational(m, ray, CMat::Identity(2, 2), CMat::Zero(2, 2));
  for (int i = 0; i < ray.size(); i += 100) CHECK(fr.M_at(i).norm() < 1e-15);
}

TEST_CASE("frame Hessian agrees with direct Riccati integration in a bump medium") {
  const MediumModel m = make_gaussian_bump_medium(2, 0.5, 0.25, Vec::Zero(2), 1.0);
  Vec x0(2);
  x0 << -0.6, 0.07;
  const Vec p0 = eval_n(m, x0) * e1(2);
  const Bicharacteristic ray = integrate_bicharacteristic(m, x0, p0, -1.0, 1.0, 1e-3);
  const Mat P = Mat::Identity(2, 2) - (p0 / p0.norm()) * (p0 / p0.norm()).transpose();
  const Vec b = 0.5 * eval_medium(m, x0).grad_n2;
  const double q2 = p0.squaredNorm();
  const Mat S0 = (b * p0.transpose() + p0 * b.transpose()) / q2 -
                 (p0.dot(b) / (q2 * q2)) * (p0 * p0.transpose());
  const CMat M0 = S0.cast<cplx>() + iu * P.cast<cplx>();
  const VariationalFrame fr = integrate_variational(m, ray, CMat::Identity(2, 2), M0);
  for (double s : {-1.0, -0.5, 0.5, 1.0}) {
    const CMat Mdirect = riccati_oracle(m, ray, M0, s, 1e-4);
    CHECK((fr.M_dense(ray, s) - Mdirect).norm() < 1e-6);
  }
}

TEST_CASE("frame invariants: symmetry, compatibility, transverse positivity") {
  const MediumModel m = make_gaussian_bump_medium(2, 0.5, 0.25, Vec::Zero(2), 1.0);
  Vec x0(2);
  x0 << -0.85, -0.1;
  const Vec p0 = eval_n(m, x0) * e1(2);
  const Bicharacteristic ray = integrate_bicharacteristic(m, x0, p0, 0.0, 2.0, 1e-3);
  const Vec b = 0.5 * eval_medium(m, x0).grad_n2;
  const double q2 = p0.squaredNorm();
  const Mat S0 = (b * p0.transpose() + p0 * b.transpose()) / q2 -
                 (p0.dot(b) / (q2 * q2)) * (p0 * p0.transpose());
  const Mat P = Mat::Identity(2, 2) - (p0 * p0.transpose()) / q2;
  const CMat M0 = S0.cast<cplx>() + iu * P.cast<cplx>();
  const VariationalFrame fr = integrate_variational(m, ray, CMat::Identity(2, 2), M0);
  for (int i = 0; i < ray.size(); i += 50) {
    const CMat M = fr.M_at(i);
    CHECK((M - M.transpose()).norm() < 1e-8);
    const Vec xdot = 2.0 * ray.p[i];
    const Vec pdot = eval_medium(m, ray.x[i]).grad_n2;
    CHECK((M * xdot.cast<cplx>() - pdot.cast<cplx>()).norm() < 1e-8);
    // Im M positive definite on xdot^perp (d=2: a single direction)
    Vec t(2);
    t << -xdot[1], xdot[0];
    t.normalize();
    const CMat imM = (M - M.adjoint()) / (2.0 * iu);
    const double q = (t.cast<cplx>().adjoint() * imM * t.cast<cplx>())(0, 0).real();
    CHECK(q > 0.0);
    // symplectic pairing B^T C - C^T B stays at its (zero) initial value
    const CMat pair = fr.B[i].transpose() * fr.C[i] - fr.C[i].transpose() * fr.B[i];
    CHECK(pair.norm() < 1e-8);
  }
}

TEST_CASE("real focusing data trips the singular-frame guard") {
  const MediumModel m = make_constant_medium(2, 1.0);
  const Bicharacteristic ray =
      integrate_bicharacteristic(m, Vec::Zero(2), e1(2), 0.0, 1.0, 1e-3);
  // Inadmissible (real) M0: B(s) = I + 2 s M0 becomes singular at s = 1/2.
  const CMat M0 = -CMat::Identity(2, 2);
  CHECK_THROWS_AS(integrate_variational(m, ray, CMat::Identity(2, 2), M0), SingularFrame);
}
