#pragma once

#include <Eigen/Dense>
#include <complex>

namespace gbeam {

using cplx = std::complex<double>;
using Vec  = Eigen::VectorXd;
using Mat  = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx iu{0.0, 1.0};

// Non-conjugated dot product a·b = Σ a_i b_i (Eigen's .dot conjugates the
// left factor for complex types).
inline cplx bilinear_dot(const CVec& a, const CVec& b) {
  return (a.array() * b.array()).sum();
}

inline cplx bilinear_dot(const CVec& a, const Vec& b) {
  return (a.array() * b.cast<cplx>().array()).sum();
}

}  // namespace gbeam
