#include "gbeam/hankel.hpp"

#include <cmath>

#include "gbeam/errors.hpp"

namespace gbeam {

namespace detail {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr int kMaxSeriesTerms = 64;

}  // namespace

cplx hankel1_0_series(cplx z) {
  const cplx zeta = 0.25 * z * z;
  // J0 = sum (-zeta)^m / (m!)^2 ; the Y0 sum carries harmonic numbers.
  cplx term(1.0, 0.0);
  cplx j0 = term;
  cplx ysum = 0.0;
  double harmonic = 0.0;
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
    term *= -zeta / static_cast<double>(m * m);
    harmonic += 1.0 / m;
    j0 += term;
    // (-1)^{m+1} H_m zeta^m/(m!)^2 = -H_m * term
    ysum -= harmonic * term;
    if (std::abs(term) < 1e-18 * (std::abs(j0) + 1.0) && m > 6) break;
  }
  const cplx y0 = (2.0 / M_PI) * ((std::log(0.5 * z) + kEulerGamma) * j0 + ysum);
  return j0 + iu * y0;
}

cplx hankel1_1_series(cplx z) {
  const cplx zeta = 0.25 * z * z;
  // J1 = (z/2) sum (-zeta)^m / (m!(m+1)!)
  cplx term(1.0, 0.0);  // m = 0 term of the inner sum
  cplx jsum = term;
  cplx ysum = term;  // carries (H_m + H_{m+1}) weights; H_0 + H_1 = 1
  double hm = 0.0, hm1 = 1.0;
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
    term *= -zeta / static_cast<double>(m * (m + 1));
    hm += 1.0 / m;
    hm1 += 1.0 / (m + 1);
    jsum += term;
    ysum += (hm + hm1) * term;
    if (std::abs(term) < 1e-18 * (std::abs(jsum) + 1.0) && m > 6) break;
  }
  const cplx j1 = 0.5 * z * jsum;
  const cplx y1 = (2.0 / M_PI) * (std::log(0.5 * z) + kEulerGamma) * j1 - 2.0 / (M_PI * z) -
                  (0.5 * z / M_PI) * ysum;
  return j1 + iu * y1;
}

namespace {

// H_nu^(1)(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum i^m a_m(nu) / z^m,
// a_m(nu) = prod_{j=1..m} (4 nu^2 - (2j-1)^2) / (m! 8^m), truncated at the
// smallest term.
cplx hankel_asymptotic(double nu, cplx z) {
  cplx sum(1.0, 0.0);
  cplx term(1.0, 0.0);
  double prev = 1.0;
  const double nu2 = 4.0 * nu * nu;
  for (int m = 1; m < 40; ++m) {
    const double odd = 2.0 * m - 1.0;
    term *= (nu2 - odd * odd) / (8.0 * m) * (iu / z);
    const double mag = std::abs(term);
    if (mag > prev) break;  // past optimal truncation
    sum += term;
    prev = mag;
    if (mag < 1e-17) break;
  }
  const cplx chi = z - (0.5 * nu + 0.25) * M_PI;
  return std::sqrt(2.0 / (M_PI * z)) * std::exp(iu * chi) * sum;
}

}  // namespace

cplx hankel1_0_asymptotic(cplx z) { return hankel_asymptotic(0.0, z); }
cplx hankel1_1_asymptotic(cplx z) { return hankel_asymptotic(1.0, z); }

}  // namespace detail

cplx hankel1_0(cplx z) {
  if (std::abs(z) == 0.0) throw SingularPoint("hankel1_0: z = 0");
  return std::abs(z) <= kHankelSwitch ? detail::hankel1_0_series(z)
                                      : detail::hankel1_0_asymptotic(z);
}

cplx hankel1_1(cplx z) {
  if (std::abs(z) == 0.0) throw SingularPoint("hankel1_1: z = 0");
  return std::abs(z) <= kHankelSwitch ? detail::hankel1_1_series(z)
                                      : detail::hankel1_1_asymptotic(z);
}

}  // namespace gbeam
