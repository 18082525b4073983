#pragma once

#include "gbeam/types.hpp"

namespace gbeam {

// First-kind Hankel functions of order 0 and 1 for complex argument with
// Im z >= 0 and small arg z (the k_alpha regime), built from the ascending
// power series for |z| <= kHankelSwitch and the large-argument expansion
// beyond. The two branches agree to better than 1e-10 across the overlap
// band around the switch radius.
inline constexpr double kHankelSwitch = 12.0;

cplx hankel1_0(cplx z);
cplx hankel1_1(cplx z);

namespace detail {
cplx hankel1_0_series(cplx z);
cplx hankel1_1_series(cplx z);
cplx hankel1_0_asymptotic(cplx z);
cplx hankel1_1_asymptotic(cplx z);
}  // namespace detail

}  // namespace gbeam
