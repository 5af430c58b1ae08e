#ifndef TENSORQPT_MODIFICATION_HPP
#define TENSORQPT_MODIFICATION_HPP

#include "tensorqpt/spectrum.hpp"

namespace tensorqpt {

/// Rank-one modification forcing the eigenfunction-at-a-point condition at
/// t_star: restricts the space to { f : <f, c> = 0 } with
/// c = eta_1 - K(., t_star)/eta_1(t_star), whose reproducing kernel is
/// K~(x,y) = K(x,y) - c(x) c(y)/||c||^2.
///
/// Throws AnchorPointError when |eta_1(t_star)| <= tol_zero, and InputError
/// ("already satisfied") when the correction vanishes identically, i.e. the
/// condition already holds at t_star.
KernelPtr rank_one_modify(const Spectrum& spectrum,
                          const DiscretizedProblem& problem, double t_star);

/// Anchor choice used by the pipeline: argmax |eta_1| over the quadrature
/// nodes.
double default_anchor(const Spectrum& spectrum,
                      const DiscretizedProblem& problem);

}  // namespace tensorqpt

#endif
