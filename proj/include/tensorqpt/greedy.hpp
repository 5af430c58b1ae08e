#ifndef TENSORQPT_GREEDY_HPP
#define TENSORQPT_GREEDY_HPP

#include <vector>

#include "tensorqpt/kernel.hpp"

namespace tensorqpt {

struct GreedySelection {
  std::vector<double> points;
  // max of the power function over the candidate grid after each selection
  std::vector<double> power_max_after;
  bool saturated = false;  // power function fell below floor before n points
};

/// Deterministic P-greedy sequence on a closed uniform candidate grid:
/// the first point maximizes K(x,x), each next point maximizes the power
/// function (worst-case pointwise interpolation error); ties break to the
/// smallest coordinate. Returns fewer points with `saturated` set when the
/// power function drops below 1e-14 everywhere.
GreedySelection select_points_greedy(const Kernel& kernel, int n,
                                     int grid_size = 1025);

}  // namespace tensorqpt

#endif
