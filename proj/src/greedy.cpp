#include "tensorqpt/greedy.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace tensorqpt {

GreedySelection select_points_greedy(const Kernel& kernel, int n,
                                     int grid_size) {
  if (n < 1) throw InputError("select_points_greedy: n must be >= 1");
  if (grid_size < 2) throw InputError("select_points_greedy: grid too small");

  const Interval dom = kernel.domain();
  const int nc = grid_size;
  std::vector<double> grid(nc);
  for (int i = 0; i < nc; ++i) {
    grid[i] = dom.lo + dom.length() * i / (nc - 1);
  }

  Eigen::VectorXd power_sq(nc);
  for (int i = 0; i < nc; ++i) power_sq(i) = kernel.eval(grid[i], grid[i]);
  const double d0 = power_sq.maxCoeff();
  // Numerical floor: the 1e-14 power threshold, widened to the cancellation
  // noise scale of the squared updates.
  const double floor_sq = std::max(1e-28, 1e-13 * std::max(1.0, d0));

  GreedySelection out;
  // Newton basis columns over the candidate grid.
  Eigen::MatrixXd newton(nc, std::min(n, nc));
  std::vector<int> chosen;

  for (int step = 0; step < n; ++step) {
    int best = 0;
    double best_val = power_sq(0);
    for (int i = 1; i < nc; ++i) {
      if (power_sq(i) > best_val) {
        best_val = power_sq(i);
        best = i;
      }
    }
    if (best_val <= floor_sq) {
      out.saturated = true;
      break;
    }
    Eigen::VectorXd col(nc);
    for (int i = 0; i < nc; ++i) col(i) = kernel.eval(grid[i], grid[best]);
    if (step > 0) {
      col.noalias() -= newton.leftCols(step) *
                       newton.row(best).head(step).transpose();
    }
    col /= std::sqrt(best_val);
    newton.col(step) = col;
    power_sq.array() -= col.array().square();
    power_sq = power_sq.cwiseMax(0.0);
    power_sq(best) = 0.0;
    chosen.push_back(best);
    out.points.push_back(grid[best]);
    out.power_max_after.push_back(std::sqrt(power_sq.maxCoeff()));
  }
  return out;
}

}  // namespace tensorqpt
