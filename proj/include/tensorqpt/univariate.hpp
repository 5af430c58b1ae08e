#ifndef TENSORQPT_UNIVARIATE_HPP
#define TENSORQPT_UNIVARIATE_HPP

#include <Eigen/Dense>
#include <vector>

#include "tensorqpt/split.hpp"

namespace tensorqpt {

/// Linear sampling algorithm A f = sum_j f(t_j) g_j with output elements in
/// target coordinates (columns of `outputs`).
struct LinearAlgorithm1D {
  std::vector<double> points;
  Eigen::MatrixXd outputs;  // m x n
  int cardinality() const { return static_cast<int>(points.size()); }
};

/// U_n = V_2 composed with minimal-norm kernel interpolation at `points`:
/// g_j = V_2(cardinal_j). Throws NumericalError when the interpolation
/// system is numerically singular (points too close).
LinearAlgorithm1D univariate_algorithm(const OperatorSplit& split,
                                       const std::vector<double>& points,
                                       const DiscretizedProblem& problem);

/// Induced matrix of a sampling algorithm on the surrogate (m x rank).
Eigen::MatrixXd algorithm_matrix(const LinearAlgorithm1D& alg,
                                 const DiscretizedProblem& problem);

/// Worst-case error of `alg` against a dense target map (m x rank).
double worst_case_error_1d(const LinearAlgorithm1D& alg,
                           const Eigen::MatrixXd& target,
                           const DiscretizedProblem& problem);

struct ErrorCurve {
  std::vector<double> e;          // e_1 .. e_{n_max}
  std::vector<double> power_max;  // greedy power function maxima
  double decay_e = 0.0;
  bool saturated = false;  // curve hit the numerical floor
};

/// Error curve of the anchored algorithms: e_n is the worst-case error of
/// V_1 + U_{n-1} against S_1 (equivalently ||V_2 - U_{n-1}||), with U_0 = 0,
/// on n-1 greedy points plus the anchor sample. Non-increasing in n.
ErrorCurve minimal_error_curve(const OperatorSplit& split,
                               const DiscretizedProblem& problem, int n_max);

/// Split-free fallback: e_n = ||S_1 - S_1 P_n|| for minimal-norm
/// interpolation P_n on n greedy points. Used to estimate the sampling-error
/// decay when the point condition fails and no split exists.
ErrorCurve spline_error_curve(const DiscretizedProblem& problem, int n_max);

void write_error_curve_csv(const ErrorCurve& curve, const std::string& path);

}  // namespace tensorqpt

#endif
