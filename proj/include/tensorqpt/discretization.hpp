#ifndef TENSORQPT_DISCRETIZATION_HPP
#define TENSORQPT_DISCRETIZATION_HPP

#include <Eigen/Dense>

#include "tensorqpt/kernel.hpp"

namespace tensorqpt {

/// Finite-dimensional surrogate of the univariate problem.
///
/// The surrogate source space is H = span{ K(., x_i) } over m composite
/// midpoint quadrature nodes, carrying the native inner product
/// <sum c_i K(.,x_i), sum d_j K(.,x_j)> = c^T G d. `basis` holds an
/// orthonormalizing change of basis B (m x rank, B^T G B = I); all
/// source-side coordinates below are w.r.t. that orthonormal basis.
/// The target space is L2 discretized by the same quadrature; target-side
/// coordinates are sqrt(w) .* (values at nodes), so plain Euclidean norms
/// realize both space norms.
struct DiscretizedProblem {
  KernelPtr kernel;
  std::vector<double> nodes;   // m midpoint nodes
  Eigen::VectorXd weights;     // positive, summing to |D1|
  Eigen::MatrixXd gram;        // G, m x m
  Eigen::MatrixXd basis;       // B, m x rank
  Eigen::MatrixXd sampling;    // S = scale * sqrt(W) G B, m x rank
  double scale = 1.0;          // lambda_1^{-1/2} when normalized
  bool normalized = false;
  bool whitening_fallback = false;  // eigendecomposition whitening was used
  int m = 0;
  int rank = 0;

  /// Row vector of the point-evaluation functional at t in basis
  /// coordinates: f(t) = eval_row(t) . z.
  Eigen::VectorXd eval_row(double t) const;

  /// Target-space coordinates of the function with node values `values`.
  Eigen::VectorXd target_coords(const Eigen::VectorXd& values) const;

  /// Basis coordinates of sum_i c_i K(., x_i).
  Eigen::VectorXd coords_of_sections(const Eigen::VectorXd& c) const;
};

/// Build the surrogate with m midpoint nodes (m >= 32). When `normalize`
/// is set the sampling operator is rescaled so its top squared singular
/// value is 1 within 1e-10.
DiscretizedProblem discretize_problem(KernelPtr kernel, int m,
                                      bool normalize = false);

}  // namespace tensorqpt

#endif
