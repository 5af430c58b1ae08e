#ifndef TENSORQPT_LINOP_HPP
#define TENSORQPT_LINOP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace tensorqpt {

/// Matrix-free linear operator between Euclidean coordinate spaces.
struct LinOp {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_adjoint;
};

/// Largest singular value via Golub-Kahan-Lanczos bidiagonalization with
/// full reorthogonalization and a deterministic start vector; falls back to
/// a dense SVD when the operator is small enough to materialize.
double spectral_norm(const LinOp& op, double rel_tol = 1e-11,
                     int max_iter = 400);

/// Dense materialization (column-by-column); for tests and small operators.
Eigen::MatrixXd materialize(const LinOp& op);

}  // namespace tensorqpt

#endif
