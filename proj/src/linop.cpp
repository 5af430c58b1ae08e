#include "tensorqpt/linop.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "tensorqpt/errors.hpp"

namespace tensorqpt {

Eigen::MatrixXd materialize(const LinOp& op) {
  Eigen::MatrixXd m(op.rows, op.cols);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(op.cols);
  for (std::int64_t j = 0; j < op.cols; ++j) {
    e(j) = 1.0;
    m.col(j) = op.apply(e);
    e(j) = 0.0;
  }
  return m;
}

namespace {

double dense_spectral_norm(const LinOp& op) {
  const Eigen::MatrixXd m = materialize(op);
  const Eigen::MatrixXd g = (m.rows() >= m.cols())
                                ? Eigen::MatrixXd(m.transpose() * m)
                                : Eigen::MatrixXd(m * m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) {
    throw NumericalError("dense spectral norm: eigensolve failed");
  }
  return std::sqrt(std::max(0.0, es.eigenvalues()(g.rows() - 1)));
}

// Largest singular value of the lower-bidiagonal matrix with diagonal
// `alpha` (j entries) and subdiagonal `beta` (j-1 entries), via a small
// dense SVD.
double bidiagonal_sigma_max(const std::vector<double>& alpha,
                            const std::vector<double>& beta) {
  const int j = static_cast<int>(alpha.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(j, j);
  for (int i = 0; i < j; ++i) b(i, i) = alpha[i];
  for (int i = 0; i + 1 < j; ++i) b(i + 1, i) = beta[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  return svd.singularValues()(0);
}

}  // namespace

double spectral_norm(const LinOp& op, double rel_tol, int max_iter) {
  if (op.rows <= 0 || op.cols <= 0) return 0.0;
  if (op.rows * op.cols <= 2'000'000) return dense_spectral_norm(op);

  // Golub-Kahan-Lanczos bidiagonalization, full reorthogonalization,
  // deterministic start.
  const std::int64_t n = op.cols;
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) {
    v(i) = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i % 1009));
  }
  v.normalize();

  const int iters = static_cast<int>(
      std::min<std::int64_t>(max_iter, std::min(op.rows, op.cols)));
  std::vector<Eigen::VectorXd> vs, us;
  vs.reserve(iters);
  us.reserve(iters);
  std::vector<double> alphas, betas;

  vs.push_back(v);
  Eigen::VectorXd u = op.apply(v);
  double alpha = u.norm();
  if (alpha <= 1e-300) return 0.0;
  u /= alpha;
  us.push_back(u);
  alphas.push_back(alpha);

  double sigma = alpha;
  double prev_sigma = -1.0;
  int stable = 0;
  for (int it = 1; it < iters; ++it) {
    Eigen::VectorXd w = op.apply_adjoint(us.back()) - alpha * vs.back();
    for (const auto& vv : vs) w -= vv.dot(w) * vv;
    for (const auto& vv : vs) w -= vv.dot(w) * vv;  // second pass
    double beta = w.norm();
    if (beta <= 1e-14 * sigma) {
      // Krylov space exhausted; the bidiagonal spectrum is exact.
      return bidiagonal_sigma_max(alphas, betas);
    }
    w /= beta;
    vs.push_back(w);
    betas.push_back(beta);

    Eigen::VectorXd z = op.apply(w) - beta * us.back();
    for (const auto& uu : us) z -= uu.dot(z) * uu;
    for (const auto& uu : us) z -= uu.dot(z) * uu;
    alpha = z.norm();
    if (alpha <= 1e-14 * sigma) {
      alphas.push_back(alpha);
      return bidiagonal_sigma_max(alphas, betas);
    }
    z /= alpha;
    us.push_back(z);
    alphas.push_back(alpha);

    sigma = bidiagonal_sigma_max(alphas, betas);
    if (prev_sigma >= 0.0 &&
        std::abs(sigma - prev_sigma) <= rel_tol * std::max(sigma, 1e-300)) {
      if (++stable >= 3) return sigma;
    } else {
      stable = 0;
    }
    prev_sigma = sigma;
  }
  return sigma;
}

}  // namespace tensorqpt
