#include "tensorqpt/discretization.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace tensorqpt {
namespace {

// Left-looking pivoted Cholesky of a PSD matrix, G ~= L L^T with L m x rank.
// Rows keep the original ordering; stops when the largest remaining diagonal
// falls below rel_tol times the initial maximum.
Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& g, double rel_tol,
                                 int* rank_out) {
  const int m = static_cast<int>(g.rows());
  Eigen::VectorXd diag = g.diagonal();
  const double d0 = diag.maxCoeff();
  const double floor = rel_tol * d0;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  int rank = 0;
  for (int s = 0; s < m; ++s) {
    int pivot = 0;
    double best = diag(0);
    for (int i = 1; i < m; ++i) {
      if (diag(i) > best) {
        best = diag(i);
        pivot = i;
      }
    }
    if (best <= floor) break;
    Eigen::VectorXd col = g.col(pivot);
    if (s > 0) {
      col.noalias() -= l.leftCols(s) * l.row(pivot).head(s).transpose();
    }
    col /= std::sqrt(best);
    l.col(s) = col;
    diag.array() -= col.array().square();
    diag = diag.cwiseMax(0.0);
    diag(pivot) = 0.0;
    ++rank;
  }
  *rank_out = rank;
  return l.leftCols(rank);
}

// B with B^T G B = I from the Cholesky factor: B = Q R^{-T} for L = Q R.
Eigen::MatrixXd orthonormalize_from_cholesky(const Eigen::MatrixXd& l) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(l);
  const int rank = static_cast<int>(l.cols());
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(l.rows(), rank);
  Eigen::MatrixXd r =
      qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  return r.transpose()
      .triangularView<Eigen::Lower>()
      .solve(q.transpose())
      .transpose();
}

// Robust fallback: eigendecomposition whitening, exact for any PSD Gram.
Eigen::MatrixXd orthonormalize_from_eigendecomposition(
    const Eigen::MatrixXd& g, double rel_tol, int* rank_out) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) {
    throw NumericalError("whitening eigensolve failed to converge");
  }
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double top = evals(evals.size() - 1);
  const double floor = rel_tol * top;
  int rank = 0;
  for (int i = 0; i < evals.size(); ++i)
    if (evals(i) > floor) ++rank;
  Eigen::MatrixXd b(g.rows(), rank);
  int col = 0;
  for (int i = static_cast<int>(evals.size()) - rank;
       i < static_cast<int>(evals.size()); ++i) {
    b.col(col++) = es.eigenvectors().col(i) / std::sqrt(evals(i));
  }
  *rank_out = rank;
  return b;
}

double whitening_defect(const Eigen::MatrixXd& b, const Eigen::MatrixXd& g) {
  Eigen::MatrixXd gram = b.transpose() * g * b;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::VectorXd DiscretizedProblem::eval_row(double t) const {
  return basis.transpose() * kernel->section(t, nodes);
}

Eigen::VectorXd DiscretizedProblem::target_coords(
    const Eigen::VectorXd& values) const {
  return weights.cwiseSqrt().cwiseProduct(values);
}

Eigen::VectorXd DiscretizedProblem::coords_of_sections(
    const Eigen::VectorXd& c) const {
  return basis.transpose() * (gram * c);
}

DiscretizedProblem discretize_problem(KernelPtr kernel, int m,
                                      bool normalize) {
  if (m < 32) {
    throw InputError("discretize_problem: m must be >= 32, got " +
                     std::to_string(m));
  }
  DiscretizedProblem p;
  p.kernel = std::move(kernel);
  p.m = m;
  const Interval dom = p.kernel->domain();
  const double h = dom.length() / m;
  p.nodes.resize(m);
  for (int i = 0; i < m; ++i) p.nodes[i] = dom.lo + (i + 0.5) * h;
  p.weights = Eigen::VectorXd::Constant(m, h);
  p.gram = p.kernel->gram(p.nodes);

  constexpr double kRankTol = 1e-12;
  int rank = 0;
  Eigen::MatrixXd l = pivoted_cholesky(p.gram, kRankTol, &rank);
  Eigen::MatrixXd b = orthonormalize_from_cholesky(l);
  if (whitening_defect(b, p.gram) > 1e-10) {
    b = orthonormalize_from_eigendecomposition(p.gram, kRankTol, &rank);
    p.whitening_fallback = true;
  }
  p.basis = std::move(b);
  p.rank = rank;
  p.sampling =
      p.weights.cwiseSqrt().asDiagonal() * (p.gram * p.basis);

  if (normalize) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        p.sampling.transpose() * p.sampling);
    if (es.info() != Eigen::Success) {
      throw NumericalError("normalization eigensolve failed");
    }
    const double lambda1 = es.eigenvalues()(rank - 1);
    if (!(lambda1 > 0.0)) {
      throw NumericalError("normalization: top eigenvalue is not positive");
    }
    p.scale = 1.0 / std::sqrt(lambda1);
    p.sampling *= p.scale;
    p.normalized = true;
  }
  return p;
}

}  // namespace tensorqpt
