#include "tensorqpt/split.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace tensorqpt {

double matrix_spectral_norm(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd g = (a.rows() >= a.cols())
                                ? Eigen::MatrixXd(a.transpose() * a)
                                : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) {
    throw NumericalError("matrix_spectral_norm: eigensolve failed");
  }
  return std::sqrt(std::max(0.0, es.eigenvalues()(g.rows() - 1)));
}

OperatorSplit build_split(const Spectrum& spectrum,
                          const DiscretizedProblem& problem,
                          const PointCondition& condition) {
  if (!condition.ok) {
    throw AssemblyError(
        "build_split: eigenfunction point condition not satisfied; apply "
        "rank_one_modify and rebuild the spectrum first");
  }
  OperatorSplit s;
  s.t = condition.t;
  s.sign = condition.sign;
  s.ktt = problem.kernel->eval(s.t, s.t);
  s.scale = s.sign / std::sqrt(s.ktt);
  s.s1_eta1 = problem.sampling * spectrum.eigvecs.col(0);
  s.eval_t = problem.eval_row(s.t);
  s.v1 = s.scale * s.s1_eta1 * s.eval_t.transpose();
  s.v2 = problem.sampling - s.v1;
  s.norm_v1 = matrix_spectral_norm(s.v1);
  s.norm_v2 = matrix_spectral_norm(s.v2);
  return s;
}

}  // namespace tensorqpt
