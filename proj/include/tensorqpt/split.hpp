#ifndef TENSORQPT_SPLIT_HPP
#define TENSORQPT_SPLIT_HPP

#include <Eigen/Dense>

#include "tensorqpt/spectrum.hpp"

namespace tensorqpt {

/// Decomposition S_1 = V_1 + V_2 where V_1 f = delta K(t,t)^{-1/2} f(t) S_1 eta_1
/// is computable from a single function value at the anchor t, and
/// V_2 := S_1 - V_1. Matrices map basis coordinates to target coordinates.
struct OperatorSplit {
  double t = 0.0;
  int sign = +1;
  double ktt = 0.0;           // K(t, t)
  double scale = 0.0;         // delta * K(t,t)^{-1/2}
  Eigen::VectorXd s1_eta1;    // target coords of S_1 eta_1
  Eigen::VectorXd eval_t;     // evaluation row at t (rank)
  Eigen::MatrixXd v1;         // m x rank
  Eigen::MatrixXd v2;         // m x rank
  double norm_v1 = 0.0;       // measured spectral norms
  double norm_v2 = 0.0;
};

/// Requires a successful point condition; throws AssemblyError directing
/// the caller to rank_one_modify otherwise.
OperatorSplit build_split(const Spectrum& spectrum,
                          const DiscretizedProblem& problem,
                          const PointCondition& condition);

/// Spectral norm of a dense map between the coordinate spaces.
double matrix_spectral_norm(const Eigen::MatrixXd& a);

}  // namespace tensorqpt

#endif
