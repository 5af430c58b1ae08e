#include "tensorqpt/modification.hpp"

#include <cmath>

namespace tensorqpt {

double default_anchor(const Spectrum& spectrum,
                      const DiscretizedProblem& problem) {
  // eta_1 at the nodes: (G v_1)_i.
  const Eigen::VectorXd values = problem.gram * spectrum.sections.col(0);
  int best = 0;
  for (int i = 1; i < values.size(); ++i) {
    if (std::abs(values(i)) > std::abs(values(best))) best = i;
  }
  return problem.nodes[best];
}

KernelPtr rank_one_modify(const Spectrum& spectrum,
                          const DiscretizedProblem& problem, double t_star) {
  constexpr double kTolZero = 1e-10;

  int idx = -1;
  for (size_t i = 0; i < problem.nodes.size(); ++i) {
    if (problem.nodes[i] == t_star) {
      idx = static_cast<int>(i);
      break;
    }
  }
  if (idx < 0) {
    throw InputError(
        "rank_one_modify: anchor must be one of the quadrature nodes");
  }

  const Eigen::VectorXd v1 = spectrum.sections.col(0);
  const double eta1_t = (problem.gram * v1)(idx);
  if (std::abs(eta1_t) <= kTolZero) {
    throw AnchorPointError(
        "rank_one_modify: eta_1 vanishes at the anchor point; pick another "
        "t*");
  }
  if (problem.kernel->eval(t_star, t_star) <= kTolZero) {
    throw AnchorPointError("rank_one_modify: K(t*, t*) must be positive");
  }

  // Correction c = eta_1 - K(., t*)/eta_1(t*) over sections at the nodes.
  Eigen::VectorXd coeffs = v1;
  coeffs(idx) -= 1.0 / eta1_t;
  const double norm_sq = coeffs.dot(problem.gram * coeffs);
  if (norm_sq <= 1e-12) {
    throw InputError(
        "rank_one_modify: already satisfied - the eigenfunction condition "
        "holds at t*");
  }

  return std::make_shared<ModifiedKernel>(
      problem.kernel, problem.nodes, std::move(coeffs), norm_sq, t_star);
}

}  // namespace tensorqpt
