#ifndef TENSORQPT_SPECTRUM_HPP
#define TENSORQPT_SPECTRUM_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tensorqpt/discretization.hpp"

namespace tensorqpt {

/// Result of the eigenfunction-at-a-point scan. Failure is a value: `ok`
/// false with the smallest residual seen over the candidate grid.
struct PointCondition {
  bool ok = false;
  double t = 0.0;
  int sign = +1;               // delta in {-1,+1}
  double residual = 0.0;       // ||eta_1 - delta K(t,t)^{-1/2} K(.,t)||_F at t
  double min_residual = 0.0;   // best residual over the whole grid
  double max_higher_abs = 0.0; // max_{2<=j<=q} |eta_j(t)| on success
};

/// Ordered eigenpairs of the surrogate W_1 = S_1^* S_1.
struct Spectrum {
  Eigen::VectorXd lambdas;   // descending, padded with zeros past `rank`
  Eigen::MatrixXd eigvecs;   // rank x q, orthonormal basis coordinates
  Eigen::MatrixXd sections;  // m x q kernel-section coefficients (B * eigvecs)
  int rank = 0;              // number of genuine eigenpairs
  std::string kernel_id;
  int m = 0;

  double lambda(int j) const { return lambdas(j); }  // 0-based
  double gap() const { return lambdas(0) - lambdas(1); }

  /// eta_j evaluated at an arbitrary point (0-based j).
  double eigenfunction_value(const DiscretizedProblem& p, int j,
                             double t) const;
};

/// Dense symmetric eigensolve of the surrogate operator; deterministic for
/// fixed (kernel, m, q). Requests past the surrogate rank are padded with
/// exact zeros.
Spectrum eigensystem(const DiscretizedProblem& problem, int q);

/// Least-squares slope of log a_n vs log n over the tail n in [N/2, N],
/// negated; 0 when the fitted slope is >= -0.05. The sequence is sorted
/// descending first; nonpositive entries in the fitted tail are rejected.
double estimate_decay(std::vector<double> sequence);

/// Full-space residual min_delta ||eta_1 - delta K(t,t)^{-1/2} K(., t)||_F
/// at a single point; the best sign lands in *sign_out when given.
double point_condition_residual(const Spectrum& spectrum,
                                const DiscretizedProblem& problem, double t,
                                int* sign_out = nullptr);

/// Scan candidate points for eta_1 = +-K(t,t)^{-1/2} K(., t). Candidates
/// default to the quadrature nodes plus the kernel's anchor when present.
PointCondition check_eigenfunction_point_condition(
    const Spectrum& spectrum, const DiscretizedProblem& problem,
    const std::vector<double>& extra_candidates = {});

std::string spectrum_to_json(const Spectrum& s, const PointCondition* pc,
                             double decay_lambda);

}  // namespace tensorqpt

#endif
