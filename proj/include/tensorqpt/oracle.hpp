#ifndef TENSORQPT_ORACLE_HPP
#define TENSORQPT_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "tensorqpt/linop.hpp"
#include "tensorqpt/split.hpp"
#include "tensorqpt/tensor_algorithm.hpp"

namespace tensorqpt {

// Hard ceilings for brute-force tensor certification.
inline constexpr int kOracleMaxDim = 3;
inline constexpr int kOracleMaxFactorSize = 64;

/// Sum of Kronecker products of per-axis factor matrices (each m x rank),
/// mapping the d-fold source coordinates to the d-fold target coordinates.
struct TensorSurrogate {
  int d = 0;
  struct KronTerm {
    double coeff = 1.0;
    std::vector<Eigen::MatrixXd> factors;
  };
  std::vector<KronTerm> kron_terms;
  std::int64_t rows() const;
  std::int64_t cols() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& z) const;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const;

  /// S_1^{(x) d}.
  static TensorSurrogate full_operator(const DiscretizedProblem& problem,
                                       int d);
  /// V_{j_1} (x) ... (x) V_{j_d} for j in {1,2}^d.
  static TensorSurrogate from_pattern(const OperatorSplit& split,
                                      const DiscretizedProblem& problem,
                                      const std::vector<int>& j);
  /// sum over |j|_2 > k of V_{j_1} (x) ... (x) V_{j_d}.
  static TensorSurrogate tail(const OperatorSplit& split,
                              const DiscretizedProblem& problem, int d, int k);
};

/// Worst-case error sup_{||f||<=1} ||T f - A f||: the largest singular value
/// of the residual map. Throws StructuralError on dimension mismatch.
double worst_case_error(const TensorAlgorithm& algorithm,
                        const TensorSurrogate& target,
                        const DiscretizedProblem& problem);

/// Largest singular value of the surrogate itself.
double operator_norm(const TensorSurrogate& target);

/// e_0(S_d) = lambda_1^{d/2}.
double initial_error(const Spectrum& spectrum, int d);

/// One line of a verification report.
struct CheckRecord {
  std::string check_id;
  double expected = 0.0;
  double measured = 0.0;
  double tol = 0.0;
  bool pass = false;
};

std::string checks_to_json(const std::vector<CheckRecord>& checks);

/// Matrix-free view of target-minus-algorithm, exposed for tests.
LinOp residual_operator(const TensorAlgorithm& algorithm,
                        const TensorSurrogate& target,
                        const DiscretizedProblem& problem);

}  // namespace tensorqpt

#endif
