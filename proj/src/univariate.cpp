#include "tensorqpt/univariate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <limits>

#include "tensorqpt/greedy.hpp"

namespace tensorqpt {

namespace {

// Cardinal values of minimal-norm kernel interpolation at the nodes plus the
// anchor: columns are the cardinal functions evaluated on `eval_points`.
Eigen::MatrixXd cardinal_values(const std::vector<double>& points,
                                const DiscretizedProblem& problem,
                                const std::vector<double>& eval_points) {
  const Eigen::MatrixXd kn = problem.kernel->gram(points);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(kn);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success ||
      d.minCoeff() <= 1e-14 * d.maxCoeff()) {
    throw NumericalError(
        "univariate_algorithm: interpolation system numerically singular "
        "(points too close)");
  }
  Eigen::MatrixXd cross(eval_points.size(), points.size());
  for (size_t i = 0; i < eval_points.size(); ++i) {
    for (size_t j = 0; j < points.size(); ++j) {
      cross(i, j) = problem.kernel->eval(eval_points[i], points[j]);
    }
  }
  return ldlt.solve(cross.transpose()).transpose();
}

}  // namespace

LinearAlgorithm1D univariate_algorithm(const OperatorSplit& split,
                                       const std::vector<double>& points,
                                       const DiscretizedProblem& problem) {
  if (points.empty()) {
    throw InputError("univariate_algorithm: need at least one point");
  }
  std::vector<double> eval_points = problem.nodes;
  eval_points.push_back(split.t);
  const Eigen::MatrixXd card = cardinal_values(points, problem, eval_points);
  const Eigen::MatrixXd at_nodes = card.topRows(problem.m);
  const Eigen::RowVectorXd at_anchor = card.bottomRows(1);

  LinearAlgorithm1D alg;
  alg.points = points;
  // g_j = V2(cardinal_j) = S1(cardinal_j) - scale * cardinal_j(t) * S1 eta_1.
  alg.outputs = problem.scale *
                    (problem.weights.cwiseSqrt().asDiagonal() * at_nodes) -
                split.s1_eta1 * (split.scale * at_anchor);
  return alg;
}

Eigen::MatrixXd algorithm_matrix(const LinearAlgorithm1D& alg,
                                 const DiscretizedProblem& problem) {
  Eigen::MatrixXd rows(problem.rank, alg.cardinality());
  for (int j = 0; j < alg.cardinality(); ++j) {
    rows.col(j) = problem.eval_row(alg.points[j]);
  }
  return alg.outputs * rows.transpose();
}

double worst_case_error_1d(const LinearAlgorithm1D& alg,
                           const Eigen::MatrixXd& target,
                           const DiscretizedProblem& problem) {
  return matrix_spectral_norm(target - algorithm_matrix(alg, problem));
}

namespace {

ErrorCurve finalize_curve(ErrorCurve curve) {
  const double top = curve.e.empty() ? 0.0 : curve.e.front();
  const double floor = std::max(1e-300, 1e-13 * std::max(1.0, top));
  if (!curve.e.empty() && curve.e.back() <= floor) curve.saturated = true;
  if (curve.saturated) {
    curve.decay_e = std::numeric_limits<double>::infinity();
  } else {
    curve.decay_e = estimate_decay(curve.e);
  }
  return curve;
}

}  // namespace

ErrorCurve minimal_error_curve(const OperatorSplit& split,
                               const DiscretizedProblem& problem, int n_max) {
  if (n_max < 8) throw InputError("minimal_error_curve: n_max must be >= 8");
  const GreedySelection greedy =
      select_points_greedy(*problem.kernel, n_max - 1);

  ErrorCurve curve;
  curve.e.reserve(n_max);
  curve.power_max.reserve(n_max);
  // e_1: the anchor sample alone, U_0 = 0, error ||V2||.
  curve.e.push_back(split.norm_v2);
  curve.power_max.push_back(
      std::sqrt(problem.kernel->eval(split.t, split.t)));
  for (int n = 2; n <= n_max; ++n) {
    const int pts = n - 1;
    if (pts > static_cast<int>(greedy.points.size())) {
      curve.e.push_back(curve.e.back());  // greedy saturated
      curve.power_max.push_back(curve.power_max.back());
      curve.saturated = true;
      continue;
    }
    std::vector<double> points(greedy.points.begin(),
                               greedy.points.begin() + pts);
    const LinearAlgorithm1D u = univariate_algorithm(split, points, problem);
    curve.e.push_back(worst_case_error_1d(u, split.v2, problem));
    curve.power_max.push_back(greedy.power_max_after[pts - 1]);
  }
  return finalize_curve(std::move(curve));
}

ErrorCurve spline_error_curve(const DiscretizedProblem& problem, int n_max) {
  if (n_max < 8) throw InputError("spline_error_curve: n_max must be >= 8");
  const GreedySelection greedy = select_points_greedy(*problem.kernel, n_max);

  ErrorCurve curve;
  curve.e.reserve(n_max);
  curve.power_max.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (n > static_cast<int>(greedy.points.size())) {
      curve.e.push_back(curve.e.back());
      curve.power_max.push_back(curve.power_max.back());
      curve.saturated = true;
      continue;
    }
    std::vector<double> points(greedy.points.begin(),
                               greedy.points.begin() + n);
    const Eigen::MatrixXd card = [&] {
      const Eigen::MatrixXd kn = problem.kernel->gram(points);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(kn);
      Eigen::MatrixXd cross(problem.m, n);
      for (int i = 0; i < problem.m; ++i)
        for (int j = 0; j < n; ++j)
          cross(i, j) = problem.kernel->eval(problem.nodes[i], points[j]);
      return Eigen::MatrixXd(ldlt.solve(cross.transpose()).transpose());
    }();
    // S1 composed with the interpolation projector.
    Eigen::MatrixXd rows(problem.rank, n);
    for (int j = 0; j < n; ++j) rows.col(j) = problem.eval_row(points[j]);
    const Eigen::MatrixXd interp =
        problem.scale * (problem.weights.cwiseSqrt().asDiagonal() * card) *
        rows.transpose();
    curve.e.push_back(matrix_spectral_norm(problem.sampling - interp));
    curve.power_max.push_back(greedy.power_max_after[n - 1]);
  }
  return finalize_curve(std::move(curve));
}

void write_error_curve_csv(const ErrorCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write error curve: " + path);
  out << "n,e_n,power_max\n";
  char buf[128];
  for (size_t i = 0; i < curve.e.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g\n", i + 1, curve.e[i],
                  curve.power_max[i]);
    out << buf;
  }
}

}  // namespace tensorqpt
