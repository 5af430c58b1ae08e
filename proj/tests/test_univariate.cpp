#include <doctest.h>

#include <Eigen/Cholesky>
#include <random>

#include "tensorqpt/greedy.hpp"
#include "tensorqpt/univariate.hpp"
#include "test_util.hpp"

using namespace tensorqpt;

TEST_SUITE_BEGIN("univariate");

TEST_CASE("build_split norms and eigenfunction annihilation") {
  tqtest::World w = tqtest::modified_world(64, 10, /*normalize=*/true);
  REQUIRE(w.condition.ok);
  const OperatorSplit split = tqtest::split_of(w);

  CHECK(split.norm_v1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(split.norm_v2 ==
        doctest::Approx(std::sqrt(w.spectrum.lambdas(1))).epsilon(1e-6));

  // V1 eta_1 = S1 eta_1, V1 eta_j = 0 for j >= 2.
  const Eigen::VectorXd via_v1 = split.v1 * w.spectrum.eigvecs.col(0);
  CHECK((via_v1 - split.s1_eta1).norm() <= 1e-8);
  for (int j : {1, 2, 3}) {
    CHECK((split.v1 * w.spectrum.eigvecs.col(j)).norm() <= 1e-8);
  }
}

TEST_CASE("build_split refuses a failed point condition") {
  tqtest::World w = tqtest::sobolev_world(64, 10);
  REQUIRE_FALSE(w.condition.ok);
  CHECK_THROWS_WITH_AS(build_split(w.spectrum, w.problem, w.condition),
                       doctest::Contains("rank_one_modify"), AssemblyError);
}

TEST_CASE("split consistency on random inputs") {
  tqtest::World w = tqtest::modified_world(64, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  std::mt19937 rng(99);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd z(w.problem.rank);
    for (int i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd lhs = split.v1 * z + split.v2 * z;
    const Eigen::VectorXd rhs = w.problem.sampling * z;
    CHECK((lhs - rhs).norm() <= 1e-8 * z.norm());
  }
}

TEST_CASE("greedy selection starts at the diagonal argmax") {
  const auto sobolev = make_preset_kernel("sobolev");
  const GreedySelection g = select_points_greedy(*sobolev, 1);
  REQUIRE(g.points.size() == 1);
  CHECK(g.points[0] == 1.0);  // K(x,x) = 1 + x peaks at the right endpoint
}

TEST_CASE("greedy power function maxima decrease") {
  const auto sobolev = make_preset_kernel("sobolev");
  const GreedySelection g = select_points_greedy(*sobolev, 8);
  REQUIRE(g.points.size() == 8);
  CHECK(g.power_max_after[7] < g.power_max_after[3]);
  for (size_t i = 1; i < g.power_max_after.size(); ++i) {
    CHECK(g.power_max_after[i] <= g.power_max_after[i - 1] + 1e-12);
  }
}

TEST_CASE("greedy saturates on a rank-one kernel") {
  const auto rank1 = make_preset_kernel("rank1");
  const GreedySelection g = select_points_greedy(*rank1, 2);
  CHECK(g.saturated);
  CHECK(g.points.size() == 1);
}

TEST_CASE("greedy selection is deterministic") {
  const auto sobolev = make_preset_kernel("sobolev");
  const GreedySelection a = select_points_greedy(*sobolev, 16);
  const GreedySelection b = select_points_greedy(*sobolev, 16);
  CHECK(a.points == b.points);
}

TEST_CASE("univariate algorithm is exact on its interpolation space") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  const GreedySelection g = select_points_greedy(*w.kernel, 6);
  const LinearAlgorithm1D u = univariate_algorithm(split, g.points, w.problem);

  // Columns: V2 K(., t_l) - U K(., t_l); domain whitened by chol(K_n).
  const int n = u.cardinality();
  const Eigen::MatrixXd kn = w.kernel->gram(g.points);
  Eigen::MatrixXd cross(w.problem.m, n);
  for (int i = 0; i < w.problem.m; ++i)
    for (int l = 0; l < n; ++l)
      cross(i, l) = w.kernel->eval(w.problem.nodes[i], g.points[l]);
  Eigen::RowVectorXd at_anchor(n);
  for (int l = 0; l < n; ++l)
    at_anchor(l) = w.kernel->eval(split.t, g.points[l]);

  const Eigen::MatrixXd v2_sections =
      w.problem.scale * (w.problem.weights.cwiseSqrt().asDiagonal() * cross) -
      split.s1_eta1 * (split.scale * at_anchor);
  const Eigen::MatrixXd u_sections = u.outputs * kn;
  const Eigen::MatrixXd residual = v2_sections - u_sections;
  const Eigen::MatrixXd white =
      residual * Eigen::LLT<Eigen::MatrixXd>(kn).matrixL().toDenseMatrix()
                     .inverse()
                     .transpose();
  CHECK(matrix_spectral_norm(white) <= 1e-10);
}

TEST_CASE("interpolating on a spanning node set reconstructs V2") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  // The modified Gram on all nodes is rank deficient by one; dropping a
  // single node leaves a basis of the surrogate.
  std::vector<double> points(w.problem.nodes.begin(),
                             w.problem.nodes.end() - 1);
  const LinearAlgorithm1D u = univariate_algorithm(split, points, w.problem);
  CHECK(worst_case_error_1d(u, split.v2, w.problem) <= 1e-8);
}

TEST_CASE("univariate algorithm rejects empty point sets and duplicates") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  CHECK_THROWS_AS(univariate_algorithm(split, {}, w.problem), InputError);
  CHECK_THROWS_AS(univariate_algorithm(split, {0.5, 0.5}, w.problem),
                  InputError);
  CHECK_THROWS_AS(
      univariate_algorithm(split, {0.5, 0.5 + 1e-15}, w.problem),
      NumericalError);
}

TEST_CASE("greedy refinement shrinks the error") {
  tqtest::World w = tqtest::modified_world(64, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  const GreedySelection g = select_points_greedy(*w.kernel, 4);
  const LinearAlgorithm1D u2 = univariate_algorithm(
      split, {g.points.begin(), g.points.begin() + 2}, w.problem);
  const LinearAlgorithm1D u4 = univariate_algorithm(split, g.points, w.problem);
  const double e2 = worst_case_error_1d(u2, split.v2, w.problem);
  const double e4 = worst_case_error_1d(u4, split.v2, w.problem);
  CHECK(e4 < e2);
}

TEST_CASE("minimal error curve: monotone with positive decay") {
  tqtest::World w = tqtest::modified_world(64, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  const ErrorCurve curve = minimal_error_curve(split, w.problem, 24);
  REQUIRE(curve.e.size() == 24);
  CHECK(curve.e.front() == doctest::Approx(split.norm_v2).epsilon(1e-12));
  for (size_t i = 1; i < curve.e.size(); ++i) {
    CHECK(curve.e[i] <= curve.e[i - 1] + 1e-12);
  }
  CHECK(curve.e[23] <= curve.e[0]);
  CHECK(curve.decay_e > 0.0);
  CHECK_THROWS_AS(minimal_error_curve(split, w.problem, 4), InputError);
}

TEST_CASE("minimal error curve saturates for rank-one kernels") {
  const auto rank1 = make_preset_kernel("rank1");
  const auto problem = discretize_problem(rank1, 32, true);
  const auto spectrum = eigensystem(problem, 4);
  const auto cond = check_eigenfunction_point_condition(spectrum, problem);
  REQUIRE(cond.ok);
  const OperatorSplit split = build_split(spectrum, problem, cond);
  const ErrorCurve curve = minimal_error_curve(split, problem, 8);
  CHECK(curve.e[0] <= 1e-10);  // one sample reproduces the whole range
  CHECK(curve.saturated);
}

TEST_CASE("spline curve decays for the unmodified kernel") {
  tqtest::World w = tqtest::sobolev_world(64, 8);
  const ErrorCurve curve = spline_error_curve(w.problem, 24);
  for (size_t i = 1; i < curve.e.size(); ++i) {
    CHECK(curve.e[i] <= curve.e[i - 1] + 1e-12);
  }
  CHECK(curve.decay_e > 0.0);
}

TEST_SUITE_END();
