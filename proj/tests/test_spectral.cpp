#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace tensorqpt;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("discretize_problem rejects coarse grids") {
  CHECK_THROWS_AS(discretize_problem(make_preset_kernel("sobolev"), 16),
                  InputError);
}

TEST_CASE("normalization forces a unit top eigenvalue") {
  const auto p = discretize_problem(make_preset_kernel("sobolev"), 256, true);
  const auto s = eigensystem(p, 4);
  CHECK(s.lambdas(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lambda_1 is grid-stable and matches the transcendental oracle") {
  const auto s256 = eigensystem(
      discretize_problem(make_preset_kernel("sobolev"), 256), 8);
  const auto s512 = eigensystem(
      discretize_problem(make_preset_kernel("sobolev"), 512), 8);
  CHECK(std::abs(s256.lambdas(0) - s512.lambdas(0)) <=
        5e-4 * s512.lambdas(0));
  // Independent bisection oracle for tan(w) = 1/w.
  const double l1 = tqtest::sobolev_lambda_analytic(1);
  const double l2 = tqtest::sobolev_lambda_analytic(2);
  CHECK(s512.lambdas(0) == doctest::Approx(l1).epsilon(1e-3));
  CHECK(s512.lambdas(1) == doctest::Approx(l2).epsilon(1e-3));
}

TEST_CASE("eigensystem: ordering, gap, orthonormality, residuals") {
  tqtest::World w = tqtest::sobolev_world(128, 10);
  const auto& s = w.spectrum;
  for (int j = 1; j < 10; ++j) CHECK(s.lambdas(j) <= s.lambdas(j - 1));
  CHECK(s.lambdas(1) < s.lambdas(0));
  CHECK((s.lambdas(0) - s.lambdas(1)) / s.lambdas(0) > 0.1);

  // F1 orthonormality through the Gram matrix of section coefficients.
  const Eigen::MatrixXd inner =
      s.sections.transpose() * w.problem.gram * s.sections;
  CHECK((inner - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <=
        1e-8);

  // Spectral decomposition residual ||W1 eta_j - lambda_j eta_j|| in F1.
  const Eigen::MatrixXd w1 =
      w.problem.sampling.transpose() * w.problem.sampling;
  for (int j = 0; j < 10; ++j) {
    const Eigen::VectorXd r =
        w1 * s.eigvecs.col(j) - s.lambdas(j) * s.eigvecs.col(j);
    CHECK(r.norm() <= 1e-8 * s.lambdas(0));
  }
}

TEST_CASE("eigensystem is deterministic with the sign convention") {
  tqtest::World a = tqtest::sobolev_world(64, 8);
  tqtest::World b = tqtest::sobolev_world(64, 8);
  CHECK((a.spectrum.sections - b.spectrum.sections).cwiseAbs().maxCoeff() ==
        0.0);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < a.spectrum.sections.rows(); ++i) {
      const double v = a.spectrum.sections(i, j);
      if (std::abs(v) > 1e-10) {
        CHECK(v > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("rank-one kernel has a single eigenvalue") {
  const auto p = discretize_problem(make_preset_kernel("rank1"), 64);
  const auto s = eigensystem(p, 10);
  CHECK(s.rank == 1);
  CHECK(s.lambdas(0) > 0.0);
  CHECK(s.lambdas(1) <= 1e-12 * s.lambdas(0));
}

TEST_CASE("eigenvalue stability under grid doubling") {
  const auto s128 = eigensystem(
      discretize_problem(make_preset_kernel("sobolev"), 128), 5);
  const auto s256 = eigensystem(
      discretize_problem(make_preset_kernel("sobolev"), 256), 5);
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(s128.lambdas(j) - s256.lambdas(j)) <=
          0.005 * s256.lambdas(j));
  }
}

TEST_CASE("eigensystem rejects q > m") {
  const auto p = discretize_problem(make_preset_kernel("sobolev"), 32);
  CHECK_THROWS_AS(eigensystem(p, 33), InputError);
}

TEST_CASE("estimate_decay on exact power laws and edge cases") {
  std::vector<double> quad, constant;
  for (int n = 1; n <= 64; ++n) {
    quad.push_back(1.0 / (double(n) * n));
    constant.push_back(0.7);
  }
  CHECK(estimate_decay(quad) == doctest::Approx(2.0).epsilon(0.005));
  CHECK(estimate_decay(constant) == 0.0);

  CHECK_THROWS_AS(estimate_decay({1.0, 0.5, 0.25}), InputError);
  std::vector<double> bad(16, 1.0);
  bad[15] = 0.0;
  CHECK_THROWS_AS(estimate_decay(bad), InputError);
}

TEST_CASE("sobolev eigenvalue decay estimate is about 2") {
  const auto s = eigensystem(
      discretize_problem(make_preset_kernel("sobolev"), 256), 64);
  std::vector<double> lams(s.lambdas.data(), s.lambdas.data() + 64);
  const double decay = estimate_decay(lams);
  CHECK(decay >= 1.7);
  CHECK(decay <= 2.3);
}

TEST_CASE("point condition fails for the unmodified sobolev kernel") {
  tqtest::World w = tqtest::sobolev_world(128, 10);
  CHECK_FALSE(w.condition.ok);
  CHECK(w.condition.min_residual > 1e-6);
  MESSAGE("unmodified sobolev residual floor: ", w.condition.min_residual);
}

TEST_CASE("point condition holds for rank-one kernels wherever g != 0") {
  const auto p = discretize_problem(make_preset_kernel("rank1"), 64);
  const auto s = eigensystem(p, 4);
  const auto cond = check_eigenfunction_point_condition(s, p);
  CHECK(cond.ok);
  // g = 1 + x never vanishes, so every node is a valid anchor.
  for (int i = 0; i < 64; i += 9) {
    CHECK(point_condition_residual(s, p, p.nodes[i]) <= 1e-6);
  }
}

TEST_CASE("point condition holds at the anchor after modification") {
  tqtest::World w = tqtest::modified_world(128, 10);
  REQUIRE(w.condition.ok);
  CHECK(w.condition.residual <= 1e-6);
  CHECK(w.condition.max_higher_abs <= 1e-6);
  for (int j = 1; j < 10; ++j) {
    CHECK(std::abs(w.spectrum.eigenfunction_value(w.problem, j,
                                                  w.condition.t)) <= 1e-6);
  }
}

TEST_CASE("point condition requires a two-eigenpair spectrum") {
  const auto p = discretize_problem(make_preset_kernel("sobolev"), 32);
  const auto s = eigensystem(p, 1);
  CHECK_THROWS_AS(check_eigenfunction_point_condition(s, p), InputError);
}

TEST_SUITE_END();
