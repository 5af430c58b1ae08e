#include <doctest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <random>

#include "tensorqpt/oracle.hpp"
#include "tensorqpt/qpt.hpp"
#include "test_util.hpp"

using namespace tensorqpt;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("zero algorithm error equals the initial error") {
  tqtest::World w = tqtest::modified_world(32, 8, /*normalize=*/true);
  for (int d = 1; d <= 3; ++d) {
    const TensorSurrogate sd = TensorSurrogate::full_operator(w.problem, d);
    TensorAlgorithm zero;
    zero.dim = d;
    const double e0 = worst_case_error(zero, sd, w.problem);
    CHECK(e0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(initial_error(w.spectrum, d) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("initial error formula lambda_1^{d/2}") {
  Spectrum s;
  s.lambdas = Eigen::VectorXd::Zero(2);
  s.lambdas(0) = 1.0;
  CHECK(initial_error(s, 100) == doctest::Approx(1.0));
  s.lambdas(0) = 0.81;
  CHECK(initial_error(s, 2) == doctest::Approx(0.81));

  // cross-check against the measured operator norm on an unnormalized world
  tqtest::World w = tqtest::modified_world(32, 8, /*normalize=*/false);
  for (int d = 1; d <= 2; ++d) {
    const double measured =
        operator_norm(TensorSurrogate::full_operator(w.problem, d));
    CHECK(measured ==
          doctest::Approx(initial_error(w.spectrum, d)).epsilon(1e-8));
  }
}

TEST_CASE("pattern norms factor into the eigenvalue law") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  const OperatorSplit split = tqtest::split_of(w);
  const double l1 = w.spectrum.lambdas(0);
  const double l2 = w.spectrum.lambdas(1);
  for (int d = 1; d <= 2; ++d) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<int> j(d, 1);
      int twos = 0;
      for (int l = 0; l < d; ++l) {
        if (mask & (1 << l)) {
          j[l] = 2;
          ++twos;
        }
      }
      const double expected =
          std::pow(l1, 0.5 * (d - twos)) * std::pow(l2, 0.5 * twos);
      const double measured =
          operator_norm(TensorSurrogate::from_pattern(split, w.problem, j));
      CHECK(measured == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("d = 2 eigenvalues are products of univariate eigenvalues") {
  tqtest::World w = tqtest::modified_world(32, 10, false);
  const TensorSurrogate s2 = TensorSurrogate::full_operator(w.problem, 2);
  TensorAlgorithm zero;
  zero.dim = 2;
  const Eigen::MatrixXd m =
      materialize(residual_operator(zero, s2, w.problem));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
  REQUIRE(es.info() == Eigen::Success);

  std::vector<double> products;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      products.push_back(w.spectrum.lambdas(i) * w.spectrum.lambdas(j));
    }
  }
  std::sort(products.begin(), products.end(), std::greater<double>());
  const auto& evals = es.eigenvalues();
  for (int t = 0; t < 10; ++t) {
    CHECK(evals(evals.size() - 1 - t) ==
          doctest::Approx(products[t]).epsilon(1e-6));
  }
}

TEST_CASE("tensor surrogate matches the explicit Kronecker matrix") {
  std::mt19937 rng(5);
  std::normal_distribution<double> normal;
  auto random_matrix = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal(rng);
    return m;
  };
  TensorSurrogate t;
  t.d = 2;
  t.kron_terms.push_back({0.7, {random_matrix(5, 4), random_matrix(6, 3)}});
  t.kron_terms.push_back({-0.2, {random_matrix(5, 4), random_matrix(6, 3)}});

  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(30, 12);
  for (const auto& term : t.kron_terms) {
    for (int i1 = 0; i1 < 5; ++i1)
      for (int i2 = 0; i2 < 6; ++i2)
        for (int j1 = 0; j1 < 4; ++j1)
          for (int j2 = 0; j2 < 3; ++j2)
            dense(i1 + 5 * i2, j1 + 4 * j2) += term.coeff *
                                               term.factors[0](i1, j1) *
                                               term.factors[1](i2, j2);
  }
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd z(12);
    for (int i = 0; i < 12; ++i) z(i) = normal(rng);
    CHECK((t.apply(z) - dense * z).norm() <= 1e-12 * dense.norm());
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) y(i) = normal(rng);
    CHECK((t.apply_adjoint(y) - dense.transpose() * y).norm() <=
          1e-12 * dense.norm());
  }
  CHECK(operator_norm(t) ==
        doctest::Approx(Eigen::JacobiSVD<Eigen::MatrixXd>(dense)
                            .singularValues()(0))
            .epsilon(1e-10));
}

TEST_CASE("iterative spectral norm agrees with a dense SVD") {
  std::mt19937 rng(17);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(2100, 1000);  // large enough to force the Lanczos path
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
  LinOp op;
  op.rows = m.rows();
  op.cols = m.cols();
  op.apply = [&m](const Eigen::VectorXd& z) { return Eigen::VectorXd(m * z); };
  op.apply_adjoint = [&m](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(m.transpose() * y);
  };
  const double iterative = spectral_norm(op);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  CHECK(iterative == doctest::Approx(svd.singularValues()(0)).epsilon(1e-9));
}

TEST_CASE("dimension mismatches are structural errors") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  const TensorSurrogate s2 = TensorSurrogate::full_operator(w.problem, 2);
  TensorAlgorithm wrong;
  wrong.dim = 3;
  CHECK_THROWS_AS(worst_case_error(wrong, s2, w.problem), StructuralError);

  TensorAlgorithm bad_point;
  bad_point.dim = 2;
  bad_point.terms.push_back(TensorTerm{{0.5}, {}});
  CHECK_THROWS_AS(worst_case_error(bad_point, s2, w.problem),
                  StructuralError);
}

TEST_CASE("oracle ceilings are enforced") {
  tqtest::World w = tqtest::modified_world(32, 8, true);
  CHECK_THROWS_AS(TensorSurrogate::full_operator(w.problem, 4), InputError);
  const auto big = discretize_problem(make_preset_kernel("sobolev"), 128);
  CHECK_THROWS_AS(TensorSurrogate::full_operator(big, 2), InputError);
}

TEST_SUITE_END();
