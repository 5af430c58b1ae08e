#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "test_util.hpp"

using namespace tensorqpt;

TEST_SUITE_BEGIN("kernel");

TEST_CASE("sobolev preset evaluates 1 + min(x,y)") {
  const auto k = make_preset_kernel("sobolev");
  CHECK(k->eval(0.3, 0.7) == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(k->eval(0.7, 0.3) == doctest::Approx(1.3).epsilon(1e-15));
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(k->eval(x, x) == doctest::Approx(1.0 + x).epsilon(1e-15));
  }
  CHECK_THROWS_AS(k->eval(-0.1, 0.5), InputError);
  CHECK_THROWS_AS(k->eval(0.5, 1.5), InputError);
}

TEST_CASE("gram matrices of the preset") {
  const auto k = make_preset_kernel("sobolev");
  const Eigen::MatrixXd g1 = k->gram({0.0});
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0) == doctest::Approx(1.0));

  const Eigen::MatrixXd g2 = k->gram({0.0, 1.0});
  CHECK(g2(0, 0) == doctest::Approx(1.0));
  CHECK(g2(0, 1) == doctest::Approx(1.0));
  CHECK(g2(1, 0) == doctest::Approx(1.0));
  CHECK(g2(1, 1) == doctest::Approx(2.0));

  CHECK_THROWS_AS(k->gram({0.2, 0.2}), InputError);
}

TEST_CASE("gram symmetry and positive semidefiniteness on random points") {
  auto worlds = tqtest::modified_world(64);
  std::vector<KernelPtr> kernels = {make_preset_kernel("sobolev"),
                                    make_preset_kernel("rank1"),
                                    worlds.kernel};
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& kernel : kernels) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> pts;
      while (pts.size() < 10) {
        const double x = unif(rng);
        bool dup = false;
        for (double p : pts) dup = dup || (p == x);
        if (!dup) pts.push_back(x);
      }
      const Eigen::MatrixXd g = kernel->gram(pts);
      CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      CHECK(es.eigenvalues()(0) >= -1e-9 * g.trace());
    }
  }
}

TEST_CASE("rank-one modification: correction formula at the anchor") {
  tqtest::World base = tqtest::sobolev_world(64);
  const double t_star = default_anchor(base.spectrum, base.problem);
  const auto modified = rank_one_modify(base.spectrum, base.problem, t_star);
  const auto* mod = dynamic_cast<const ModifiedKernel*>(modified.get());
  REQUIRE(mod != nullptr);

  // Recompute the correction directly from the quadrature representation:
  // c = eta_1 - K(., t*)/eta_1(t*), ||c||^2 = a^T G a.
  int idx = -1;
  for (size_t i = 0; i < base.problem.nodes.size(); ++i) {
    if (base.problem.nodes[i] == t_star) idx = static_cast<int>(i);
  }
  REQUIRE(idx >= 0);
  const Eigen::VectorXd v1 = base.spectrum.sections.col(0);
  const double eta1_t = (base.problem.gram * v1)(idx);
  Eigen::VectorXd a = v1;
  a(idx) -= 1.0 / eta1_t;
  const double norm_sq = a.dot(base.problem.gram * a);
  const double f_at_t = a.dot(base.kernel->section(t_star, base.problem.nodes));

  const double expected =
      base.kernel->eval(t_star, t_star) - f_at_t * f_at_t / norm_sq;
  CHECK(modified->eval(t_star, t_star) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(mod->norm_sq() == doctest::Approx(norm_sq).epsilon(1e-12));
}

TEST_CASE("modified kernel gram on 8 equispaced points stays PSD") {
  tqtest::World w = tqtest::modified_world(64);
  std::vector<double> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(i / 7.0);
  const Eigen::MatrixXd g = w.kernel->gram(pts);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  CHECK(es.eigenvalues()(0) >= -1e-10);
}

TEST_CASE("rank_one_modify rejects kernels that already satisfy the "
          "condition") {
  const auto k = make_preset_kernel("rank1");
  const auto problem = discretize_problem(k, 64);
  const auto spectrum = eigensystem(problem, 4);
  const double t_star = default_anchor(spectrum, problem);
  CHECK_THROWS_WITH_AS(rank_one_modify(spectrum, problem, t_star),
                       doctest::Contains("already satisfied"), InputError);
}

TEST_CASE("rank_one_modify rejects anchors where eta_1 vanishes") {
  // g vanishes exactly at the node 31.5/64, so eta_1 does too.
  const double zero_at = 31.5 / 64.0;
  const auto k = std::make_shared<RankOneKernel>(
      [zero_at](double x) { return x - zero_at; }, "rank1-shifted");
  const auto problem = discretize_problem(k, 64);
  const auto spectrum = eigensystem(problem, 4);
  CHECK_THROWS_AS(rank_one_modify(spectrum, problem, zero_at),
                  AnchorPointError);
}

TEST_CASE("rank_one_modify restores the point condition") {
  tqtest::World base = tqtest::sobolev_world(128, 12);
  CHECK_FALSE(base.condition.ok);
  tqtest::World mod = tqtest::modified_world(128, 12);
  CHECK(mod.condition.ok);
  CHECK(mod.condition.residual <= 1e-6);
  const auto* mk = dynamic_cast<const ModifiedKernel*>(mod.kernel.get());
  REQUIRE(mk != nullptr);
  CHECK(mod.condition.t == *mk->anchor());

  // Section 6 restoration: lambda_1 survives, lambda_2 cannot grow.
  CHECK(mod.spectrum.lambdas(0) ==
        doctest::Approx(base.spectrum.lambdas(0)).epsilon(1e-8));
  CHECK(mod.spectrum.lambdas(1) <= base.spectrum.lambdas(1) + 1e-8);
}

TEST_CASE("reproducing identity on the surrogate") {
  tqtest::World w = tqtest::modified_world(64);
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd z(w.problem.rank);
    for (int i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd c = w.problem.basis * z;  // section coefficients
    for (int p = 0; p < 5; ++p) {
      const double x = unif(rng);
      const double via_coords = w.problem.eval_row(x).dot(z);
      const double via_sections =
          c.dot(w.kernel->section(x, w.problem.nodes));
      CHECK(via_coords ==
            doctest::Approx(via_sections)
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("kernel JSON round trip") {
  tqtest::World w = tqtest::modified_world(64);
  const std::string text = kernel_to_json(*w.kernel);
  const KernelPtr back = kernel_from_json(text);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = unif(rng), y = unif(rng);
    CHECK(back->eval(x, y) == doctest::Approx(w.kernel->eval(x, y))
                                  .epsilon(1e-14));
  }
  CHECK(back->id() == w.kernel->id());
  CHECK(*back->anchor() == *w.kernel->anchor());

  const KernelPtr preset = kernel_from_json(kernel_to_json(SobolevKernel{}));
  CHECK(preset->id() == "sobolev-min-plus-one");
}

TEST_SUITE_END();
