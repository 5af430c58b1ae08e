#ifndef TENSORQPT_TESTS_TEST_UTIL_HPP
#define TENSORQPT_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <random>

#include "tensorqpt/lab.hpp"
#include "tensorqpt/modification.hpp"

namespace tqtest {

// Independent oracle for the Sobolev kernel K(x,y) = 1 + min(x,y) with the
// L2 embedding target. The eigenproblem reduces to the transcendental
// equation tan(w) = 1/w on ((j-1) pi, (j-1) pi + pi/2), with
// lambda_j = 1/w_j^2; solved here by bisection, independent of the library.
inline double sobolev_lambda_analytic(int j) {
  const double pi = 3.14159265358979323846;
  double lo = (j - 1) * pi + 1e-12;
  double hi = (j - 1) * pi + pi / 2 - 1e-12;
  auto f = [](double w) { return std::tan(w) - 1.0 / w; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double w = 0.5 * (lo + hi);
  return 1.0 / (w * w);
}

struct World {
  tensorqpt::KernelPtr kernel;
  tensorqpt::DiscretizedProblem problem;
  tensorqpt::Spectrum spectrum;
  tensorqpt::PointCondition condition;
};

inline World sobolev_world(int m, int q = 16, bool normalize = false) {
  World w;
  w.kernel = tensorqpt::make_preset_kernel("sobolev");
  w.problem = tensorqpt::discretize_problem(w.kernel, m, normalize);
  w.spectrum = tensorqpt::eigensystem(w.problem, q);
  w.condition =
      tensorqpt::check_eigenfunction_point_condition(w.spectrum, w.problem);
  return w;
}

// Sobolev kernel after the rank-one modification at argmax |eta_1|.
inline World modified_world(int m, int q = 16, bool normalize = false) {
  World base = sobolev_world(m, q, false);
  const double t_star =
      tensorqpt::default_anchor(base.spectrum, base.problem);
  World w;
  w.kernel = tensorqpt::rank_one_modify(base.spectrum, base.problem, t_star);
  w.problem = tensorqpt::discretize_problem(w.kernel, m, normalize);
  w.spectrum = tensorqpt::eigensystem(w.problem, q);
  w.condition =
      tensorqpt::check_eigenfunction_point_condition(w.spectrum, w.problem);
  return w;
}

inline tensorqpt::OperatorSplit split_of(const World& w) {
  return tensorqpt::build_split(w.spectrum, w.problem, w.condition);
}

}  // namespace tqtest

#endif
