#include "tensorqpt/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace tensorqpt {

namespace {
constexpr double kTolZero = 1e-10;
constexpr double kTolCondition = 1e-6;
}  // namespace

double Spectrum::eigenfunction_value(const DiscretizedProblem& p, int j,
                                     double t) const {
  return sections.col(j).dot(p.kernel->section(t, p.nodes));
}

Spectrum eigensystem(const DiscretizedProblem& problem, int q) {
  if (q < 1) throw InputError("eigensystem: q must be positive");
  if (q > problem.m) {
    throw InputError("eigensystem: q exceeds the surrogate size m");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      problem.sampling.transpose() * problem.sampling);
  if (es.info() != Eigen::Success) {
    throw NumericalError(
        "eigensystem: dense symmetric eigensolve failed to converge (m=" +
        std::to_string(problem.m) + ", rank=" + std::to_string(problem.rank) +
        ")");
  }

  Spectrum s;
  s.kernel_id = problem.kernel->id();
  s.m = problem.m;
  s.rank = std::min(q, problem.rank);
  s.lambdas = Eigen::VectorXd::Zero(q);
  s.eigvecs = Eigen::MatrixXd::Zero(problem.rank, q);
  for (int j = 0; j < s.rank; ++j) {
    const int src = problem.rank - 1 - j;  // Eigen sorts ascending
    s.lambdas(j) = std::max(0.0, es.eigenvalues()(src));
    s.eigvecs.col(j) = es.eigenvectors().col(src);
  }
  s.sections = problem.basis * s.eigvecs;

  // Sign convention: first section coefficient of magnitude > tol positive.
  for (int j = 0; j < s.rank; ++j) {
    for (int i = 0; i < s.sections.rows(); ++i) {
      const double v = s.sections(i, j);
      if (std::abs(v) > kTolZero) {
        if (v < 0.0) {
          s.sections.col(j) = -s.sections.col(j);
          s.eigvecs.col(j) = -s.eigvecs.col(j);
        }
        break;
      }
    }
  }
  return s;
}

double estimate_decay(std::vector<double> sequence) {
  const int n = static_cast<int>(sequence.size());
  if (n < 8) throw InputError("estimate_decay: need at least 8 values");
  std::sort(sequence.begin(), sequence.end(), std::greater<double>());
  const int lo = (n + 1) / 2;  // fit the tail [N/2, N], 1-based
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = lo; i <= n; ++i) {
    const double a = sequence[i - 1];
    if (!(a > 0.0)) {
      throw InputError("estimate_decay: nonpositive value in the fitted tail");
    }
    const double x = std::log(static_cast<double>(i));
    const double y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double denom = cnt * sxx - sx * sx;
  if (denom <= 0.0) throw InputError("estimate_decay: degenerate abscissae");
  const double slope = (cnt * sxy - sx * sy) / denom;
  if (slope >= -0.05) return 0.0;
  return -slope;
}

// Full-space residual of eta_1 against delta * K(t,t)^{-1/2} K(., t).
// The component of K(., t) orthogonal to the surrogate span is accounted
// for exactly through K(t,t) - ||proj||^2.
double point_condition_residual(const Spectrum& s, const DiscretizedProblem& p,
                                double t, int* sign_out) {
  const double ktt = p.kernel->eval(t, t);
  if (ktt <= kTolZero) {
    if (sign_out) *sign_out = +1;
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::VectorXd et = p.eval_row(t);
  const double scale = 1.0 / std::sqrt(ktt);
  const double outside = std::max(0.0, ktt - et.squaredNorm());
  const Eigen::VectorXd u1 = s.eigvecs.col(0);
  double best = std::numeric_limits<double>::infinity();
  int best_sign = +1;
  for (int sign : {+1, -1}) {
    const double in_span = (u1 - sign * scale * et).squaredNorm();
    const double r = std::sqrt(in_span + scale * scale * outside);
    if (r < best) {
      best = r;
      best_sign = sign;
    }
  }
  if (sign_out) *sign_out = best_sign;
  return best;
}

PointCondition check_eigenfunction_point_condition(
    const Spectrum& spectrum, const DiscretizedProblem& problem,
    const std::vector<double>& extra_candidates) {
  if (spectrum.lambdas.size() < 2) {
    throw InputError("point condition: need a spectrum with q >= 2");
  }
  std::vector<double> candidates = problem.nodes;
  if (auto a = problem.kernel->anchor()) candidates.push_back(*a);
  candidates.insert(candidates.end(), extra_candidates.begin(),
                    extra_candidates.end());

  PointCondition out;
  out.min_residual = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    int sign = +1;
    const double r = point_condition_residual(spectrum, problem, t, &sign);
    if (r < out.min_residual) {
      out.min_residual = r;
      out.t = t;
      out.sign = sign;
      out.residual = r;
    }
  }
  out.ok = out.min_residual <= kTolCondition;
  if (out.ok) {
    double worst = 0.0;
    for (int j = 1; j < spectrum.rank; ++j) {
      worst = std::max(
          worst, std::abs(spectrum.eigenfunction_value(problem, j, out.t)));
    }
    out.max_higher_abs = worst;
  }
  return out;
}

std::string spectrum_to_json(const Spectrum& s, const PointCondition* pc,
                             double decay_lambda) {
  nlohmann::json j;
  std::vector<double> lambdas(s.lambdas.data(),
                              s.lambdas.data() + s.lambdas.size());
  j["lambdas"] = lambdas;
  j["gap"] = s.gap();
  if (pc && pc->ok) {
    j["t"] = pc->t;
    j["delta"] = pc->sign;
  } else {
    j["t"] = nullptr;
    j["delta"] = nullptr;
  }
  j["decay_lambda"] = decay_lambda;
  j["m"] = s.m;
  j["kernel_id"] = s.kernel_id;
  return j.dump(2);
}

}  // namespace tensorqpt
