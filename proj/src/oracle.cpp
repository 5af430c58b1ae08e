#include "tensorqpt/oracle.hpp"

#include <cmath>

#include <json.hpp>

namespace tensorqpt {

namespace {

// y = (A_1 (x) ... (x) A_d) x via mode products with axis rotation.
// Layout: axis-1 index fastest (column-major tensor).
Eigen::VectorXd kron_apply(const std::vector<Eigen::MatrixXd>& factors,
                           Eigen::VectorXd x, bool adjoint) {
  const int d = static_cast<int>(factors.size());
  for (int l = 0; l < d; ++l) {
    const Eigen::MatrixXd& a = factors[l];
    const Eigen::Index in = adjoint ? a.rows() : a.cols();
    const Eigen::Index out = adjoint ? a.cols() : a.rows();
    const Eigen::Index rest = x.size() / in;
    Eigen::Map<const Eigen::MatrixXd> xm(x.data(), in, rest);
    Eigen::MatrixXd y =
        adjoint ? Eigen::MatrixXd(a.transpose() * xm) : Eigen::MatrixXd(a * xm);
    // Rotate axes: flatten y^T so the next axis comes first.
    Eigen::MatrixXd yt = y.transpose();
    x = Eigen::Map<Eigen::VectorXd>(yt.data(), out * rest);
  }
  return x;
}

// <a_1 (x) ... (x) a_d, z> by contracting one axis at a time.
double kron_contract(const std::vector<Eigen::VectorXd>& vecs,
                     const Eigen::VectorXd& z) {
  Eigen::VectorXd cur = z;
  for (const auto& a : vecs) {
    const Eigen::Index n = a.size();
    const Eigen::Index rest = cur.size() / n;
    Eigen::Map<const Eigen::MatrixXd> xm(cur.data(), n, rest);
    cur = xm.transpose() * a;
  }
  return cur(0);
}

// a_1 (x) ... (x) a_d as a flat vector (axis-1 fastest).
Eigen::VectorXd kron_vector(const std::vector<Eigen::VectorXd>& vecs) {
  Eigen::VectorXd w = vecs[0];
  for (size_t l = 1; l < vecs.size(); ++l) {
    Eigen::MatrixXd outer = w * vecs[l].transpose();
    w = Eigen::Map<Eigen::VectorXd>(outer.data(), outer.size());
  }
  return w;
}

void check_ceiling(int d, int m) {
  if (d < 1 || d > kOracleMaxDim) {
    throw InputError("oracle: tensor dimension must be in [1, " +
                     std::to_string(kOracleMaxDim) + "], got " +
                     std::to_string(d));
  }
  if (m > kOracleMaxFactorSize) {
    throw InputError("oracle: per-factor surrogate size exceeds " +
                     std::to_string(kOracleMaxFactorSize));
  }
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Explicit Kronecker product in the axis-1-fastest layout, i.e.
// kron(A_d, ..., A_1) in the conventional ordering.
Eigen::MatrixXd kron_dense(const std::vector<Eigen::MatrixXd>& factors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  for (const auto& a : factors) {
    Eigen::MatrixXd next(m.rows() * a.rows(), m.cols() * a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) =
            a(i, j) * m;
      }
    }
    // The running block must stay the fastest index: accumulate with the
    // new factor on the outside.
    std::swap(m, next);
  }
  return m;
}

constexpr std::int64_t kDenseLimit = 2'000'000;

Eigen::MatrixXd dense_target(const TensorSurrogate& target) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(target.rows(), target.cols());
  for (const auto& term : target.kron_terms) {
    m += term.coeff * kron_dense(term.factors);
  }
  return m;
}

Eigen::MatrixXd dense_algorithm(const TensorAlgorithm& algorithm,
                                const DiscretizedProblem& problem,
                                std::int64_t rows, std::int64_t cols) {
  int ros = algorithm.rank_one_count();
  Eigen::MatrixXd u(rows, std::max(ros, 1));
  Eigen::MatrixXd v(cols, std::max(ros, 1));
  if (ros == 0) return Eigen::MatrixXd::Zero(rows, cols);
  int col = 0;
  for (const auto& term : algorithm.terms) {
    std::vector<Eigen::VectorXd> eval_rows;
    for (double x : term.point) eval_rows.push_back(problem.eval_row(x));
    const Eigen::VectorXd vt = kron_vector(eval_rows);
    for (const auto& ro : term.outputs) {
      u.col(col) = ro.coeff * kron_vector(ro.factors);
      v.col(col) = vt;
      ++col;
    }
  }
  return u * v.transpose();
}

}  // namespace

std::int64_t TensorSurrogate::rows() const {
  std::int64_t r = 1;
  for (const auto& f : kron_terms.front().factors) r *= f.rows();
  return r;
}

std::int64_t TensorSurrogate::cols() const {
  std::int64_t c = 1;
  for (const auto& f : kron_terms.front().factors) c *= f.cols();
  return c;
}

Eigen::VectorXd TensorSurrogate::apply(const Eigen::VectorXd& z) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows());
  for (const auto& term : kron_terms) {
    y += term.coeff * kron_apply(term.factors, z, /*adjoint=*/false);
  }
  return y;
}

Eigen::VectorXd TensorSurrogate::apply_adjoint(const Eigen::VectorXd& y) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(cols());
  for (const auto& term : kron_terms) {
    z += term.coeff * kron_apply(term.factors, y, /*adjoint=*/true);
  }
  return z;
}

TensorSurrogate TensorSurrogate::full_operator(
    const DiscretizedProblem& problem, int d) {
  check_ceiling(d, problem.m);
  TensorSurrogate t;
  t.d = d;
  t.kron_terms.push_back(
      {1.0, std::vector<Eigen::MatrixXd>(d, problem.sampling)});
  return t;
}

TensorSurrogate TensorSurrogate::from_pattern(const OperatorSplit& split,
                                              const DiscretizedProblem& problem,
                                              const std::vector<int>& j) {
  const int d = static_cast<int>(j.size());
  check_ceiling(d, problem.m);
  TensorSurrogate t;
  t.d = d;
  KronTerm term;
  term.coeff = 1.0;
  for (int l = 0; l < d; ++l) {
    if (j[l] != 1 && j[l] != 2) {
      throw InputError("pattern entries must be 1 or 2");
    }
    term.factors.push_back(j[l] == 1 ? split.v1 : split.v2);
  }
  t.kron_terms.push_back(std::move(term));
  return t;
}

TensorSurrogate TensorSurrogate::tail(const OperatorSplit& split,
                                      const DiscretizedProblem& problem, int d,
                                      int k) {
  check_ceiling(d, problem.m);
  TensorSurrogate t;
  t.d = d;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<int> j(d, 1);
    int count2 = 0;
    for (int l = 0; l < d; ++l) {
      if (mask & (1 << l)) {
        j[l] = 2;
        ++count2;
      }
    }
    if (count2 <= k) continue;
    KronTerm term;
    term.coeff = 1.0;
    for (int l = 0; l < d; ++l) {
      term.factors.push_back(j[l] == 1 ? split.v1 : split.v2);
    }
    t.kron_terms.push_back(std::move(term));
  }
  if (t.kron_terms.empty()) {
    throw InputError("tail: no patterns with |j|_2 > k exist for k >= d");
  }
  return t;
}

LinOp residual_operator(const TensorAlgorithm& algorithm,
                        const TensorSurrogate& target,
                        const DiscretizedProblem& problem) {
  if (algorithm.dim != target.d) {
    throw StructuralError("worst_case_error: algorithm/target dimension "
                          "mismatch");
  }
  const int d = target.d;
  for (const auto& term : algorithm.terms) {
    if (static_cast<int>(term.point.size()) != d) {
      throw StructuralError("worst_case_error: sample vector dimension "
                            "mismatch");
    }
    for (const auto& ro : term.outputs) {
      if (static_cast<int>(ro.factors.size()) != d) {
        throw StructuralError("worst_case_error: output tensor dimension "
                              "mismatch");
      }
      for (const auto& f : ro.factors) {
        if (f.size() != problem.m) {
          throw StructuralError(
              "worst_case_error: output factor size does not match the "
              "surrogate");
        }
      }
    }
  }

  // Precompute evaluation rows per term.
  struct ReadyTerm {
    std::vector<Eigen::VectorXd> eval_rows;
    const TensorTerm* term;
  };
  auto ready = std::make_shared<std::vector<ReadyTerm>>();
  ready->reserve(algorithm.terms.size());
  for (const auto& term : algorithm.terms) {
    ReadyTerm rt;
    rt.term = &term;
    for (double x : term.point) rt.eval_rows.push_back(problem.eval_row(x));
    ready->push_back(std::move(rt));
  }

  auto target_copy = std::make_shared<TensorSurrogate>(target);
  const std::int64_t rows = ipow(problem.m, d);
  const std::int64_t cols = ipow(problem.rank, d);

  LinOp op;
  op.rows = rows;
  op.cols = cols;
  op.apply = [target_copy, ready, rows](const Eigen::VectorXd& z) {
    Eigen::VectorXd y = target_copy->apply(z);
    for (const auto& rt : *ready) {
      const double f = kron_contract(rt.eval_rows, z);
      if (f == 0.0) continue;
      for (const auto& ro : rt.term->outputs) {
        y -= (f * ro.coeff) * kron_vector(ro.factors);
      }
    }
    return y;
  };
  op.apply_adjoint = [target_copy, ready, cols](const Eigen::VectorXd& y) {
    Eigen::VectorXd z = target_copy->apply_adjoint(y);
    for (const auto& rt : *ready) {
      double w = 0.0;
      for (const auto& ro : rt.term->outputs) {
        w += ro.coeff * kron_contract(ro.factors, y);
      }
      if (w == 0.0) continue;
      z -= w * kron_vector(rt.eval_rows);
    }
    return z;
  };
  return op;
}

double worst_case_error(const TensorAlgorithm& algorithm,
                        const TensorSurrogate& target,
                        const DiscretizedProblem& problem) {
  const LinOp op = residual_operator(algorithm, target, problem);
  if (op.rows * op.cols <= kDenseLimit) {
    const Eigen::MatrixXd r =
        dense_target(target) -
        dense_algorithm(algorithm, problem, op.rows, op.cols);
    return matrix_spectral_norm(r);
  }
  return spectral_norm(op);
}

double operator_norm(const TensorSurrogate& target) {
  if (target.rows() * target.cols() <= kDenseLimit) {
    return matrix_spectral_norm(dense_target(target));
  }
  LinOp op;
  op.rows = target.rows();
  op.cols = target.cols();
  op.apply = [&target](const Eigen::VectorXd& z) { return target.apply(z); };
  op.apply_adjoint = [&target](const Eigen::VectorXd& y) {
    return target.apply_adjoint(y);
  };
  return spectral_norm(op);
}

double initial_error(const Spectrum& spectrum, int d) {
  if (!(spectrum.lambdas(0) > 0.0)) {
    throw InputError("initial_error: lambda_1 must be positive");
  }
  return std::pow(spectrum.lambdas(0), 0.5 * d);
}

std::string checks_to_json(const std::vector<CheckRecord>& checks) {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"check_id", c.check_id},
                   {"expected", c.expected},
                   {"measured", c.measured},
                   {"tol", c.tol},
                   {"pass", c.pass}});
  }
  return arr.dump(2);
}

}  // namespace tensorqpt
