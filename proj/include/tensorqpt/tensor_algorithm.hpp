#ifndef TENSORQPT_TENSOR_ALGORITHM_HPP
#define TENSORQPT_TENSOR_ALGORITHM_HPP

#include <Eigen/Dense>
#include <vector>

#include "tensorqpt/errors.hpp"

namespace tensorqpt {

struct MultiIndex {
  std::vector<int> i;  // componentwise >= 1
  int order_sum() const {
    int s = 0;
    for (int v : i) s += v;
    return s;
  }
};

/// All multi-indices of dimension k with |i|_1 <= q, duplicate-free and
/// lexicographically sorted. Throws InputError when q < k (empty set).
std::vector<MultiIndex> enumerate_index_set(int k, int q);

/// One rank-one output tensor coeff * g_1 (x) ... (x) g_d.
struct RankOneOutput {
  double coeff = 1.0;
  std::vector<Eigen::VectorXd> factors;  // per-axis target coordinates
};

/// All rank-one outputs attached to one distinct sample vector.
struct TensorTerm {
  std::vector<double> point;  // in D_1^d
  std::vector<RankOneOutput> outputs;
};

/// A f = sum_terms f(point) * (sum of that term's rank-one outputs).
/// Cardinality is the number of distinct sample vectors.
struct TensorAlgorithm {
  int dim = 0;
  std::vector<TensorTerm> terms;
  int cardinality() const { return static_cast<int>(terms.size()); }
  int rank_one_count() const;
};

/// Merge terms with bitwise-identical sample vectors, accumulating their
/// rank-one outputs; terms come out sorted by sample vector.
TensorAlgorithm merge_terms(int dim, std::vector<TensorTerm> terms);

}  // namespace tensorqpt

#endif
