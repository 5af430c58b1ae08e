#include "tensorqpt/tensor_algorithm.hpp"

#include <algorithm>

namespace tensorqpt {

std::vector<MultiIndex> enumerate_index_set(int k, int q) {
  if (k < 1) throw InputError("enumerate_index_set: k must be >= 1");
  if (q < k) {
    throw InputError(
        "enumerate_index_set: q < k leaves no admissible multi-index");
  }
  std::vector<MultiIndex> out;
  std::vector<int> current(k, 1);
  // Lexicographic depth-first enumeration.
  auto recurse = [&](auto&& self, int pos, int budget) -> void {
    if (pos == k - 1) {
      for (int v = 1; v <= budget; ++v) {
        current[pos] = v;
        out.push_back(MultiIndex{current});
      }
      return;
    }
    const int remaining_dims = k - pos - 1;
    for (int v = 1; v + remaining_dims <= budget; ++v) {
      current[pos] = v;
      self(self, pos + 1, budget - v);
    }
  };
  recurse(recurse, 0, q);
  return out;
}

int TensorAlgorithm::rank_one_count() const {
  int c = 0;
  for (const auto& t : terms) c += static_cast<int>(t.outputs.size());
  return c;
}

TensorAlgorithm merge_terms(int dim, std::vector<TensorTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const TensorTerm& a, const TensorTerm& b) {
              return a.point < b.point;
            });
  TensorAlgorithm alg;
  alg.dim = dim;
  for (auto& t : terms) {
    if (!alg.terms.empty() && alg.terms.back().point == t.point) {
      auto& dst = alg.terms.back().outputs;
      dst.insert(dst.end(), std::make_move_iterator(t.outputs.begin()),
                 std::make_move_iterator(t.outputs.end()));
    } else {
      alg.terms.push_back(std::move(t));
    }
  }
  return alg;
}

}  // namespace tensorqpt
