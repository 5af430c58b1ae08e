#include "tensorqpt/smolyak.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace tensorqpt {

namespace {

void check_nesting(const std::vector<LinearAlgorithm1D>& levels, int needed) {
  if (static_cast<int>(levels.size()) < needed) {
    throw StructuralError("smolyak_algorithm: univariate sequence too short");
  }
  for (int i = 0; i + 1 < needed; ++i) {
    std::set<double> next(levels[i + 1].points.begin(),
                          levels[i + 1].points.end());
    for (double p : levels[i].points) {
      if (!next.count(p)) {
        throw StructuralError(
            "smolyak_algorithm: univariate point sets are not nested");
      }
    }
  }
}

long binomial_small(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Expand coeff * U_{i_1} (x) ... (x) U_{i_k} into terms.
void expand_product(const std::vector<LinearAlgorithm1D>& levels,
                    const MultiIndex& idx, double coeff,
                    std::vector<TensorTerm>* out) {
  const int k = static_cast<int>(idx.i.size());
  std::vector<int> counter(k, 0);
  for (;;) {
    TensorTerm term;
    term.point.resize(k);
    RankOneOutput ro;
    ro.coeff = coeff;
    ro.factors.resize(k);
    for (int l = 0; l < k; ++l) {
      const LinearAlgorithm1D& u = levels[idx.i[l] - 1];
      term.point[l] = u.points[counter[l]];
      ro.factors[l] = u.outputs.col(counter[l]);
    }
    term.outputs.push_back(std::move(ro));
    out->push_back(std::move(term));
    int l = 0;
    for (; l < k; ++l) {
      if (++counter[l] < levels[idx.i[l] - 1].cardinality()) break;
      counter[l] = 0;
    }
    if (l == k) break;
  }
}

}  // namespace

TensorAlgorithm smolyak_algorithm(const std::vector<LinearAlgorithm1D>& levels,
                                  int k, int q) {
  if (k < 1) throw StructuralError("smolyak_algorithm: k must be >= 1");
  if (q < k) throw StructuralError("smolyak_algorithm: level q must be >= k");
  check_nesting(levels, q - k + 1);

  // Combination technique for the simplex index set |i|_1 <= q:
  // sum over q-k+1 <= |i| <= q of (-1)^{q-|i|} C(k-1, q-|i|) (x)_l U_{i_l}.
  std::vector<TensorTerm> raw;
  for (const MultiIndex& idx : enumerate_index_set(k, q)) {
    const int s = idx.order_sum();
    if (s < q - k + 1) continue;
    const double coeff =
        ((q - s) % 2 == 0 ? 1.0 : -1.0) * binomial_small(k - 1, q - s);
    if (coeff == 0.0) continue;
    expand_product(levels, idx, coeff, &raw);
  }
  return merge_terms(k, std::move(raw));
}

TensorAlgorithm smolyak_algorithm_difference_form(
    const std::vector<LinearAlgorithm1D>& levels, int k, int q) {
  if (k < 1) throw StructuralError("smolyak_algorithm: k must be >= 1");
  if (q < k) throw StructuralError("smolyak_algorithm: level q must be >= k");
  check_nesting(levels, q - k + 1);

  std::vector<TensorTerm> raw;
  for (const MultiIndex& idx : enumerate_index_set(k, q)) {
    // (x)_l (U_{i_l} - U_{i_l - 1}) expanded over sign choices; U_0 = 0.
    for (int mask = 0; mask < (1 << k); ++mask) {
      MultiIndex use = idx;
      double coeff = 1.0;
      bool vanish = false;
      for (int l = 0; l < k; ++l) {
        if (mask & (1 << l)) {
          if (idx.i[l] == 1) {
            vanish = true;
            break;
          }
          use.i[l] = idx.i[l] - 1;
          coeff = -coeff;
        }
      }
      if (vanish) continue;
      expand_product(levels, use, coeff, &raw);
    }
  }
  return merge_terms(k, std::move(raw));
}

RateFit fit_rate(std::vector<RateSample> samples) {
  if (samples.size() < 4) {
    throw InputError("fit_rate: need at least 4 samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    if (!(s.error > 0.0)) {
      throw InputError("fit_rate: errors must be positive");
    }
    if (!(s.n >= 1.0)) throw InputError("fit_rate: cardinality must be >= 1");
    const double x = std::log(s.n);
    const double y = std::log(s.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double cnt = static_cast<double>(samples.size());
  const double denom = cnt * sxx - sx * sx;
  if (denom <= 0.0) throw InputError("fit_rate: degenerate sample design");
  const double slope = (cnt * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / cnt;

  RateFit fit;
  fit.r = -slope;
  if (!(fit.r > 0.0)) {
    throw RateFailure("fit_rate: fitted rate r <= 0; no polynomial decay");
  }
  // Envelope inflation: alpha n^{-r} >= e on every sample.
  double alpha = 0.0;
  double rss = 0.0;
  for (const auto& s : samples) {
    alpha = std::max(alpha, s.error * std::pow(s.n, fit.r));
    const double pred = intercept + slope * std::log(s.n);
    rss += (std::log(s.error) - pred) * (std::log(s.error) - pred);
  }
  fit.alpha = alpha;
  fit.residual = std::sqrt(rss / cnt);
  fit.samples = std::move(samples);
  return fit;
}

std::string rate_fit_to_json(const RateFit& fit) {
  nlohmann::json j;
  j["alpha"] = fit.alpha;
  j["r"] = fit.r;
  j["residual"] = fit.residual;
  auto arr = nlohmann::json::array();
  for (const auto& s : fit.samples) {
    arr.push_back({{"n", s.n}, {"error", s.error}, {"k", s.k}, {"q", s.q}});
  }
  j["samples"] = arr;
  return j.dump(2);
}

}  // namespace tensorqpt
