#ifndef TENSORQPT_QPT_HPP
#define TENSORQPT_QPT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>

#include "tensorqpt/oracle.hpp"
#include "tensorqpt/smolyak.hpp"

namespace tensorqpt {

using BigInt = boost::multiprecision::cpp_int;

/// j in {1,2}^d; |j|_2 counts the entries equal to 2.
struct Pattern {
  std::vector<int> j;
  int count2() const;
  std::vector<int> positions2() const;  // strictly increasing, 0-based
  int dim() const { return static_cast<int>(j.size()); }
};

/// k = min(d, ceil(2 ln(2/eps) / ln(1/lambda2))); guarantees
/// lambda2^{k/2} <= eps/2 whenever k < d. lambda2 = 0 yields k = 0 (finite
/// rank); lambda2 >= 1 throws AssemblyError (no spectral gap).
int truncation_level(double eps, double lambda2, int d);

/// Exact sum_{l=0}^{k} C(d, l) in unbounded integers.
BigInt index_count(int d, int k);

/// Number of samples per retained pattern: ceil((4 alpha d^k / eps)^{1/r})
/// when k <= d/2, else ceil((4 alpha 2^d / eps)^{1/r}).
long choose_n(int d, double eps, const RateFit& rate, int k);

/// Splice a Smolyak component for the 2-positions of `pattern` with anchor
/// samples at the 1-positions; pass nullptr for |j|_2 = 0.
TensorAlgorithm build_pattern_algorithm(const Pattern& pattern,
                                        const OperatorSplit& split,
                                        const DiscretizedProblem& problem,
                                        const TensorAlgorithm* component);

/// Builds, caches, and (when asked) measures the per-dimension Smolyak
/// components A_{k,q} from one nested greedy level family.
class ComponentLibrary {
 public:
  ComponentLibrary(const OperatorSplit& split,
                   const DiscretizedProblem& problem);

  /// Materialized component (k >= 1, q >= k).
  const TensorAlgorithm& component(int k, int q);
  /// Distinct-point count of A_{k,q}; exact for materialized levels and
  /// computed from the idealized doubling level sizes otherwise.
  BigInt component_cardinality(int k, int q) const;
  /// Smallest q with cardinality >= n.
  int level_for_cardinality(int k, long n) const;
  /// Measured worst-case error of A_{k,q} against V2^{(x) k} (cached).
  double measured_error(int k, int q);

  /// Rate samples for all (k, q) with k <= k_max and cardinality <= n_cap.
  std::vector<RateSample> collect_samples(int k_max, long n_cap);

  const std::vector<LinearAlgorithm1D>& levels() const { return levels_; }
  const OperatorSplit& split() const { return split_; }
  const DiscretizedProblem& problem() const { return problem_; }

 private:
  void ensure_levels(int top);

  const OperatorSplit& split_;
  const DiscretizedProblem& problem_;
  std::vector<LinearAlgorithm1D> levels_;  // level i: 2^i greedy points
  bool levels_saturated_ = false;
  std::map<std::pair<int, int>, TensorAlgorithm> components_;
  std::map<std::pair<int, int>, double> errors_;
};

struct QptComponentRef {
  int k2 = 0;        // shell |j|_2
  int q = 0;         // chosen level
  BigInt cardinality;  // samples used by one pattern of this shell
};

struct QptPlan {
  int d = 0;
  double eps = 0.0;
  int k = 0;
  long n = 0;       // target cardinality from the two-case rule
  long n_used = 0;  // max per-pattern cardinality actually used
  double anchor_t = 0.0;
  int anchor_sign = +1;
  double anchor_ktt = 0.0;
  double lambda2 = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  std::vector<QptComponentRef> components;  // one per shell 1..k
  BigInt card_bound;     // n_used * sum_l C(d,l)
  BigInt card_prededup;  // sum_l C(d,l) * card_l
  BigInt card_dedup;     // distinct sample vectors (materialized plans)
  double predicted_error = 0.0;
  bool materialized = false;
};

struct AssembledQpt {
  QptPlan plan;
  std::optional<TensorAlgorithm> algorithm;  // present when materialized
};

/// Full assembly of the eps-algorithm: truncation level, n selection,
/// per-pattern splicing over all |j|_2 <= k shells, and exact cardinality
/// accounting. Plans with d > materialize_limit are counting-only.
/// Requires a normalized problem and a positive fitted rate; throws
/// AssemblyError naming the failing assumption otherwise.
AssembledQpt assemble_qpt_algorithm(int d, double eps,
                                    const Spectrum& spectrum,
                                    const OperatorSplit& split,
                                    const DiscretizedProblem& problem,
                                    const RateFit& rate,
                                    ComponentLibrary& library,
                                    int materialize_limit = 24);

/// Measures component errors and fits the pooled power-law envelope,
/// extending the measured levels until every level that a materialized
/// (d <= oracle_ceiling) cell would use is among the fitted samples.
RateFit measure_rate_for_cells(ComponentLibrary& library,
                               const std::vector<std::pair<int, double>>& cells,
                               double lambda2, int oracle_ceiling);

struct EnvelopeFit {
  double c = 0.0;
  double t_qpt = 0.0;
};

/// Envelope fit of ln(card) against x = (1 + ln eps^{-1})(1 + ln d):
/// least squares for t_qpt, C inflated so card <= C exp(t_qpt x) on all
/// points. Needs >= 6 points spanning >= 2 distinct d and >= 2 distinct eps.
EnvelopeFit qpt_envelope_fit(
    const std::vector<std::tuple<int, double, BigInt>>& data);

std::string plan_to_json(const QptPlan& plan);

}  // namespace tensorqpt

#endif
