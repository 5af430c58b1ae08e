#include "tensorqpt/qpt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tensorqpt/greedy.hpp"

namespace tensorqpt {

namespace {

// Ceiling with a small relative slack so analytically integral inputs do not
// round up from floating-point noise.
long ceil_with_slack(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<long>(r);
  }
  return static_cast<long>(std::ceil(x));
}

BigInt binomial_big(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

long to_long_checked(const BigInt& v, const char* what) {
  if (v > BigInt(9'000'000'000'000'000LL)) {
    throw InputError(std::string(what) + " exceeds the supported range");
  }
  return v.convert_to<long>();
}

}  // namespace

int Pattern::count2() const {
  int c = 0;
  for (int v : j) c += (v == 2);
  return c;
}

std::vector<int> Pattern::positions2() const {
  std::vector<int> pos;
  for (int l = 0; l < static_cast<int>(j.size()); ++l) {
    if (j[l] == 2) pos.push_back(l);
  }
  return pos;
}

int truncation_level(double eps, double lambda2, int d) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InputError("truncation_level: eps must lie in (0,1)");
  }
  if (d < 1) throw InputError("truncation_level: d must be >= 1");
  if (lambda2 < 0.0) {
    throw InputError("truncation_level: lambda2 must be nonnegative");
  }
  if (lambda2 >= 1.0) {
    throw AssemblyError(
        "truncation_level: gap violation, lambda2 >= lambda1 (= 1)");
  }
  if (lambda2 < 1e-300) return 0;  // finite-rank problem, tail is empty
  const double x = 2.0 * std::log(2.0 / eps) / std::log(1.0 / lambda2);
  const long k0 = ceil_with_slack(x);
  return static_cast<int>(std::min<long>(d, std::max<long>(k0, 1)));
}

BigInt index_count(int d, int k) {
  if (k < 0 || k > d) throw InputError("index_count: need 0 <= k <= d");
  BigInt total = 0;
  BigInt c = 1;  // C(d, 0)
  for (int l = 0; l <= k; ++l) {
    total += c;
    c *= (d - l);
    c /= (l + 1);
  }
  return total;
}

long choose_n(int d, double eps, const RateFit& rate, int k) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InputError("choose_n: eps must lie in (0,1)");
  }
  if (!(rate.r > 0.0)) {
    throw RateFailure("choose_n: rate failure, fitted r <= 0");
  }
  const double base = (2 * k <= d)
                          ? 4.0 * rate.alpha * std::pow(double(d), k) / eps
                          : 4.0 * rate.alpha * std::pow(2.0, d) / eps;
  const double n_real = std::pow(base, 1.0 / rate.r);
  if (!(n_real < 9e15)) {
    throw InputError("choose_n: required n exceeds the supported range");
  }
  return std::max<long>(1, ceil_with_slack(n_real));
}

TensorAlgorithm build_pattern_algorithm(const Pattern& pattern,
                                        const OperatorSplit& split,
                                        const DiscretizedProblem& problem,
                                        const TensorAlgorithm* component) {
  const int d = pattern.dim();
  const int k2 = pattern.count2();
  for (int v : pattern.j) {
    if (v != 1 && v != 2) {
      throw StructuralError("build_pattern_algorithm: pattern entries must "
                            "be 1 or 2");
    }
  }

  TensorAlgorithm alg;
  alg.dim = d;
  if (k2 == 0) {
    if (component != nullptr) {
      throw StructuralError(
          "build_pattern_algorithm: |j|_2 = 0 takes no Smolyak component");
    }
    TensorTerm term;
    term.point.assign(d, split.t);
    RankOneOutput ro;
    ro.coeff = std::pow(static_cast<double>(split.sign), d) /
               std::pow(split.ktt, 0.5 * d);
    ro.factors.assign(d, split.s1_eta1);
    term.outputs.push_back(std::move(ro));
    alg.terms.push_back(std::move(term));
    return alg;
  }

  if (component == nullptr || component->dim != k2) {
    throw StructuralError(
        "build_pattern_algorithm: Smolyak component dimension must equal "
        "|j|_2");
  }
  const std::vector<int> positions = pattern.positions2();
  const double prefix = std::pow(static_cast<double>(split.sign), d - k2) /
                        std::pow(split.ktt, 0.5 * (d - k2));

  alg.terms.reserve(component->terms.size());
  for (const TensorTerm& src : component->terms) {
    TensorTerm term;
    term.point.assign(d, split.t);
    for (int i = 0; i < k2; ++i) term.point[positions[i]] = src.point[i];
    term.outputs.reserve(src.outputs.size());
    for (const RankOneOutput& ro : src.outputs) {
      RankOneOutput spliced;
      spliced.coeff = prefix * ro.coeff;
      spliced.factors.assign(d, split.s1_eta1);
      for (int i = 0; i < k2; ++i) spliced.factors[positions[i]] = ro.factors[i];
      term.outputs.push_back(std::move(spliced));
    }
    alg.terms.push_back(std::move(term));
  }
  return alg;
}

ComponentLibrary::ComponentLibrary(const OperatorSplit& split,
                                   const DiscretizedProblem& problem)
    : split_(split), problem_(problem) {}

void ComponentLibrary::ensure_levels(int top) {
  if (static_cast<int>(levels_.size()) >= top) return;
  const long want = 1L << (top - 1);
  const GreedySelection greedy =
      select_points_greedy(*problem_.kernel, static_cast<int>(want));
  levels_saturated_ = greedy.saturated;
  levels_.clear();
  for (int i = 1; i <= top; ++i) {
    const long size =
        std::min<long>(1L << (i - 1),
                       static_cast<long>(greedy.points.size()));
    std::vector<double> pts(greedy.points.begin(),
                            greedy.points.begin() + size);
    levels_.push_back(univariate_algorithm(split_, pts, problem_));
  }
}

const TensorAlgorithm& ComponentLibrary::component(int k, int q) {
  const auto key = std::make_pair(k, q);
  auto it = components_.find(key);
  if (it != components_.end()) return it->second;
  ensure_levels(q - k + 1);
  if (levels_saturated_) {
    const BigInt ideal = component_cardinality(k, q);
    // With a saturated greedy sequence the materialized grid may be smaller
    // than the idealized count used for planning; refuse silently wrong
    // plans.
    TensorAlgorithm built = smolyak_algorithm(levels_, k, q);
    if (BigInt(built.cardinality()) < ideal) {
      throw AssemblyError(
          "component: univariate candidate grid exhausted; materialized "
          "Smolyak grid is smaller than planned");
    }
    return components_.emplace(key, std::move(built)).first->second;
  }
  return components_.emplace(key, smolyak_algorithm(levels_, k, q))
      .first->second;
}

BigInt ComponentLibrary::component_cardinality(int k, int q) const {
  const auto it = components_.find(std::make_pair(k, q));
  if (it != components_.end()) return it->second.cardinality();
  if (k < 1 || q < k) throw InputError("component_cardinality: need q >= k >= 1");
  // Distinct-point count of the nested sparse grid from idealized doubling
  // level sizes n_i = 2^{i-1}: increments m_1 = 1, m_i = 2^{i-2}.
  const int levels = q - k + 1;
  std::vector<BigInt> incr(levels + 1, 0);
  for (int i = 1; i <= levels; ++i) {
    incr[i] = (i == 1) ? BigInt(1) : BigInt(1) << (i - 2);
  }
  // dp[dims][budget] = sum over multi-indices with |i| <= budget of products.
  std::vector<std::vector<BigInt>> dp(
      k + 1, std::vector<BigInt>(q + 1, BigInt(0)));
  for (int b = 0; b <= q; ++b) dp[0][b] = 1;
  for (int dims = 1; dims <= k; ++dims) {
    for (int b = 0; b <= q; ++b) {
      BigInt acc = 0;
      for (int i = 1; i <= std::min(levels, b); ++i) {
        if (b - i >= 0) acc += incr[i] * dp[dims - 1][b - i];
      }
      dp[dims][b] = acc;
    }
  }
  return dp[k][q];
}

int ComponentLibrary::level_for_cardinality(int k, long n) const {
  for (int q = k; q <= 96; ++q) {
    if (component_cardinality(k, q) >= n) return q;
  }
  throw InputError("level_for_cardinality: no level reaches the requested "
                   "cardinality");
}

double ComponentLibrary::measured_error(int k, int q) {
  const auto key = std::make_pair(k, q);
  auto it = errors_.find(key);
  if (it != errors_.end()) return it->second;
  const TensorAlgorithm& alg = component(k, q);
  const TensorSurrogate target =
      TensorSurrogate::from_pattern(split_, problem_, std::vector<int>(k, 2));
  const double err = worst_case_error(alg, target, problem_);
  errors_.emplace(key, err);
  return err;
}

std::vector<RateSample> ComponentLibrary::collect_samples(int k_max,
                                                          long n_cap) {
  std::vector<RateSample> samples;
  for (int k = 1; k <= std::min(k_max, kOracleMaxDim); ++k) {
    for (int q = k; q <= 96; ++q) {
      const BigInt card = component_cardinality(k, q);
      if (card > n_cap) break;
      const double err = measured_error(k, q);
      if (err <= 1e-14) continue;  // saturated, not log-fittable
      samples.push_back(RateSample{
          static_cast<double>(component(k, q).cardinality()), err, k, q});
    }
  }
  return samples;
}

AssembledQpt assemble_qpt_algorithm(int d, double eps,
                                    const Spectrum& spectrum,
                                    const OperatorSplit& split,
                                    const DiscretizedProblem& problem,
                                    const RateFit& rate,
                                    ComponentLibrary& library,
                                    int materialize_limit) {
  if (d < 1) throw InputError("assemble: d must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InputError("assemble: eps must lie in (0,1)");
  }
  if (!problem.normalized) {
    throw AssemblyError(
        "assembly refused: problem not normalized (lambda_1 must be 1)");
  }
  const double lambda2 = spectrum.lambdas(1);
  if (lambda2 >= 1.0) {
    throw AssemblyError(
        "assembly refused: spectral gap assumption fails (lambda_2 >= "
        "lambda_1)");
  }

  QptPlan plan;
  plan.d = d;
  plan.eps = eps;
  plan.lambda2 = lambda2;
  plan.k = truncation_level(eps, lambda2, d);
  plan.anchor_t = split.t;
  plan.anchor_sign = split.sign;
  plan.anchor_ktt = split.ktt;

  if (plan.k > 0) {
    if (!(rate.r > 0.0)) {
      throw AssemblyError(
          "assembly refused: error-decay assumption fails (fitted rate r <= "
          "0)");
    }
    plan.n = choose_n(d, eps, rate, plan.k);
    plan.alpha = rate.alpha;
    plan.r = rate.r;
  } else {
    plan.n = 1;
    plan.alpha = rate.alpha;
    plan.r = rate.r;
  }

  BigInt prededup = 1;  // the |j|_2 = 0 shell: one sample
  BigInt max_component_card = 1;
  for (int l = 1; l <= plan.k; ++l) {
    QptComponentRef ref;
    ref.k2 = l;
    ref.q = library.level_for_cardinality(l, plan.n);
    ref.cardinality = library.component_cardinality(l, ref.q);
    prededup += binomial_big(d, l) * ref.cardinality;
    max_component_card = std::max(max_component_card, ref.cardinality);
    plan.components.push_back(std::move(ref));
  }
  plan.n_used = to_long_checked(max_component_card, "per-pattern cardinality");
  plan.card_bound = BigInt(plan.n_used) * index_count(d, plan.k);
  plan.card_prededup = prededup;

  const double tail =
      (plan.k < d && lambda2 > 0.0) ? std::pow(lambda2, 0.5 * plan.k) : 0.0;
  const double sum_binom = index_count(d, plan.k).convert_to<double>();
  plan.predicted_error =
      (plan.k > 0 ? plan.alpha * std::pow(double(plan.n), -plan.r) * sum_binom
                  : 0.0) +
      tail;

  AssembledQpt out;
  if (d <= materialize_limit) {
    std::vector<TensorTerm> all_terms;
    for (int l = 0; l <= plan.k; ++l) {
      const TensorAlgorithm* comp =
          (l == 0) ? nullptr : &library.component(l, plan.components[l - 1].q);
      // All C(d, l) patterns of shell l, positions lexicographic.
      std::vector<int> pos(l);
      for (int i = 0; i < l; ++i) pos[i] = i;
      for (;;) {
        Pattern pattern;
        pattern.j.assign(d, 1);
        for (int p : pos) pattern.j[p] = 2;
        TensorAlgorithm piece =
            build_pattern_algorithm(pattern, split, problem, comp);
        for (auto& t : piece.terms) all_terms.push_back(std::move(t));
        if (l == 0) break;
        // next combination
        int i = l - 1;
        while (i >= 0 && pos[i] == d - l + i) --i;
        if (i < 0) break;
        ++pos[i];
        for (int v = i + 1; v < l; ++v) pos[v] = pos[v - 1] + 1;
      }
    }
    TensorAlgorithm merged = merge_terms(d, std::move(all_terms));
    plan.card_dedup = merged.cardinality();
    plan.materialized = true;
    out.algorithm = std::move(merged);
  } else {
    plan.card_dedup = plan.card_prededup;
    plan.materialized = false;
  }
  out.plan = std::move(plan);
  return out;
}

RateFit measure_rate_for_cells(ComponentLibrary& library,
                               const std::vector<std::pair<int, double>>& cells,
                               double lambda2, int oracle_ceiling) {
  int k_measure_max = 1;
  for (const auto& [d, eps] : cells) {
    const int k = truncation_level(eps, lambda2, d);
    if (d <= oracle_ceiling) {
      k_measure_max = std::max(k_measure_max, std::min(k, kOracleMaxDim));
    }
  }

  RateFit fit = fit_rate(library.collect_samples(k_measure_max, 96));
  for (int round = 0;; ++round) {
    bool extended = false;
    long cap = 96;
    for (const auto& [d, eps] : cells) {
      if (d > oracle_ceiling) continue;
      const int k = truncation_level(eps, lambda2, d);
      if (k == 0) continue;
      const long n = choose_n(d, eps, fit, k);
      for (int l = 1; l <= k; ++l) {
        const int q = library.level_for_cardinality(l, n);
        cap = std::max(cap,
                       library.component_cardinality(l, q).convert_to<long>());
        const bool known =
            std::any_of(fit.samples.begin(), fit.samples.end(),
                        [&](const RateSample& s) { return s.k == l && s.q >= q; });
        if (!known) extended = true;
      }
    }
    if (!extended) return fit;
    if (round >= 5) {
      throw AssemblyError(
          "rate measurement did not converge to cover the planned levels");
    }
    fit = fit_rate(library.collect_samples(k_measure_max, cap));
  }
}

EnvelopeFit qpt_envelope_fit(
    const std::vector<std::tuple<int, double, BigInt>>& data) {
  if (data.size() < 6) {
    throw InputError("qpt_envelope_fit: need at least 6 data points");
  }
  std::vector<int> ds;
  std::vector<double> epss;
  for (const auto& [d, eps, card] : data) {
    ds.push_back(d);
    epss.push_back(eps);
  }
  std::sort(ds.begin(), ds.end());
  std::sort(epss.begin(), epss.end());
  if (std::unique(ds.begin(), ds.end()) - ds.begin() < 2 ||
      std::unique(epss.begin(), epss.end()) - epss.begin() < 2) {
    throw InputError(
        "qpt_envelope_fit: need at least two distinct d and two distinct eps");
  }

  auto log_card = [](const BigInt& card) {
    const double c = card.convert_to<double>();
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InputError("qpt_envelope_fit: cardinality out of double range");
    }
    return std::log(c);
  };
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(data.size());
  for (const auto& [d, eps, card] : data) {
    const double x = (1.0 + std::log(1.0 / eps)) * (1.0 + std::log(double(d)));
    const double y = log_card(card);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = cnt * sxx - sx * sx;
  if (std::abs(denom) <= 1e-12 * std::max(1.0, cnt * sxx)) {
    throw InputError("qpt_envelope_fit: degenerate design (all products "
                     "coincide)");
  }
  EnvelopeFit fit;
  fit.t_qpt = (cnt * sxy - sx * sy) / denom;
  // Envelope inflation for C.
  double log_c = -std::numeric_limits<double>::infinity();
  for (const auto& [d, eps, card] : data) {
    const double x = (1.0 + std::log(1.0 / eps)) * (1.0 + std::log(double(d)));
    log_c = std::max(log_c, log_card(card) - fit.t_qpt * x);
  }
  fit.c = std::exp(log_c);
  return fit;
}

std::string plan_to_json(const QptPlan& plan) {
  nlohmann::json j;
  j["d"] = plan.d;
  j["eps"] = plan.eps;
  j["k"] = plan.k;
  j["n"] = plan.n;
  j["n_used"] = plan.n_used;
  j["anchor"] = {{"t", plan.anchor_t},
                 {"delta", plan.anchor_sign},
                 {"ktt", plan.anchor_ktt}};
  j["lambda2"] = plan.lambda2;
  j["alpha"] = plan.alpha;
  j["r"] = plan.r;
  auto comps = nlohmann::json::array();
  for (const auto& c : plan.components) {
    comps.push_back({{"k2", c.k2},
                     {"q", c.q},
                     {"cardinality", c.cardinality.str()}});
  }
  j["components"] = comps;
  j["card_bound"] = plan.card_bound.str();
  j["card_prededup"] = plan.card_prededup.str();
  j["card_dedup"] = plan.card_dedup.str();
  j["predicted_error"] = plan.predicted_error;
  j["materialized"] = plan.materialized;
  return j.dump(2);
}

}  // namespace tensorqpt
