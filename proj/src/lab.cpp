#include "tensorqpt/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tensorqpt/modification.hpp"

namespace tensorqpt {

namespace {

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

nlohmann::json json_double(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double double_or_inf(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

std::pair<KernelPtr, bool> resolve_kernel(const std::string& id) {
  if (id == "sobolev-modified") return {make_preset_kernel("sobolev"), true};
  if (id.rfind("file:", 0) == 0) return {load_kernel(id.substr(5)), false};
  return {make_preset_kernel(id), false};
}

struct World {
  KernelPtr kernel;
  bool modified = false;
  DiscretizedProblem problem;
  Spectrum spectrum;
  PointCondition condition;
};

World build_world(KernelPtr base, int m, int q, bool allow_modify,
                  bool normalize) {
  World w;
  w.kernel = base;
  w.problem = discretize_problem(base, m, normalize);
  const int qq = std::max(2, std::min(q, m));
  w.spectrum = eigensystem(w.problem, qq);
  w.condition = check_eigenfunction_point_condition(w.spectrum, w.problem);
  if (!w.condition.ok && allow_modify) {
    const double t_star = default_anchor(w.spectrum, w.problem);
    KernelPtr mod = rank_one_modify(w.spectrum, w.problem, t_star);
    w.kernel = mod;
    w.modified = true;
    w.problem = discretize_problem(mod, m, normalize);
    w.spectrum = eigensystem(w.problem, qq);
    w.condition = check_eigenfunction_point_condition(w.spectrum, w.problem);
  }
  return w;
}

double decay_lambda_of(const Spectrum& s) {
  std::vector<double> positive;
  for (int i = 0; i < s.lambdas.size(); ++i) {
    if (s.lambdas(i) > 1e-14 * std::max(s.lambdas(0), 1e-300)) {
      positive.push_back(s.lambdas(i));
    }
  }
  if (positive.size() < 8) {
    return std::numeric_limits<double>::infinity();  // finite rank
  }
  return estimate_decay(positive);
}

int worker_count(const ExperimentConfig& config) {
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("TENSORQPT_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::max(1u, std::min(hw, 4u)));
}

void run_jobs(std::vector<std::function<void()>>& jobs, int workers) {
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      jobs[i]();
    }
  };
  std::vector<std::thread> threads;
  for (int t = 1; t < workers; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (kernel_id.empty()) throw InputError("config: kernel id is empty");
  if (m_spectral < 32) throw InputError("config: m_spectral must be >= 32");
  if (m_oracle < 32 || m_oracle > 64) {
    throw InputError("config: m_oracle must lie in [32, 64]");
  }
  if (q < 2) throw InputError("config: q must be >= 2");
  if (n_max < 8) throw InputError("config: n_max must be >= 8");
  if (d_list.empty()) throw InputError("config: d list is empty");
  for (size_t i = 0; i < d_list.size(); ++i) {
    if (d_list[i] < 1) throw InputError("config: d must be >= 1");
    if (i > 0 && d_list[i] <= d_list[i - 1]) {
      throw InputError("config: d list must be strictly ascending");
    }
  }
  if (eps_list.empty()) throw InputError("config: eps list is empty");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) {
      throw InputError("config: eps must lie in (0,1)");
    }
    if (i > 0 && eps_list[i] >= eps_list[i - 1]) {
      throw InputError("config: eps list must be strictly descending");
    }
  }
  if (oracle_ceiling < 0 || oracle_ceiling > 3) {
    throw InputError("config: oracle ceiling must lie in [0, 3]");
  }
  if (workers < 0) throw InputError("config: workers must be >= 0");
}

std::string ExperimentConfig::canonical_json() const {
  nlohmann::json j;
  j["schema"] = schema;
  j["kernel"] = kernel_id;
  j["allow_modification"] = allow_modification;
  j["m_spectral"] = m_spectral;
  j["m_oracle"] = m_oracle;
  j["q"] = q;
  j["n_max"] = n_max;
  j["d"] = d_list;
  j["eps"] = eps_list;
  j["oracle_ceiling"] = oracle_ceiling;
  j["seed"] = seed;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  const std::string s = canonical_json();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("schema")) c.schema = j["schema"].get<int>();
    if (c.schema != 1) throw InputError("config: unsupported schema version");
    if (j.contains("kernel")) c.kernel_id = j["kernel"].get<std::string>();
    if (j.contains("allow_modification")) {
      c.allow_modification = j["allow_modification"].get<bool>();
    }
    if (j.contains("m_spectral")) c.m_spectral = j["m_spectral"].get<int>();
    if (j.contains("m_oracle")) c.m_oracle = j["m_oracle"].get<int>();
    if (j.contains("q")) c.q = j["q"].get<int>();
    if (j.contains("n_max")) c.n_max = j["n_max"].get<int>();
    if (j.contains("d")) c.d_list = j["d"].get<std::vector<int>>();
    if (j.contains("eps")) c.eps_list = j["eps"].get<std::vector<double>>();
    if (j.contains("oracle_ceiling")) {
      c.oracle_ceiling = j["oracle_ceiling"].get<int>();
    }
    if (j.contains("out_csv")) c.out_csv = j["out_csv"].get<std::string>();
    if (j.contains("out_json")) c.out_json = j["out_json"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: bad field type: ") + e.what());
  }
  return c;
}

GateReport run_assumption_gate(const ExperimentConfig& config) {
  config.validate();
  auto [base, forced] = resolve_kernel(config.kernel_id);
  const bool allow = config.allow_modification || forced;
  World w = build_world(base, config.m_spectral, config.q, allow,
                        /*normalize=*/false);

  GateReport rep;
  rep.kernel = w.kernel;
  rep.kernel_id = w.kernel->id();
  rep.modified = w.modified;
  rep.lambda1 = w.spectrum.lambdas(0);
  rep.lambda2 = w.spectrum.lambdas(1);
  rep.decay_lambda = decay_lambda_of(w.spectrum);
  rep.condition_result = w.condition;

  rep.gap.name = "spectral-gap";
  rep.gap.measured = (rep.lambda1 - rep.lambda2) / rep.lambda1;
  rep.gap.pass = rep.gap.measured > 1e-6;
  rep.gap.detail = "relative gap (lambda1 - lambda2)/lambda1";

  rep.condition.name = "eigenfunction-point-condition";
  rep.condition.pass = w.condition.ok;
  rep.condition.measured =
      w.condition.ok ? w.condition.residual : w.condition.min_residual;
  rep.condition.detail =
      w.condition.ok
          ? "residual at t = " + std::to_string(w.condition.t)
          : "best residual over the candidate grid (condition fails)";

  rep.decay.name = "error-decay";
  ErrorCurve curve;
  if (w.condition.ok) {
    const OperatorSplit split = build_split(w.spectrum, w.problem, w.condition);
    curve = minimal_error_curve(split, w.problem, config.n_max);
    rep.decay.detail = "decay_e of the anchored greedy algorithm";
  } else {
    curve = spline_error_curve(w.problem, config.n_max);
    rep.decay.detail = "decay_e of the spline algorithm (no split available)";
  }
  rep.decay_e = curve.decay_e;
  rep.decay.measured = curve.decay_e;
  rep.decay.pass = curve.saturated || curve.decay_e > 0.0;
  if (curve.saturated) rep.decay.detail += "; curve saturated at machine zero";

  rep.all_pass = rep.gap.pass && rep.decay.pass && rep.condition.pass;
  return rep;
}

RunRecord run_scaling_sweep(const ExperimentConfig& config) {
  config.validate();
  RunRecord rec;
  rec.started_at = iso_now();
  rec.config_hash = config.hash();

  GateReport gate = run_assumption_gate(config);
  if (!gate.all_pass) {
    std::string failing;
    for (const GateVerdict* v : {&gate.gap, &gate.decay, &gate.condition}) {
      if (!v->pass) failing += (failing.empty() ? "" : ", ") + v->name;
    }
    throw AssemblyError("gate failed: " + failing);
  }
  rec.kernel_id = gate.kernel_id;
  rec.lambda1 = gate.lambda1;
  rec.lambda2 = gate.lambda2;
  rec.gap = gate.lambda1 - gate.lambda2;
  rec.decay_lambda = gate.decay_lambda;
  rec.decay_e = gate.decay_e;

  // The oracle world re-derives the modification at its own grid so the
  // point condition is exact there.
  auto [base, forced] = resolve_kernel(config.kernel_id);
  World ow = build_world(base, config.m_oracle, config.q,
                         config.allow_modification || forced,
                         /*normalize=*/true);
  if (!ow.condition.ok) {
    throw AssemblyError(
        "gate failed: eigenfunction-point-condition (oracle grid)");
  }
  const OperatorSplit split = build_split(ow.spectrum, ow.problem, ow.condition);
  ComponentLibrary library(split, ow.problem);
  const double lambda2o = ow.spectrum.lambdas(1);

  // Rate measurement: fit the pooled envelope over every level any
  // materialized cell will use.
  bool any_smolyak = false;
  std::vector<std::pair<int, double>> cell_list;
  for (int d : config.d_list) {
    for (double eps : config.eps_list) {
      cell_list.emplace_back(d, eps);
      if (truncation_level(eps, lambda2o, d) > 0) any_smolyak = true;
    }
  }

  RateFit fit;
  if (any_smolyak) {
    fit = measure_rate_for_cells(library, cell_list, lambda2o,
                                 config.oracle_ceiling);
    rec.alpha = fit.alpha;
    rec.r = fit.r;
    for (int k = 1; k <= kOracleMaxDim; ++k) {
      std::vector<RateSample> of_k;
      for (const auto& s : fit.samples)
        if (s.k == k) of_k.push_back(s);
      if (of_k.size() >= 4) {
        const RateFit f = fit_rate(of_k);
        rec.rate_per_k.emplace_back(k, f.alpha, f.r);
      }
    }
  }

  // Assemble every cell; materialize only below the oracle ceiling.
  struct Cell {
    SweepRow row;
    std::optional<TensorAlgorithm> algorithm;
  };
  std::vector<Cell> cells;
  for (int d : config.d_list) {
    for (double eps : config.eps_list) {
      AssembledQpt built = assemble_qpt_algorithm(
          d, eps, ow.spectrum, split, ow.problem, fit, library,
          /*materialize_limit=*/std::min(config.oracle_ceiling, 24));
      Cell cell;
      cell.row.d = d;
      cell.row.eps = eps;
      cell.row.k = built.plan.k;
      cell.row.n = built.plan.n;
      cell.row.card_bound = built.plan.card_bound;
      cell.row.card_dedup = built.plan.card_dedup;
      cell.row.predicted_error = built.plan.predicted_error;
      cell.row.envelope_product =
          (1.0 + std::log(1.0 / eps)) * (1.0 + std::log(double(d)));
      cell.algorithm = std::move(built.algorithm);
      cells.push_back(std::move(cell));
    }
  }

  // Oracle certification, parallel over cells.
  std::vector<std::function<void()>> jobs;
  for (auto& cell : cells) {
    if (!cell.algorithm) continue;
    jobs.push_back([&cell, &ow] {
      const TensorSurrogate target =
          TensorSurrogate::full_operator(ow.problem, cell.row.d);
      cell.row.oracle_error =
          worst_case_error(*cell.algorithm, target, ow.problem);
    });
  }
  run_jobs(jobs, worker_count(config));

  for (auto& cell : cells) {
    if (cell.row.oracle_error && *cell.row.oracle_error > cell.row.eps) {
      rec.failed = true;  // never silently dropped
    }
    rec.rows.push_back(std::move(cell.row));
  }

  // Envelope fit over the recorded cardinality bounds.
  std::set<int> ds(config.d_list.begin(), config.d_list.end());
  std::set<double> epss(config.eps_list.begin(), config.eps_list.end());
  if (rec.rows.size() >= 6 && ds.size() >= 2 && epss.size() >= 2) {
    std::vector<std::tuple<int, double, BigInt>> data;
    for (const auto& row : rec.rows) {
      data.emplace_back(row.d, row.eps, row.card_bound);
    }
    const EnvelopeFit env = qpt_envelope_fit(data);
    rec.envelope_c = env.c;
    rec.envelope_t = env.t_qpt;
  }

  rec.finished_at = iso_now();
  return rec;
}

void emit_csv(const RunRecord& record, std::ostream& out) {
  out << "d,eps,k,n,card_bound,card_dedup,predicted_error,oracle_error,"
         "envelope_product\n";
  char buf[64];
  for (const auto& row : record.rows) {
    out << row.d << ",";
    std::snprintf(buf, sizeof(buf), "%.12g", row.eps);
    out << buf << "," << row.k << "," << row.n << "," << row.card_bound.str()
        << "," << row.card_dedup.str() << ",";
    std::snprintf(buf, sizeof(buf), "%.12g", row.predicted_error);
    out << buf << ",";
    if (row.oracle_error) {
      std::snprintf(buf, sizeof(buf), "%.12g", *row.oracle_error);
      out << buf;
    }
    out << ",";
    std::snprintf(buf, sizeof(buf), "%.12g", row.envelope_product);
    out << buf << "\n";
  }
}

std::string record_to_json(const RunRecord& record) {
  nlohmann::json j;
  j["config_hash"] = record.config_hash;
  j["kernel_id"] = record.kernel_id;
  j["lambda1"] = record.lambda1;
  j["lambda2"] = record.lambda2;
  j["gap"] = record.gap;
  j["decay_lambda"] = json_double(record.decay_lambda);
  j["decay_e"] = json_double(record.decay_e);
  j["alpha"] = record.alpha;
  j["r"] = record.r;
  auto per_k = nlohmann::json::array();
  for (const auto& [k, alpha, r] : record.rate_per_k) {
    per_k.push_back({{"k", k}, {"alpha", alpha}, {"r", r}});
  }
  j["rate_per_k"] = per_k;
  auto rows = nlohmann::json::array();
  for (const auto& row : record.rows) {
    nlohmann::json rj;
    rj["d"] = row.d;
    rj["eps"] = row.eps;
    rj["k"] = row.k;
    rj["n"] = row.n;
    rj["card_bound"] = row.card_bound.str();
    rj["card_dedup"] = row.card_dedup.str();
    rj["predicted_error"] = row.predicted_error;
    rj["oracle_error"] =
        row.oracle_error ? nlohmann::json(*row.oracle_error)
                         : nlohmann::json(nullptr);
    rj["envelope_product"] = row.envelope_product;
    rows.push_back(std::move(rj));
  }
  j["rows"] = rows;
  j["envelope"] = {{"C", record.envelope_c}, {"t_qpt", record.envelope_t}};
  j["started_at"] = record.started_at;
  j["finished_at"] = record.finished_at;
  j["failed"] = record.failed;
  return j.dump(2);
}

RunRecord record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("record: invalid JSON: ") + e.what());
  }
  RunRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.kernel_id = j.at("kernel_id").get<std::string>();
  r.lambda1 = j.at("lambda1").get<double>();
  r.lambda2 = j.at("lambda2").get<double>();
  r.gap = j.at("gap").get<double>();
  r.decay_lambda = double_or_inf(j.at("decay_lambda"));
  r.decay_e = double_or_inf(j.at("decay_e"));
  r.alpha = j.at("alpha").get<double>();
  r.r = j.at("r").get<double>();
  for (const auto& pk : j.at("rate_per_k")) {
    r.rate_per_k.emplace_back(pk.at("k").get<int>(),
                              pk.at("alpha").get<double>(),
                              pk.at("r").get<double>());
  }
  for (const auto& rj : j.at("rows")) {
    SweepRow row;
    row.d = rj.at("d").get<int>();
    row.eps = rj.at("eps").get<double>();
    row.k = rj.at("k").get<int>();
    row.n = rj.at("n").get<long>();
    row.card_bound = BigInt(rj.at("card_bound").get<std::string>());
    row.card_dedup = BigInt(rj.at("card_dedup").get<std::string>());
    row.predicted_error = rj.at("predicted_error").get<double>();
    if (!rj.at("oracle_error").is_null()) {
      row.oracle_error = rj.at("oracle_error").get<double>();
    }
    row.envelope_product = rj.at("envelope_product").get<double>();
    r.rows.push_back(std::move(row));
  }
  r.envelope_c = j.at("envelope").at("C").get<double>();
  r.envelope_t = j.at("envelope").at("t_qpt").get<double>();
  r.started_at = j.at("started_at").get<std::string>();
  r.finished_at = j.at("finished_at").get<std::string>();
  r.failed = j.at("failed").get<bool>();
  return r;
}

int emit_report(const RunRecord& record, const std::string& csv_path,
                const std::string& json_path) {
  {
    std::ofstream csv(csv_path);
    if (!csv) throw InputError("cannot write CSV: " + csv_path);
    emit_csv(record, csv);
  }
  {
    std::ofstream js(json_path);
    if (!js) throw InputError("cannot write JSON: " + json_path);
    js << record_to_json(record) << "\n";
  }
  return record.failed ? 3 : 0;
}

}  // namespace tensorqpt
