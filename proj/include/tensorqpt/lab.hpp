#ifndef TENSORQPT_LAB_HPP
#define TENSORQPT_LAB_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tensorqpt/qpt.hpp"

namespace tensorqpt {

struct ExperimentConfig {
  int schema = 1;
  std::string kernel_id = "sobolev";
  bool allow_modification = true;  // take the rank-one path when the
                                   // point condition fails
  int m_spectral = 512;  // spectrum and decay estimates
  int m_oracle = 32;     // per-factor surrogate for assembly + certification
  int q = 32;            // spectrum size
  int n_max = 64;        // decay-curve length
  std::vector<int> d_list;        // ascending
  std::vector<double> eps_list;   // descending, in (0,1)
  int oracle_ceiling = 3;         // oracle errors only for d <= ceiling
  std::string out_csv = "run.csv";
  std::string out_json = "run.json";
  std::uint64_t seed = 0;  // property-test input sampling only
  int workers = 0;         // 0: TENSORQPT_WORKERS env or hardware default

  void validate() const;  // throws InputError
  std::string canonical_json() const;
  std::string hash() const;
};

ExperimentConfig config_from_json(const std::string& text);

struct GateVerdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string detail;
};

struct GateReport {
  GateVerdict gap;
  GateVerdict decay;
  GateVerdict condition;
  bool all_pass = false;
  bool modified = false;        // the rank-one path was taken
  std::string kernel_id;        // kernel the verdicts refer to
  KernelPtr kernel;             // that kernel (possibly modified)
  double lambda1 = 0.0, lambda2 = 0.0;
  double decay_lambda = 0.0, decay_e = 0.0;
  std::optional<PointCondition> condition_result;
};

/// Theorem-assumption gate: spectral gap, sampling-error decay, and the
/// eigenfunction point condition. On a condition failure with modification
/// allowed, applies the rank-one path and re-gates on the modified kernel.
GateReport run_assumption_gate(const ExperimentConfig& config);

struct SweepRow {
  int d = 0;
  double eps = 0.0;
  int k = 0;
  long n = 0;
  BigInt card_bound;
  BigInt card_dedup;
  double predicted_error = 0.0;
  std::optional<double> oracle_error;
  double envelope_product = 0.0;  // (1 + ln eps^-1)(1 + ln d)
};

struct RunRecord {
  std::string config_hash;
  std::string kernel_id;
  double lambda1 = 0.0, lambda2 = 0.0, gap = 0.0;
  double decay_lambda = 0.0, decay_e = 0.0;
  double alpha = 0.0, r = 0.0;
  std::vector<std::tuple<int, double, double>> rate_per_k;  // (k, alpha, r)
  std::vector<SweepRow> rows;
  double envelope_c = 0.0, envelope_t = 0.0;
  std::string started_at, finished_at;
  bool failed = false;  // an oracle row exceeded its eps
};

/// Gate, rate measurement, per-(d,eps) assembly, oracle certification up to
/// the ceiling, and the envelope fit. Rows are sorted by (d, descending eps)
/// regardless of worker scheduling.
RunRecord run_scaling_sweep(const ExperimentConfig& config);

void emit_csv(const RunRecord& record, std::ostream& out);
std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(const std::string& text);

/// Writes CSV + JSON files; returns the process exit code contract:
/// 0 pass, 3 oracle bound violated. Throws on I/O failure.
int emit_report(const RunRecord& record, const std::string& csv_path,
                const std::string& json_path);

}  // namespace tensorqpt

#endif
