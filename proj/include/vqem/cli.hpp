#ifndef VQEM_CLI_HPP
#define VQEM_CLI_HPP

#include <json.hpp>

#include "vqem/engine.hpp"
#include "vqem/oracle.hpp"

namespace vqem {

struct RunConfig {
  std::string instance;       // builtin name, or
  std::string instance_file;  // path to an instance JSON
  std::vector<Vector> starts;
  SolverParams params;
  std::uint64_t seed = 0;
  std::string out_path;       // empty writes to stdout
  std::string format = "csv"; // csv | json
  std::string trace_path;     // empty disables the trace
  int jobs = 1;
  int oracle_samples = 10000;
  int batch = 0;              // > 0 switches to the batch protocol
  bool timing = true;         // false reports cpu columns as 0 (byte-stable output)
};

/// One solved start point with its certificate.
struct ReportRow {
  Vector start;
  Vector solution;
  int iterations = 0;
  double cpu_seconds = 0.0;
  std::string status;
  double primal_residual = 0.0;
  double fix_distance = 0.0;
  double dual_residual = 0.0;
};

/// Batch aggregate over the random instances solved from one start point.
struct BatchRow {
  Vector start;
  Vector solution;  // of the last run from this start
  double avg_iterations = 0.0;
  double avg_cpu_seconds = 0.0;
  double success_rate = 0.0;
};

std::string format_vector(const Vector& v);
Vector parse_vector(const std::string& text);

std::string report_csv(const std::vector<ReportRow>& rows);
nlohmann::json report_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_json(const nlohmann::json& j);

std::string batch_csv(const std::vector<BatchRow>& rows);
nlohmann::json batch_json(const std::vector<BatchRow>& rows);

nlohmann::json trace_record_json(const IterateRecord& row);

/// Solves every configured start point, certifies each solution, and writes
/// the report table. Returns 0 when every run converged and certified, 1
/// otherwise, 3 on solver invariant violations.
int run_single(const RunConfig& cfg);

/// Batch protocol: n_random seeded random instances of the configured family
/// solved from every start point, aggregated per start. Only families with
/// random parameterizations support this (currently "ab").
int run_batch(const RunConfig& cfg, int n_random);

/// Full command-line entry point; returns the process exit code
/// (2 on configuration errors).
int run_cli(int argc, const char* const* argv);

}  // namespace vqem

#endif
