#include "vqem/cli.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vqem/instances.hpp"
#include "vqem/rng.hpp"

namespace vqem {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Problem load_problem(const RunConfig& cfg) {
  if (!cfg.instance_file.empty()) return load_instance_file(cfg.instance_file);
  if (!cfg.instance.empty()) return make_builtin(cfg.instance);
  throw std::invalid_argument("no instance selected (use --instance or --instance-file)");
}

bool certified(const Certificate& cert) {
  return cert.primal_residual >= -1e-4 && cert.fix_distance <= 1e-4;
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + cfg.out_path);
  out << text;
}

void write_trace(const RunConfig& cfg, const std::vector<SolveReport>& reports) {
  if (cfg.trace_path.empty()) return;
  std::ofstream out(cfg.trace_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file: " + cfg.trace_path);
  for (const auto& rep : reports) {
    for (const auto& row : rep.trace) out << trace_record_json(row).dump() << "\n";
  }
}

struct SingleRun {
  SolveReport report;
  Certificate cert;
};

SingleRun solve_one(const Problem& prob, const RunConfig& cfg, const Vector& start) {
  SingleRun out;
  SolverParams params = cfg.params;
  params.seed = cfg.seed;
  params.keep_trace = !cfg.trace_path.empty();
  out.report = solve(prob, params, start);
  out.cert = vqep_residual(prob, out.report.solution, cfg.oracle_samples, cfg.seed);
  return out;
}

template <typename Task>
void run_indexed(int count, int jobs, Task&& task) {
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::future<void>> workers;
  const int width = std::min(jobs, count);
  workers.reserve(width);
  for (int w = 0; w < width; ++w) {
    workers.push_back(std::async(std::launch::async, [&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    }));
  }
  for (auto& f : workers) f.get();
}

}  // namespace

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw std::invalid_argument("bad vector entry: '" + item + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw std::invalid_argument("empty vector literal");
  Vector out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i];
  return out;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "start,solution,iterations,cpu_seconds,status,primal_residual,fix_distance\n";
  for (const auto& r : rows) {
    out += "\"" + format_vector(r.start) + "\",\"" + format_vector(r.solution) + "\"," +
           std::to_string(r.iterations) + "," + format_double(r.cpu_seconds) + "," + r.status +
           "," + format_double(r.primal_residual) + "," + format_double(r.fix_distance) + "\n";
  }
  return out;
}

nlohmann::json report_json(const std::vector<ReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["start"] = std::vector<double>(r.start.begin(), r.start.end());
    j["solution"] = std::vector<double>(r.solution.begin(), r.solution.end());
    j["iterations"] = r.iterations;
    j["cpu_seconds"] = r.cpu_seconds;
    j["status"] = r.status;
    j["primal_residual"] = r.primal_residual;
    j["fix_distance"] = r.fix_distance;
    j["dual_residual"] = r.dual_residual;
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"rows", arr}};
}

std::vector<ReportRow> parse_report_json(const nlohmann::json& j) {
  std::vector<ReportRow> rows;
  for (const auto& rj : j.at("rows")) {
    ReportRow r;
    const auto s = rj.at("start").get<std::vector<double>>();
    const auto sol = rj.at("solution").get<std::vector<double>>();
    r.start = Eigen::Map<const Vector>(s.data(), s.size());
    r.solution = Eigen::Map<const Vector>(sol.data(), sol.size());
    r.iterations = rj.at("iterations").get<int>();
    r.cpu_seconds = rj.at("cpu_seconds").get<double>();
    r.status = rj.at("status").get<std::string>();
    r.primal_residual = rj.at("primal_residual").get<double>();
    r.fix_distance = rj.at("fix_distance").get<double>();
    r.dual_residual = rj.value("dual_residual", 0.0);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string batch_csv(const std::vector<BatchRow>& rows) {
  std::string out = "start,solution,avg_iterations,avg_cpu_seconds,success_rate\n";
  for (const auto& r : rows) {
    out += "\"" + format_vector(r.start) + "\",\"" + format_vector(r.solution) + "\"," +
           format_double(r.avg_iterations) + "," + format_double(r.avg_cpu_seconds) + "," +
           format_double(r.success_rate) + "\n";
  }
  return out;
}

nlohmann::json batch_json(const std::vector<BatchRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["start"] = std::vector<double>(r.start.begin(), r.start.end());
    j["solution"] = std::vector<double>(r.solution.begin(), r.solution.end());
    j["avg_iterations"] = r.avg_iterations;
    j["avg_cpu_seconds"] = r.avg_cpu_seconds;
    j["success_rate"] = r.success_rate;
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"rows", arr}};
}

nlohmann::json trace_record_json(const IterateRecord& row) {
  nlohmann::json j;
  j["k"] = row.k;
  j["v"] = std::vector<double>(row.v.begin(), row.v.end());
  j["x"] = std::vector<double>(row.x.begin(), row.x.end());
  j["z"] = std::vector<double>(row.z.begin(), row.z.end());
  j["y"] = std::vector<double>(row.y.begin(), row.y.end());
  j["w"] = std::vector<double>(row.w.begin(), row.w.end());
  j["alpha"] = row.alpha;
  j["ell"] = row.ell;
  j["n_cuts"] = row.n_cuts;
  j["D_v0"] = row.d_v0;
  j["gap_vv"] = row.gap_vv;
  j["gap_vx"] = row.gap_vx;
  j["gap_xw"] = row.gap_xw;
  j["subsolver_iters"] = row.subsolver_iters;
  j["wall_ms"] = row.wall_ms;
  return j;
}

int run_single(const RunConfig& cfg) {
  const Problem prob = load_problem(cfg);
  if (cfg.starts.empty()) throw std::invalid_argument("no start points configured");

  const int count = static_cast<int>(cfg.starts.size());
  std::vector<SingleRun> runs(count);
  run_indexed(count, cfg.jobs, [&](int i) { runs[i] = solve_one(prob, cfg, cfg.starts[i]); });

  std::vector<ReportRow> rows(count);
  bool all_ok = true;
  bool violation = false;
  std::vector<SolveReport> reports;
  reports.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto& run = runs[i];
    ReportRow r;
    r.start = cfg.starts[i];
    r.solution = run.report.solution;
    r.iterations = run.report.iterations;
    r.cpu_seconds = cfg.timing ? run.report.wall_seconds : 0.0;
    r.status = to_string(run.report.status);
    r.primal_residual = run.cert.primal_residual;
    r.fix_distance = run.cert.fix_distance;
    r.dual_residual = run.cert.dual_residual;
    rows[i] = std::move(r);

    const bool converged = run.report.status == SolveStatus::Converged ||
                           run.report.status == SolveStatus::FixedPoint;
    if (!converged || !certified(run.cert)) all_ok = false;
    if (run.report.status == SolveStatus::InvariantViolation ||
        run.report.invariants.violations > 0) {
      violation = true;
      std::cerr << "invariant violation from start " << format_vector(cfg.starts[i]) << ": "
                << run.report.message << "\n";
    }
    reports.push_back(run.report);
  }

  write_output(cfg, cfg.format == "json" ? report_json(rows).dump(2) + "\n" : report_csv(rows));
  write_trace(cfg, reports);

  if (violation) return 3;
  return all_ok ? 0 : 1;
}

int run_batch(const RunConfig& cfg, int n_random) {
  if (n_random < 1) throw std::invalid_argument("batch size must be at least 1");
  const std::string family = cfg.instance;
  if (family != "ab") {
    throw std::invalid_argument("batch runs need a randomly parameterizable family; only 'ab' "
                                "qualifies");
  }
  if (cfg.starts.empty()) throw std::invalid_argument("no start points configured");

  const int n_starts = static_cast<int>(cfg.starts.size());
  const int total = n_random * n_starts;

  struct Cell {
    int iterations = 0;
    double cpu = 0.0;
    bool success = false;
    bool violation = false;
    Vector solution;
  };
  std::vector<Cell> cells(total);

  run_indexed(total, cfg.jobs, [&](int idx) {
    const int trial = idx / n_starts;
    const int s = idx % n_starts;
    Rng rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    const double a = rng.uniform(0.0, 100.0);
    const double b = rng.uniform(0.0, 100.0);
    const double c = rng.uniform(0.0, 100.0);
    const Problem prob = make_ab(a, b, c);

    SolverParams params = cfg.params;
    params.seed = cfg.seed;
    params.keep_trace = false;
    const SolveReport rep = solve(prob, params, cfg.starts[s]);
    const Certificate cert = vqep_residual(prob, rep.solution, cfg.oracle_samples, cfg.seed);

    Cell cell;
    cell.iterations = rep.iterations;
    cell.cpu = rep.wall_seconds;
    const bool converged =
        rep.status == SolveStatus::Converged || rep.status == SolveStatus::FixedPoint;
    cell.success = converged && certified(cert);
    cell.violation =
        rep.status == SolveStatus::InvariantViolation || rep.invariants.violations > 0;
    cell.solution = rep.solution;
    cells[idx] = std::move(cell);
  });

  std::vector<BatchRow> rows(n_starts);
  bool all_ok = true;
  bool violation = false;
  for (int s = 0; s < n_starts; ++s) {
    BatchRow row;
    row.start = cfg.starts[s];
    long iters = 0;
    double cpu = 0.0;
    int successes = 0;
    for (int trial = 0; trial < n_random; ++trial) {
      const Cell& cell = cells[trial * n_starts + s];
      iters += cell.iterations;
      cpu += cell.cpu;
      successes += cell.success ? 1 : 0;
      violation = violation || cell.violation;
      row.solution = cell.solution;
    }
    row.avg_iterations = static_cast<double>(iters) / n_random;
    row.avg_cpu_seconds = cfg.timing ? cpu / n_random : 0.0;
    row.success_rate = static_cast<double>(successes) / n_random;
    if (successes != n_random) all_ok = false;
    rows[s] = std::move(row);
  }

  write_output(cfg, cfg.format == "json" ? batch_json(rows).dump(2) + "\n" : batch_csv(rows));
  if (violation) return 3;
  return all_ok ? 0 : 1;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"extragradient solver for vector quasi-equilibrium problems"};

  RunConfig cfg;
  std::vector<std::string> start_args;
  std::string starts_file;
  bool no_timing = false;
  int max_iters = cfg.params.max_outer;

  app.add_option("--instance", cfg.instance, "builtin instance name (ab, bimat-paper, l2trunc, gnep-demo)");
  app.add_option("--instance-file", cfg.instance_file, "instance JSON file");
  app.add_option("--start", start_args, "start point \"x1,x2,...\" (repeatable)");
  app.add_option("--starts-file", starts_file, "file with one start point per line");
  app.add_option("--delta", cfg.params.delta, "linesearch slack factor in (0,1)");
  app.add_option("--theta", cfg.params.theta, "backtracking ratio in (0,1)");
  app.add_option("--beta", cfg.params.beta, "subproblem scaling");
  app.add_option("--gamma", cfg.params.gamma, "halfspace tightening factor in (0,1]");
  app.add_option("--eps", cfg.params.eps_stop, "outer stopping tolerance");
  app.add_option("--eps-fix", cfg.params.eps_fix, "fixed-point detection tolerance");
  app.add_option("--max-iters", max_iters, "outer iteration budget");
  app.add_option("--seed", cfg.seed, "seed for sampling and batch parameters");
  app.add_option("--out", cfg.out_path, "output path (default stdout)");
  app.add_option("--format", cfg.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--trace", cfg.trace_path, "per-iteration trace output (JSON lines)");
  app.add_option("--jobs", cfg.jobs, "parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--oracle-samples", cfg.oracle_samples, "certificate sample budget");
  app.add_option("--batch", cfg.batch, "solve this many seeded random instances per start");
  app.add_flag("--no-timing", no_timing, "report cpu columns as 0 for byte-stable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.params.max_outer = max_iters;
  cfg.timing = !no_timing;

  try {
    for (const auto& s : start_args) cfg.starts.push_back(parse_vector(s));
    if (!starts_file.empty()) {
      std::ifstream in(starts_file);
      if (!in) throw std::invalid_argument("cannot open starts file: " + starts_file);
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        cfg.starts.push_back(parse_vector(line));
      }
    }
    return cfg.batch > 0 ? run_batch(cfg, cfg.batch) : run_single(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace vqem
