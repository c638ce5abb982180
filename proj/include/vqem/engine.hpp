#ifndef VQEM_ENGINE_HPP
#define VQEM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vqem/linesearch.hpp"
#include "vqem/subsolver.hpp"

namespace vqem {

struct SolverParams {
  double delta = 1e-3;  // linesearch slack factor in (0,1)
  double theta = 0.5;   // backtracking ratio in (0,1)
  double beta = 1.0;    // subproblem scaling
  double gamma = 1.0;   // halfspace tightening factor in (0,1]
  Vector e;             // interior direction; empty -> all ones
  Vector weight;        // scalarization weight; empty -> uniform

  // Optional per-iteration schedules; when unset the constants above apply.
  std::function<double(int)> beta_schedule;
  std::function<double(int)> gamma_schedule;
  std::function<Vector(int)> e_schedule;

  double eps_stop = 1e-6;  // outer stop: ||v_{k+1} - v_k|| below this
  double eps_fix = 1e-8;   // fixed point stop: ||z_k - v_k|| below this
  int max_outer = 5000;
  int ell_max = 60;

  double inner_tol = 1e-8;
  int inner_max_iters = 50000;

  double cut_tol = 1e-8;   // cut-set membership tolerance at w
  int cut_max_rounds = 60;
  double dykstra_tol = 1e-10;
  int dykstra_max_sweeps = kDykstraMaxSweeps;

  double iterate_bound = 1e7;  // abort with a diagnostic beyond this norm

  // Cut retention: 0 keeps every cut (the nested sets the convergence theory
  // uses), n > 0 keeps a sliding window of the n newest. The benchmark
  // problems all have an empty dual solution set, so their nested cut sets
  // genuinely empty out after a few iterations and the solver dies with the
  // empty-cut-set diagnostic; the window reproduces the published behavior.
  int max_cuts = 1;

  bool check_invariants = true;
  int c1_samples = 100;
  std::uint64_t seed = 0;
  bool keep_trace = false;
};

/// One accumulated cut {y : f(anchor, y) in -C} with its cached linear outer
/// approximations, refined on demand by the cut-set projection.
struct Cut {
  Vector anchor;
  std::vector<Halfspace> refinements;
};

struct IterateRecord {
  int k = 0;
  Vector v, x, z, y, w;
  double alpha = 1.0;
  int ell = 0;
  int n_cuts = 0;
  double d_v0 = 0.0;    // D_g(v_{k+1}, v_0)
  double gap_vv = 0.0;  // ||v_{k+1} - v_k||
  double gap_vx = 0.0;  // ||v_k - x_k||
  double gap_xw = 0.0;  // ||x_k - w_k||
  int subsolver_iters = 0;
  double wall_ms = 0.0;
};

enum class SolveStatus { Converged, FixedPoint, MaxIters, InvariantViolation };
const char* to_string(SolveStatus s);

/// Per-run tally of the invariants monitored alongside the iteration. Worst
/// observed slacks are recorded even when within tolerance.
struct InvariantReport {
  long checks = 0;
  long violations = 0;
  double worst_monotone = 0.0;     // most negative increment of D_g(v_k, v_0)
  double worst_lmn = 0.0;          // distance of v_{k+1} to L, M, N
  double worst_cut = 0.0;          // max_i f_i(anchor, w) over stored cuts
  double worst_c1 = 0.0;           // subproblem optimality gap over samples
  double worst_minty = 0.0;        // most negative max_i f_i(y_k, x_k)
  bool linesearch_minimality_ok = true;
  std::vector<std::string> notes;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  Vector solution;  // x of the final iteration
  Vector v_final;
  int iterations = 0;
  double wall_seconds = 0.0;
  double final_gap = 0.0;  // last ||v_{k+1} - v_k||
  InvariantReport invariants;
  std::vector<IterateRecord> trace;
  std::string message;
};

/// Halfspace {z : <z - p, g'(p) - g'(q)> <= -gamma D_g(p, q)}; for gamma = 1
/// these are the points at least as close to q as to p. Degenerates to the
/// whole space when p = q.
Halfspace halfspace_closer_to(const Vector& p, const Vector& q, double gamma);

/// Halfspace {z : <z - current, g'(origin) - g'(current)> <= 0}, anchoring
/// the regularization to the start point.
Halfspace anchor_halfspace(const Vector& origin, const Vector& current);

/// Projection of v onto T(v).
Vector fixed_point_step(const Problem& prob, const Vector& v);

/// Projects x onto the ambient set intersected with every accumulated cut by
/// outer approximation: project onto the cached linearizations, linearize
/// each still-violated cut component at the trial point, repeat. Refinements
/// are kept on the cuts for later calls.
Vector project_cut_set(const Problem& prob, const Vector& x, std::vector<Cut>& cuts,
                       const SolverParams& params);

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverState {
  Vector v0;
  Vector v;
  int k = 0;
  std::vector<Cut> cuts;

  // Artifacts of the most recent step.
  Vector x, z, y, w;
  double alpha = 1.0;
  int ell = 0;
  int subsolver_iters = 0;
  Halfspace L, M, N;
  double gap_vv = 0.0;

  InvariantReport invariants;
  std::uint64_t rng_state = 0;
};

enum class StepOutcome { Advanced, FixedPoint };

/// One full iteration: fixed-point projection, subproblem, fixed-point stop
/// test, linesearch, cut accumulation, cut-set projection, regularization
/// projection. Advances state.v and state.k on StepOutcome::Advanced.
StepOutcome advance(const Problem& prob, const SolverParams& params, SolverState& state);

/// Runs the iteration from v0 until the successive-iterate gap drops below
/// params.eps_stop, a fixed point is detected, or budgets run out.
SolveReport solve(const Problem& prob, const SolverParams& params, const Vector& v0);

}  // namespace vqem

#endif
