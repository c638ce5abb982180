#include "vqem/engine.hpp"

#include <chrono>
#include <cmath>

#include "vqem/rng.hpp"

namespace vqem {

namespace {

constexpr double kMonotoneSlack = 1e-9;   // D_g(v_k, v_0) may dip by this much
constexpr double kLmnTol = 1e-7;          // membership of v_{k+1} in L, M, N
constexpr double kCutMembershipTol = 1e-6;
constexpr double kC1Tol = 1e-5;
constexpr double kMintyTol = 1e-9;

void validate(const Problem& prob, const SolverParams& p) {
  if (prob.n < 1 || prob.m < 1) throw std::invalid_argument("solve: problem dimensions unset");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw std::invalid_argument("solve: delta not in (0,1)");
  if (!(p.theta > 0.0 && p.theta < 1.0)) throw std::invalid_argument("solve: theta not in (0,1)");
  if (p.beta <= 0.0) throw std::invalid_argument("solve: beta must be positive");
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("solve: gamma not in (0,1]");
  if (p.eps_stop <= 0.0) throw std::invalid_argument("solve: eps_stop must be positive");
  if (p.eps_fix < 0.0) throw std::invalid_argument("solve: eps_fix must be nonnegative");
  if (p.max_outer < 1) throw std::invalid_argument("solve: max_outer must be at least 1");
  if (p.e.size() > 0 && (p.e.size() != prob.m || p.e.minCoeff() <= 0.0)) {
    throw std::invalid_argument("solve: interior direction must be strictly positive of size m");
  }
  if (p.weight.size() > 0 && p.weight.size() != prob.m) {
    throw std::invalid_argument("solve: weight size mismatch");
  }
}

Vector direction_at(const Problem& prob, const SolverParams& p, int k) {
  if (p.e_schedule) return p.e_schedule(k);
  if (p.e.size() > 0) return p.e;
  return Vector::Ones(prob.m);
}

double beta_at(const SolverParams& p, int k) { return p.beta_schedule ? p.beta_schedule(k) : p.beta; }
double gamma_at(const SolverParams& p, int k) { return p.gamma_schedule ? p.gamma_schedule(k) : p.gamma; }

void record(InvariantReport& inv, bool ok, const std::string& what) {
  ++inv.checks;
  if (!ok) {
    ++inv.violations;
    if (inv.notes.size() < 20) inv.notes.push_back(what);
  }
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::FixedPoint: return "stopped-at-fixed-point";
    case SolveStatus::MaxIters: return "max-iters";
    case SolveStatus::InvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

Halfspace halfspace_closer_to(const Vector& p, const Vector& q, double gamma) {
  if (p.size() != q.size()) throw std::invalid_argument("halfspace_closer_to: dimension mismatch");
  Halfspace h;
  h.normal = 2.0 * (p - q);
  h.offset = h.normal.dot(p) - gamma * bregman_distance(p, q);
  return h;
}

Halfspace anchor_halfspace(const Vector& origin, const Vector& current) {
  if (origin.size() != current.size()) throw std::invalid_argument("anchor_halfspace: dimension mismatch");
  Halfspace h;
  h.normal = 2.0 * (origin - current);
  h.offset = h.normal.dot(current);
  return h;
}

Vector fixed_point_step(const Problem& prob, const Vector& v) { return prob.T.project(v, v); }

namespace {

// K pieces as halfspace rows when K is polyhedral; empty optional otherwise.
std::optional<std::vector<Halfspace>> polyhedral_rows(const std::vector<ConvexPiece>& pieces,
                                                      Eigen::Index n) {
  std::vector<Halfspace> rows;
  for (const auto& piece : pieces) {
    if (const auto* box = std::get_if<Box>(&piece)) {
      for (Eigen::Index i = 0; i < n; ++i) {
        Vector up = Vector::Zero(n), down = Vector::Zero(n);
        up[i] = 1.0;
        down[i] = -1.0;
        if (std::isfinite(box->hi[i])) rows.push_back(Halfspace{up, box->hi[i]});
        if (std::isfinite(box->lo[i])) rows.push_back(Halfspace{down, -box->lo[i]});
      }
    } else if (const auto* h = std::get_if<Halfspace>(&piece)) {
      rows.push_back(*h);
    } else {
      return std::nullopt;
    }
  }
  return rows;
}

}  // namespace

Vector project_cut_set(const Problem& prob, const Vector& x, std::vector<Cut>& cuts,
                       const SolverParams& params) {
  const auto ambient_rows = polyhedral_rows(prob.K, x.size());

  // Geometric resolution of the polyhedral projection. A cut component whose
  // subgradient has norm s cannot be enforced below s * kGeomTol in function
  // value, so the membership test widens accordingly; the widened threshold
  // stays orders below the 1e-6 membership invariant. Tighter settings start
  // misclassifying cut boundaries that pass through box corners.
  constexpr double kGeomTol = 1e-12;

  // Supports generated during this call, newest last. Cached supports from
  // earlier calls seed the pool. Dropping any support is sound (each one
  // contains the true cut set), so dedup and cache pruning only trade
  // refinement rounds, never correctness.
  struct Support {
    Halfspace row;  // unit normal
    int cut;
  };
  std::vector<Support> pool;
  for (std::size_t j = 0; j < cuts.size(); ++j) {
    for (const auto& h : cuts[j].refinements) pool.push_back({h, static_cast<int>(j)});
  }

  const auto assemble = [&]() {
    std::vector<Halfspace> rows;
    rows.reserve(pool.size());
    for (const auto& support : pool) rows.push_back(support.row);
    return rows;
  };

  Vector w = x;
  for (int round = 0; round < params.cut_max_rounds; ++round) {
    const std::vector<Halfspace> extra = assemble();
    if (ambient_rows) {
      std::vector<Halfspace> rows = *ambient_rows;
      rows.insert(rows.end(), extra.begin(), extra.end());
      try {
        w = project_polyhedron_active_set(x, rows, kGeomTol);
      } catch (const InfeasibleIntersection& err) {
        throw EngineError(std::string("cut-set projection: ") + err.what() +
                          "; the cut set may be empty");
      }
    } else {
      // Non-polyhedral ambient set: fall back to alternating projections.
      std::vector<ConvexPiece> pieces = prob.K;
      for (const auto& h : extra) pieces.emplace_back(h);
      auto res =
          project_intersection_dykstra(x, pieces, params.dykstra_tol, params.dykstra_max_sweeps);
      if (!res.converged) {
        throw EngineError("cut-set projection: alternating projections stalled; the cut set may "
                          "be empty");
      }
      w = res.point;
    }

    // Check the true cut memberships and linearize what is still violated.
    bool violated = false;
    for (std::size_t j = 0; j < cuts.size(); ++j) {
      const Vector fvals = prob.f.eval(cuts[j].anchor, w);
      for (int i = 0; i < fvals.size(); ++i) {
        if (fvals[i] <= params.cut_tol) continue;
        const Vector s = prob.f.subgrad_y(cuts[j].anchor, w, i);
        const double sn = s.norm();
        if (sn * sn <= 1e-30) {
          throw EngineError("cut-set projection: violated cut with vanishing subgradient");
        }
        if (fvals[i] <= sn * 10.0 * kGeomTol) continue;  // below geometric resolution
        violated = true;
        pool.push_back({Halfspace{s / sn, (s.dot(w) - fvals[i]) / sn}, static_cast<int>(j)});
      }
    }
    if (!violated) {
      // Cache the supports binding at the accepted point, newest first, a
      // handful per cut; inactive scaffolding from the refinement rounds is
      // discarded.
      for (auto& cut : cuts) cut.refinements.clear();
      constexpr std::size_t kCachePerCut = 4;
      for (std::size_t i = pool.size(); i-- > 0;) {
        auto& cut = cuts[pool[i].cut];
        if (cut.refinements.size() >= kCachePerCut) continue;
        if (pool[i].row.slack(w) >= -1e-6) cut.refinements.push_back(pool[i].row);
      }
      return w;
    }
  }
  throw EngineError("cut-set projection: refinement budget exhausted; the cut set may be empty "
                    "or the tolerances unreachable");
}

StepOutcome advance(const Problem& prob, const SolverParams& params, SolverState& state) {
  const int k = state.k;
  const Vector& v = state.v;

  if (v.norm() > params.iterate_bound) {
    throw EngineError("iterate norm exceeded the configured bound; the dual solution set may be "
                      "empty (boundedness assumption unverifiable)");
  }

  const double beta_k = beta_at(params, k);
  const double gamma_k = gamma_at(params, k);
  const InteriorDirection e_k(direction_at(prob, params, k));
  const DualWeight c = params.weight.size() > 0 ? DualWeight(params.weight)
                                                : DualWeight::uniform(prob.m);

  state.x = fixed_point_step(prob, v);

  SubproblemSpec spec(state.x, v, beta_k, e_k, c, params.inner_tol, params.inner_max_iters);
  const SubproblemResult sub = solve_subproblem(prob, spec);
  state.z = sub.z;
  state.subsolver_iters = sub.iterations;

  if ((state.z - v).norm() <= params.eps_fix) return StepOutcome::FixedPoint;

  const LinesearchResult ls =
      armijo_search(prob.f, state.x, state.z, beta_k, params.delta, params.theta, e_k,
                    params.ell_max);
  state.y = ls.y;
  state.alpha = ls.alpha;
  state.ell = ls.ell;

  if (params.check_invariants) {
    auto& inv = state.invariants;
    inv.worst_minty = std::min(inv.worst_minty, ls.minty_value);
    record(inv, ls.minty_value > -kMintyTol,
           "f(y,x) in -C after linesearch at k=" + std::to_string(k));
    bool minimal = true;
    for (int l = 0; l + 1 < static_cast<int>(ls.trials.size()); ++l) {
      if (ls.trials[l].minCoeff() <= 0.0) minimal = false;
    }
    if (!minimal) inv.linesearch_minimality_ok = false;
    record(inv, minimal, "linesearch accepted a non-minimal trial at k=" + std::to_string(k));
  }

  state.cuts.push_back(Cut{state.y, {}});
  if (params.max_cuts > 0 && static_cast<int>(state.cuts.size()) > params.max_cuts) {
    state.cuts.erase(state.cuts.begin());
  }

  state.w = project_cut_set(prob, state.x, state.cuts, params);

  if (params.check_invariants) {
    auto& inv = state.invariants;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& cut : state.cuts) {
      worst = std::max(worst, prob.f.eval(cut.anchor, state.w).maxCoeff());
    }
    inv.worst_cut = std::max(inv.worst_cut, worst);
    record(inv, worst <= kCutMembershipTol, "w outside a stored cut at k=" + std::to_string(k));
  }

  state.L = halfspace_closer_to(state.x, state.w, gamma_k);
  state.M = halfspace_closer_to(v, state.x, gamma_k);
  state.N = anchor_halfspace(state.v0, v);

  const Vector v_next = project_halfspaces_exact(state.v0, {state.L, state.M, state.N});

  if (params.check_invariants) {
    auto& inv = state.invariants;
    const double membership = std::max({state.L.distance(v_next), state.M.distance(v_next),
                                        state.N.distance(v_next)});
    inv.worst_lmn = std::max(inv.worst_lmn, membership);
    record(inv, membership <= kLmnTol,
           "v_{k+1} outside the regularization halfspaces at k=" + std::to_string(k));

    const double d_prev = bregman_distance(v, state.v0);
    const double d_next = bregman_distance(v_next, state.v0);
    inv.worst_monotone = std::min(inv.worst_monotone, d_next - d_prev);
    record(inv, d_next >= d_prev - kMonotoneSlack,
           "D_g(v,v0) decreased at k=" + std::to_string(k));

    Rng rng(state.rng_state == 0 ? stream_seed(params.seed, static_cast<std::uint64_t>(k))
                                 : state.rng_state);
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < params.c1_samples; ++s) {
      Vector draw(prob.n);
      for (int i = 0; i < prob.n; ++i) {
        draw[i] = rng.uniform(prob.bounds.lo[i], prob.bounds.hi[i]);
      }
      const Vector ys = prob.T.project(v, draw);
      worst_gap = std::max(worst_gap, subproblem_optimality_gap(prob, spec, state.z, ys));
    }
    state.rng_state = rng.state;
    if (params.c1_samples > 0) {
      inv.worst_c1 = std::max(inv.worst_c1, worst_gap);
      record(inv, worst_gap <= kC1Tol,
             "subproblem optimality inequality violated at k=" + std::to_string(k));
    }
  }

  state.gap_vv = (v_next - v).norm();
  state.v = v_next;
  ++state.k;
  return StepOutcome::Advanced;
}

SolveReport solve(const Problem& prob, const SolverParams& params, const Vector& v0) {
  validate(prob, params);
  if (v0.size() != prob.n) throw std::invalid_argument("solve: start point dimension mismatch");
  if (!prob.in_K(v0, 1e-7)) throw std::invalid_argument("solve: start point outside K");

  SolveReport report;
  SolverState state;
  state.v0 = v0;
  state.v = v0;
  state.rng_state = stream_seed(params.seed, 0x517cc1b727220a95ULL);

  const auto t_start = std::chrono::steady_clock::now();
  try {
    while (state.k < params.max_outer) {
      const Vector v_before = state.v;
      const auto it_start = std::chrono::steady_clock::now();
      const StepOutcome outcome = advance(prob, params, state);
      const auto it_end = std::chrono::steady_clock::now();

      if (outcome == StepOutcome::FixedPoint) {
        report.status = SolveStatus::FixedPoint;
        report.solution = state.x;
        break;
      }

      if (params.keep_trace) {
        IterateRecord row;
        row.k = state.k - 1;
        row.v = v_before;
        row.x = state.x;
        row.z = state.z;
        row.y = state.y;
        row.w = state.w;
        row.alpha = state.alpha;
        row.ell = state.ell;
        row.n_cuts = static_cast<int>(state.cuts.size());
        row.d_v0 = bregman_distance(state.v, state.v0);
        row.gap_vv = state.gap_vv;
        row.gap_vx = (v_before - state.x).norm();
        row.gap_xw = (state.x - state.w).norm();
        row.subsolver_iters = state.subsolver_iters;
        row.wall_ms = std::chrono::duration<double, std::milli>(it_end - it_start).count();
        report.trace.push_back(std::move(row));
      }

      report.final_gap = state.gap_vv;
      if (state.gap_vv < params.eps_stop) {
        report.status = SolveStatus::Converged;
        report.solution = state.x;
        break;
      }
    }
    if (report.solution.size() == 0) {
      report.status = SolveStatus::MaxIters;
      report.solution = state.x.size() > 0 ? state.x : state.v;
      report.message = "outer iteration budget exhausted";
    }
  } catch (const EngineError& err) {
    report.status = SolveStatus::InvariantViolation;
    report.solution = state.x.size() > 0 ? state.x : state.v;
    report.message = err.what();
  } catch (const LinesearchFailure& err) {
    report.status = SolveStatus::InvariantViolation;
    report.solution = state.x.size() > 0 ? state.x : state.v;
    report.message = err.what();
  } catch (const InfeasibleIntersection& err) {
    report.status = SolveStatus::InvariantViolation;
    report.solution = state.x.size() > 0 ? state.x : state.v;
    report.message = err.what();
  } catch (const ProjectionFailure& err) {
    report.status = SolveStatus::InvariantViolation;
    report.solution = state.x.size() > 0 ? state.x : state.v;
    report.message = err.what();
  }
  const auto t_end = std::chrono::steady_clock::now();

  report.v_final = state.v;
  report.iterations = state.k;
  report.wall_seconds = std::chrono::duration<double>(t_end - t_start).count();
  report.invariants = state.invariants;
  return report;
}

}  // namespace vqem
