#include "vqem/subsolver.hpp"

#include <cmath>
#include <utility>

namespace vqem {

SubproblemSpec::SubproblemSpec(Vector x_, Vector base_, double beta_, InteriorDirection e_,
                               DualWeight c_, double tol_, int max_iters_)
    : x(std::move(x_)),
      base(std::move(base_)),
      beta(beta_),
      e(std::move(e_)),
      c(std::move(c_)),
      tol(tol_),
      max_iters(max_iters_) {
  if (beta <= 0.0) throw std::invalid_argument("SubproblemSpec: beta must be positive");
  if (e.dim() != c.dim()) throw std::invalid_argument("SubproblemSpec: e/c dimension mismatch");
  if (x.size() != base.size()) throw std::invalid_argument("SubproblemSpec: x/base dimension mismatch");
  if (tol <= 0.0 || max_iters < 1) throw std::invalid_argument("SubproblemSpec: bad tolerance or budget");
}

double scalarized_objective(const Problem& prob, const SubproblemSpec& spec, const Vector& y) {
  const double ec = spec.e.e.dot(spec.c.w);
  const double fval = scalarize(prob.f.eval(spec.x, y), spec.c);
  return spec.beta * fval + ec * (y.squaredNorm() - 2.0 * y.dot(spec.x));
}

Vector scalarized_gradient(const Problem& prob, const SubproblemSpec& spec, const Vector& y) {
  const double ec = spec.e.e.dot(spec.c.w);
  Vector g = 2.0 * ec * (y - spec.x);
  for (int i = 0; i < prob.m; ++i) {
    const double ci = spec.c.w[i];
    if (ci == 0.0) continue;
    g += spec.beta * ci * prob.f.subgrad_y(spec.x, y, i);
  }
  return g;
}

double subproblem_optimality_gap(const Problem& prob, const SubproblemSpec& spec, const Vector& z,
                                 const Vector& y) {
  const double ec = spec.e.e.dot(spec.c.w);
  const double lhs = (y - z).dot(2.0 * spec.x - 2.0 * z) * ec;
  const double rhs =
      spec.beta * (scalarize(prob.f.eval(spec.x, y), spec.c) - scalarize(prob.f.eval(spec.x, z), spec.c));
  return lhs - rhs;
}

SubproblemResult solve_subproblem(const Problem& prob, const SubproblemSpec& spec) {
  const double ec = spec.e.e.dot(spec.c.w);
  if (ec <= 0.0) throw std::invalid_argument("solve_subproblem: <e, c> must be positive");
  const double sigma = 2.0 * ec;  // strong-convexity modulus of psi

  SubproblemResult out{Vector(), spec.c};

  Vector y = prob.T.project(spec.base, spec.x);
  double psi = scalarized_objective(prob, spec, y);

  Vector grad = scalarized_gradient(prob, spec, y);
  double lipschitz = std::max(sigma, grad.norm());
  double step = 1.0 / (lipschitz + sigma);

  const double scale = std::max(1.0, y.norm());
  int t = 0;
  for (; t < spec.max_iters; ++t) {
    const Vector trial_ref = prob.T.project(spec.base, y - step * grad);
    const double move = (trial_ref - y).norm();

    // Residual measured at a fixed reference step so shrinking steps cannot
    // fake convergence.
    if (move <= spec.tol * std::max(1.0, step / (1.0 / (lipschitz + sigma)))) {
      const double step_ref = 1.0 / (lipschitz + sigma);
      const Vector ref = prob.T.project(spec.base, y - step_ref * grad);
      out.residual = (ref - y).norm();
      if (out.residual <= spec.tol) {
        out.converged = true;
        break;
      }
    }

    // Backtrack until the descent-lemma bound holds; this keeps psi
    // monotonically non-increasing.
    Vector trial = trial_ref;
    double psi_trial = scalarized_objective(prob, spec, trial);
    int guard = 0;
    while (psi_trial > psi + grad.dot(trial - y) + (trial - y).squaredNorm() / (2.0 * step) &&
           guard < 80) {
      step *= 0.5;
      ++out.backtracks;
      ++guard;
      trial = prob.T.project(spec.base, y - step * grad);
      psi_trial = scalarized_objective(prob, spec, trial);
    }
    if (guard >= 80 || (trial - y).norm() <= 1e-18 * scale) {
      // Nonsmooth stall: take the diminishing safe step and keep going.
      step = 1.0 / (lipschitz + sigma * (t + 1.0));
      trial = prob.T.project(spec.base, y - step * grad);
      psi_trial = scalarized_objective(prob, spec, trial);
      if (psi_trial > psi) {
        // No progress in any direction; report the residual and stop.
        const double step_ref = 1.0 / (lipschitz + sigma);
        out.residual = (prob.T.project(spec.base, y - step_ref * grad) - y).norm();
        out.converged = out.residual <= spec.tol;
        break;
      }
    }

    y = trial;
    psi = psi_trial;
    grad = scalarized_gradient(prob, spec, y);
    lipschitz = std::max(lipschitz, grad.norm());
    step = std::min(step * 1.6, 1.0 / sigma);
  }

  out.z = y;
  out.iterations = t;
  out.objective = psi;
  if (!out.converged) {
    const double step_ref = 1.0 / (lipschitz + sigma);
    out.residual = (prob.T.project(spec.base, y - step_ref * grad) - y).norm();
    out.converged = out.residual <= spec.tol;
  }
  return out;
}

}  // namespace vqem
