#include "vqem/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "vqem/rng.hpp"

namespace vqem {

namespace {

// Walks a regular inclusive grid over the box at `res` points per axis.
template <typename F>
void for_each_grid_point(const Box& box, int res, F&& visit) {
  const int n = static_cast<int>(box.lo.size());
  std::vector<int> idx(n, 0);
  Vector y(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      const double t = (res == 1) ? 0.5 : static_cast<double>(idx[i]) / (res - 1);
      y[i] = box.lo[i] + t * (box.hi[i] - box.lo[i]);
    }
    visit(y);
    int axis = 0;
    while (axis < n && ++idx[axis] == res) {
      idx[axis] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
}

Vector random_point(const Box& box, std::uint64_t seed, std::uint64_t index) {
  Rng rng(stream_seed(seed, index));
  Vector y(box.lo.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.uniform(box.lo[i], box.hi[i]);
  return y;
}

int grid_resolution(int n_samples, int dim) {
  const double r = std::ceil(std::pow(static_cast<double>(std::max(1, n_samples)), 1.0 / dim));
  return std::max(2, static_cast<int>(r));
}

}  // namespace

Certificate vqep_residual(const Problem& prob, const Vector& x_star, int n_samples,
                          std::uint64_t seed) {
  Certificate cert;
  cert.seed = seed;

  cert.fix_distance = (x_star - prob.T.project(x_star, x_star)).norm();

  double best = std::numeric_limits<double>::infinity();
  Vector witness;
  int accepted = 0;
  const auto consider = [&](const Vector& y) {
    if (!prob.T.contains(x_star, y, kFeasTol)) return;
    ++accepted;
    const double worst = prob.f.eval(x_star, y).maxCoeff();
    if (worst < best) {
      best = worst;
      witness = y;
    }
  };

  // The projection of x_star is always a member; it seeds thin sets where
  // box sampling accepts almost nothing.
  consider(prob.T.project(x_star, x_star));

  for_each_grid_point(prob.bounds, grid_resolution(n_samples, prob.n), consider);
  for (int s = 0; s < n_samples; ++s) {
    const Vector draw = random_point(prob.bounds, seed, static_cast<std::uint64_t>(s));
    consider(draw);
    consider(prob.T.project(x_star, draw));
  }

  cert.n_samples = accepted;
  cert.conclusive = accepted >= 10;
  if (accepted > 0) {
    // Re-verify the witness by a direct evaluation before reporting it.
    cert.primal_residual = prob.f.eval(x_star, witness).maxCoeff();
    cert.primal_witness = witness;
  }

  double dual = -std::numeric_limits<double>::infinity();
  Vector dual_witness;
  const auto consider_dual = [&](const Vector& y) {
    if (!prob.in_K(y)) return;
    const double worst = prob.f.eval(y, x_star).maxCoeff();
    if (worst > dual) {
      dual = worst;
      dual_witness = y;
    }
  };
  for_each_grid_point(prob.bounds, grid_resolution(n_samples, prob.n), consider_dual);
  for (int s = 0; s < n_samples; ++s) {
    consider_dual(random_point(prob.bounds, seed ^ 0x5bf0361103d7a5a5ULL,
                               static_cast<std::uint64_t>(s)));
  }
  if (dual_witness.size() > 0) {
    cert.dual_residual = prob.f.eval(dual_witness, x_star).maxCoeff();
    cert.dual_witness = dual_witness;
  }
  return cert;
}

double dual_residual(const Problem& prob, const Vector& x_star, int n_samples,
                     std::uint64_t seed) {
  return vqep_residual(prob, x_star, n_samples, seed).dual_residual;
}

Vector brute_force_subproblem(const Problem& prob, const SubproblemSpec& spec, double grid_step) {
  if (prob.n > 3) throw std::invalid_argument("brute_force_subproblem: dimension above 3");
  if (grid_step <= 0.0) throw std::invalid_argument("brute_force_subproblem: grid_step must be positive");

  // Deliberately re-derives the scalar objective instead of reusing the
  // solver's evaluator.
  const double ec = spec.e.e.dot(spec.c.w);
  const auto psi = [&](const Vector& y) {
    return spec.beta * prob.f.eval(spec.x, y).dot(spec.c.w) +
           ec * (y.squaredNorm() - 2.0 * y.dot(spec.x));
  };

  Box window = prob.bounds;
  double extent = (window.hi - window.lo).maxCoeff();
  double h = std::max(grid_step, extent / 200.0);

  bool have_best = false;
  double best_val = std::numeric_limits<double>::infinity();
  Vector best;

  while (true) {
    const int res = std::max(
        2, static_cast<int>(std::floor((window.hi - window.lo).maxCoeff() / h)) + 1);
    for_each_grid_point(window, res, [&](const Vector& y) {
      Vector cand = y;
      if (!prob.T.contains(spec.base, cand, kFeasTol)) {
        cand = prob.T.project(spec.base, cand);
      }
      const double v = psi(cand);
      if (!have_best || v < best_val) {
        have_best = true;
        best_val = v;
        best = cand;
      }
    });
    if (h <= grid_step) break;
    // Shrink around the incumbent; keep a margin of a few cells so the true
    // argmin cannot escape the window between stages.
    Box next;
    next.lo = (best.array() - 3.0 * h).matrix().cwiseMax(prob.bounds.lo);
    next.hi = (best.array() + 3.0 * h).matrix().cwiseMin(prob.bounds.hi);
    window = next;
    h = std::max(grid_step, h / 8.0);
  }
  if (!have_best) throw InfeasibleIntersection("brute_force_subproblem: no feasible grid point");
  return best;
}

}  // namespace vqem
