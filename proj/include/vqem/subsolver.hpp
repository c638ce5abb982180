#ifndef VQEM_SUBSOLVER_HPP
#define VQEM_SUBSOLVER_HPP

#include "vqem/model.hpp"

namespace vqem {

/// One proximal subproblem: minimize over T(base)
///   psi(y) = beta * <f(x, y), c> + <e, c> * (||y||^2 - <y, 2x>),
/// which up to a constant is beta * <f(x, .), c> + <e, c> * ||. - x||^2.
/// The minimizer is a weakly efficient point of the vector objective and c
/// is its certificate weight.
struct SubproblemSpec {
  Vector x;     // prox center
  Vector base;  // feasible set is T(base)
  double beta;
  InteriorDirection e;
  DualWeight c;
  double tol;
  int max_iters;

  SubproblemSpec(Vector x_, Vector base_, double beta_, InteriorDirection e_, DualWeight c_,
                 double tol_ = 1e-8, int max_iters_ = 50000);
};

struct SubproblemResult {
  Vector z;
  DualWeight c_used;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;  // psi(z)
  double residual = 0.0;   // prox-gradient residual at the reference step
  int backtracks = 0;
};

double scalarized_objective(const Problem& prob, const SubproblemSpec& spec, const Vector& y);
Vector scalarized_gradient(const Problem& prob, const SubproblemSpec& spec, const Vector& y);

/// Projected-gradient descent on the scalarized prox objective, warm started
/// at the projection of x onto T(base). Steps are backtracked until the
/// descent condition holds, so psi is non-increasing along the iterates.
SubproblemResult solve_subproblem(const Problem& prob, const SubproblemSpec& spec);

/// Slack of the subproblem optimality inequality at z for a probe point y:
///   <y - z, g'(x) - g'(z)> <e,c> - beta (<f(x,y),c> - <f(x,z),c>).
/// Nonpositive (up to solver tolerance) for every y in T(base) when z solves
/// the subproblem.
double subproblem_optimality_gap(const Problem& prob, const SubproblemSpec& spec, const Vector& z,
                                 const Vector& y);

}  // namespace vqem

#endif
