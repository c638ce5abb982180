#ifndef VQEM_ORACLE_HPP
#define VQEM_ORACLE_HPP

#include <cstdint>

#include "vqem/subsolver.hpp"

namespace vqem {

/// Sampling-based evidence about a solution candidate. A passing certificate
/// is evidence at the sampling resolution; a failing one carries a witness
/// that definitively rules the candidate out.
struct Certificate {
  double primal_residual = 0.0;  // min over sampled y in T(x*) of max_i f_i(x*, y)
  double fix_distance = 0.0;     // ||x* - proj_{T(x*)}(x*)||
  double dual_residual = 0.0;    // max over sampled y in K of max_i f_i(y, x*)
  int n_samples = 0;             // accepted primal samples
  std::uint64_t seed = 0;
  bool conclusive = false;       // enough accepted samples
  Vector primal_witness;         // y attaining primal_residual
  Vector dual_witness;           // y attaining dual_residual
};

/// Certifies x_star against the problem definition by direct sampling of
/// T(x_star): uniform draws over the bounding box (members kept, and their
/// projections onto T(x_star) added) plus a regular grid. Independent of the
/// solver; shares only the problem definition.
Certificate vqep_residual(const Problem& prob, const Vector& x_star, int n_samples = 10000,
                          std::uint64_t seed = 0);

/// max over sampled y in K of max_i f_i(y, x_star); <= tol at the sampling
/// resolution indicates membership in the dual solution set.
double dual_residual(const Problem& prob, const Vector& x_star, int n_samples = 10000,
                     std::uint64_t seed = 0);

/// Grid-search argmin of the scalarized subproblem objective over T(base).
/// Stages refine toward the incumbent until the cell size reaches grid_step,
/// so the final resolution is grid_step while early stages stay affordable.
/// Only for n <= 3.
Vector brute_force_subproblem(const Problem& prob, const SubproblemSpec& spec, double grid_step);

}  // namespace vqem

#endif
