#ifndef VQEM_LINESEARCH_HPP
#define VQEM_LINESEARCH_HPP

#include "vqem/model.hpp"

namespace vqem {

/// Raised when the backtracking exceeds its trial budget. The search is
/// finite for any bifunction satisfying the model contracts, so running out
/// of trials points at a contract violation or an inaccurate subproblem
/// solution.
struct LinesearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LinesearchResult {
  int ell = 0;          // accepted trial index
  double alpha = 1.0;   // theta^ell, accumulated by repeated multiplication
  Vector y;             // alpha * z + (1 - alpha) * x
  std::vector<Vector> trials;  // test vector at each trial, accepted one last
  double minty_value = 0.0;    // max_i f_i(y, x); expected > -tol when x != z
};

/// Armijo-type backtracking over trial points y_l = theta^l z + (1-theta^l) x:
/// returns the smallest l >= 0 whose test vector
///   w(l) = -beta f(y_l, x) + beta f(y_l, z) + delta ||z - x||^2 e
/// leaves the interior of the cone, i.e. min_i w_i(l) <= 0. The interior
/// test is a strict floating comparison; the delta term already provides
/// slack, and a tolerance here would bias the accepted index.
LinesearchResult armijo_search(const Bifunction& f, const Vector& x, const Vector& z, double beta,
                               double delta, double theta, const InteriorDirection& e,
                               int ell_max = 60);

}  // namespace vqem

#endif
