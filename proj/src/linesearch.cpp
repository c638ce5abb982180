#include "vqem/linesearch.hpp"

namespace vqem {

LinesearchResult armijo_search(const Bifunction& f, const Vector& x, const Vector& z, double beta,
                               double delta, double theta, const InteriorDirection& e,
                               int ell_max) {
  if (x.size() != z.size()) throw std::invalid_argument("armijo_search: dimension mismatch");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("armijo_search: delta not in (0,1)");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("armijo_search: theta not in (0,1)");
  if (beta <= 0.0) throw std::invalid_argument("armijo_search: beta must be positive");

  const double dzx = bregman_distance(z, x);
  const Vector slack = delta * dzx * e.e;

  LinesearchResult out;
  double alpha = 1.0;
  for (int ell = 0; ell <= ell_max; ++ell, alpha *= theta) {
    const Vector y = alpha * z + (1.0 - alpha) * x;
    const Vector w = beta * (f.eval(y, z) - f.eval(y, x)) + slack;
    out.trials.push_back(w);
    if (w.minCoeff() <= 0.0) {
      out.ell = ell;
      out.alpha = alpha;
      out.y = y;
      out.minty_value = f.eval(y, x).maxCoeff();
      return out;
    }
  }
  throw LinesearchFailure("armijo_search: no acceptable step within " + std::to_string(ell_max) +
                          " trials; check the bifunction contracts and subproblem accuracy");
}

}  // namespace vqem
