#include "vqem/model.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace vqem {

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

DualWeight::DualWeight(Vector weights) : w(std::move(weights)) {
  if (w.size() < 1) throw std::invalid_argument("DualWeight: empty");
  require_finite(w, "DualWeight");
  if (w.minCoeff() < 0.0) throw std::invalid_argument("DualWeight: negative component");
  if (w.maxCoeff() <= 0.0) throw std::invalid_argument("DualWeight: all components zero");
}

DualWeight DualWeight::uniform(int m) {
  if (m < 1) throw std::invalid_argument("DualWeight::uniform: m < 1");
  return DualWeight(Vector::Constant(m, 1.0 / m));
}

InteriorDirection::InteriorDirection(Vector direction) : e(std::move(direction)) {
  if (e.size() < 1) throw std::invalid_argument("InteriorDirection: empty");
  require_finite(e, "InteriorDirection");
  if (e.minCoeff() <= 0.0) throw std::invalid_argument("InteriorDirection: component not > 0");
}

InteriorDirection InteriorDirection::ones(int m) {
  if (m < 1) throw std::invalid_argument("InteriorDirection::ones: m < 1");
  return InteriorDirection(Vector::Ones(m));
}

bool in_neg_cone(const Vector& v, double tol) { return v.maxCoeff() <= tol; }

bool not_in_neg_interior(const Vector& v) { return v.maxCoeff() >= 0.0; }

double scalarize(const Vector& v, const DualWeight& c) {
  if (v.size() != c.w.size()) throw std::invalid_argument("scalarize: dimension mismatch");
  return v.dot(c.w);
}

std::function<Vector(const Vector&, const Vector&, int)> finite_difference_subgrad(
    std::function<Vector(const Vector&, const Vector&)> eval, double step) {
  return [eval = std::move(eval), step](const Vector& x, const Vector& y, int i) {
    Vector g(y.size());
    Vector yp = y, ym = y;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      yp[j] = y[j] + step;
      ym[j] = y[j] - step;
      g[j] = (eval(x, yp)[i] - eval(x, ym)[i]) / (2.0 * step);
      yp[j] = y[j];
      ym[j] = y[j];
    }
    return g;
  };
}

ConstraintMap piecewise_constraint_map(
    std::function<std::vector<ConvexPiece>(const Vector& x)> pieces, double tol,
    int max_sweeps) {
  auto shared = std::make_shared<std::function<std::vector<ConvexPiece>(const Vector&)>>(
      std::move(pieces));
  ConstraintMap map;
  map.contains = [shared](const Vector& x, const Vector& y, double t) {
    for (const auto& piece : (*shared)(x)) {
      if (!piece_contains(piece, y, t)) return false;
    }
    return true;
  };
  map.project = [shared, tol, max_sweeps](const Vector& x, const Vector& p) {
    const auto ps = (*shared)(x);
    auto res = project_intersection_dykstra(p, ps, tol, max_sweeps);
    if (!res.converged) {
      throw ProjectionFailure("constraint-map projection did not converge (violation " +
                              std::to_string(res.max_violation) + ")");
    }
    return res.point;
  };
  return map;
}

Vector Problem::project_K(const Vector& p, double tol) const {
  auto res = project_intersection_dykstra(p, K, tol);
  if (!res.converged) throw ProjectionFailure("projection onto K did not converge");
  return res.point;
}

bool Problem::in_K(const Vector& p, double tol) const {
  for (const auto& piece : K) {
    if (!piece_contains(piece, p, tol)) return false;
  }
  return true;
}

}  // namespace vqem
