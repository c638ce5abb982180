#ifndef VQEM_MODEL_HPP
#define VQEM_MODEL_HPP

#include <functional>
#include <string>

#include "vqem/geometry.hpp"

namespace vqem {

inline constexpr double kConeTol = 1e-9;

/// Nonzero nonnegative weight on the ordering cone R^m_+, used to turn the
/// vector subproblem into a scalar one.
struct DualWeight {
  Vector w;
  explicit DualWeight(Vector weights);
  static DualWeight uniform(int m);
  int dim() const { return static_cast<int>(w.size()); }
};

/// Strictly positive direction, i.e. a point of int(R^m_+).
struct InteriorDirection {
  Vector e;
  explicit InteriorDirection(Vector direction);
  static InteriorDirection ones(int m);
  int dim() const { return static_cast<int>(e.size()); }
};

/// v in -R^m_+ up to an additive tolerance.
bool in_neg_cone(const Vector& v, double tol = kConeTol);

/// v not in -int(R^m_+): some component is >= 0.
bool not_in_neg_interior(const Vector& v);

/// <v, c>.
double scalarize(const Vector& v, const DualWeight& c);

/// Vector bifunction f : R^n x R^n -> R^m together with a per-component
/// subgradient in the second argument. Contracts (checked by the property
/// suites where testable): f(x,x) = 0; each component convex in y; eval
/// continuous.
struct Bifunction {
  std::function<Vector(const Vector& x, const Vector& y)> eval;
  std::function<Vector(const Vector& x, const Vector& y, int i)> subgrad_y;
};

/// Central-difference fallback for smooth components.
std::function<Vector(const Vector&, const Vector&, int)> finite_difference_subgrad(
    std::function<Vector(const Vector&, const Vector&)> eval, double step = 1e-6);

/// Raised when an iterative projection inside a constraint map fails to
/// converge (empty or numerically intractable set).
struct ProjectionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multivalued constraint mapping x -> T(x): membership test plus Euclidean
/// projection onto T(x). All shipped maps satisfy x in T(x) on their domain.
struct ConstraintMap {
  std::function<bool(const Vector& x, const Vector& y, double tol)> contains;
  std::function<Vector(const Vector& x, const Vector& p)> project;
};

/// Builds a ConstraintMap whose value at x is an intersection of convex
/// pieces; single pieces project directly, intersections via Dykstra.
ConstraintMap piecewise_constraint_map(
    std::function<std::vector<ConvexPiece>(const Vector& x)> pieces,
    double tol = 1e-10, int max_sweeps = kDykstraMaxSweeps);

/// A vector quasi-equilibrium problem instance: find x* in T(x*) with
/// f(x*, y) outside -int(R^m_+) for every y in T(x*).
struct Problem {
  int n = 0;
  int m = 0;
  Bifunction f;
  ConstraintMap T;
  std::vector<ConvexPiece> K;  // ambient feasible set
  Box bounds;                  // bounding box of K, used by samplers
  std::string name;

  Vector project_K(const Vector& p, double tol = 1e-10) const;
  bool in_K(const Vector& p, double tol = kFeasTol) const;
};

}  // namespace vqem

#endif
