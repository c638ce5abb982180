#ifndef VQEM_GEOMETRY_HPP
#define VQEM_GEOMETRY_HPP

#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace vqem {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kFeasTol = 1e-9;
inline constexpr int kDykstraMaxSweeps = 10000;

/// Auxiliary-function geometry built on g(x) = ||x||^2. With this g the
/// Bregman distance is the squared Euclidean distance and the Bregman
/// projection is the metric projection, which is all the solver needs in
/// finite dimensions. Alternate auxiliary functions would slot in here.
struct BregmanGeometry {
  double value(const Vector& x) const { return x.squaredNorm(); }
  Vector gradient(const Vector& x) const { return 2.0 * x; }
  double distance(const Vector& x, const Vector& y) const;
};

/// D_g(x, y) for the shipped geometry; equals ||x - y||^2.
double bregman_distance(const Vector& x, const Vector& y);

/// g'(x) = 2x.
inline Vector bregman_gradient(const Vector& x) { return 2.0 * x; }

/// Closed halfspace {z : <normal, z> <= offset}.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  /// <normal, z> - offset (positive means outside).
  double slack(const Vector& z) const { return normal.dot(z) - offset; }

  /// Euclidean distance from z to the halfspace (0 when inside).
  double distance(const Vector& z) const;

  bool contains(const Vector& z, double tol = kFeasTol) const {
    return distance(z) <= tol;
  }

  /// True when the normal vanishes and the set degenerates to the whole
  /// space (the defining inequality reads 0 <= 0).
  bool trivial() const { return normal.squaredNorm() <= 1e-30; }
};

/// Axis-aligned box {z : lo <= z <= hi}.
struct Box {
  Vector lo, hi;
  bool contains(const Vector& z, double tol = kFeasTol) const;
};

/// Euclidean ball of given center and radius.
struct Ball {
  Vector center;
  double radius = 0.0;
  bool contains(const Vector& z, double tol = kFeasTol) const;
};

using ConvexPiece = std::variant<Box, Halfspace, Ball>;

Vector project_halfspace(const Vector& p, const Halfspace& h);
Vector project_box(const Vector& p, const Vector& lo, const Vector& hi);
Vector project_box(const Vector& p, const Box& box);
Vector project_ball(const Vector& p, const Ball& ball);

Vector project_piece(const Vector& p, const ConvexPiece& piece);
bool piece_contains(const ConvexPiece& piece, const Vector& p, double tol = kFeasTol);

/// Euclidean distance from p to the piece (0 when contained).
double piece_distance(const ConvexPiece& piece, const Vector& p);

/// Raised when an intersection that the algorithm guarantees nonempty has
/// no feasible candidate; signals a violated invariant, not expected input.
struct InfeasibleIntersection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact Euclidean projection onto the intersection of at most three
/// halfspaces by enumerating active subsets and solving each
/// equality-constrained least-distance system. Trivial halfspaces are
/// ignored. Throws InfeasibleIntersection when no candidate is feasible
/// within tol_feas.
Vector project_halfspaces_exact(const Vector& p, const std::vector<Halfspace>& hs,
                                double tol_feas = kFeasTol);

/// Exact Euclidean projection onto the intersection of arbitrarily many
/// halfspaces via a dual active-set iteration (identity-Hessian
/// Goldfarb-Idnani). Immune to the near-parallel conditioning that makes
/// alternating projections crawl. Throws InfeasibleIntersection when the
/// constraints are inconsistent.
Vector project_polyhedron_active_set(const Vector& p, const std::vector<Halfspace>& hs,
                                     double tol_feas = kFeasTol);

struct DykstraResult {
  Vector point;
  int sweeps = 0;
  bool converged = false;
  double max_violation = 0.0;  // worst piece distance at the returned point
};

/// Dykstra's alternating projection scheme onto an intersection of convex
/// pieces. Converges to the projection of p (not merely a feasible point).
/// On sweep exhaustion the best iterate is returned with converged=false.
DykstraResult project_intersection_dykstra(const Vector& p,
                                           const std::vector<ConvexPiece>& pieces,
                                           double tol = 1e-10,
                                           int max_sweeps = kDykstraMaxSweeps);

DykstraResult project_polyhedron_dykstra(const Vector& p, const std::vector<Halfspace>& hs,
                                         double tol = 1e-10,
                                         int max_sweeps = kDykstraMaxSweeps);

/// Dykstra over arbitrary exact projectors; the violation measure is the
/// distance moved by each projector at the current point.
DykstraResult project_intersection_dykstra(
    const Vector& p, const std::vector<std::function<Vector(const Vector&)>>& projectors,
    double tol = 1e-10, int max_sweeps = kDykstraMaxSweeps);

/// Exact projection onto {z : <a, z> >= lower} ∩ {||z - center|| <= radius}.
/// Handles the tangential case (lens degenerating to a point), which defeats
/// alternating projections. Throws InfeasibleIntersection when the slab and
/// ball genuinely miss each other.
Vector project_halfplane_ball(const Vector& p, const Vector& a, double lower,
                              const Vector& center, double radius);

/// Exact projection onto box ∩ ball when the ball's center lies in the box:
/// the KKT system reduces to clamp(center + (p - center)/(1 + t)) with a
/// scalar t >= 0 found by bisection on the norm constraint.
Vector project_box_ball(const Vector& p, const Box& box, const Vector& center, double radius);

}  // namespace vqem

#endif
