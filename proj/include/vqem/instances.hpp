#ifndef VQEM_INSTANCES_HPP
#define VQEM_INSTANCES_HPP

#include <json.hpp>

#include "vqem/model.hpp"

namespace vqem {

/// Two-dimensional two-objective family on K = [-10,10] x [1,10] with the
/// moving constraint z1 + z2 >= max(x1 + x2, 2). For strictly positive
/// (a, b, c) the unique solution is (1, 1). The first component's convexity
/// in y needs a nonnegative leading factor, which holds on K; the factor is
/// evaluated at the K-clamped first argument so stray evaluations outside K
/// stay convex.
Problem make_ab(double a, double b, double c);

struct BimatData {
  std::vector<Matrix> A;  // m square matrices
  std::vector<Matrix> B;  // m positive semidefinite square matrices
  std::vector<Vector> c;  // m vectors
  Vector box;             // box radii: K = prod [-box_i, box_i]
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Multi-objective bilinear-quadratic family
///   f_i(x, y) = <A_i x + B_i y + c_i, y - x>
/// with the moving constraint sum(z) >= max(sum(x), d1), ||z|| <= max(||x||, d2).
/// Rejects non-PSD B_i (eigenvalue floor -1e-10 on the symmetric part).
Problem make_bimat(const BimatData& data);

/// The 3x3 two-objective data set used by the reference experiments.
BimatData bimat_paper_data();

/// Finite-dimensional truncation of a sequence-space example: m = 3,
///   f(x, y) = <y - x, x - A(x)> * (3 x1 x2 + 1, x3^2 + x2 + 2, 7 x2^2 + 4 x1 x3 + 1),
///   A(x) = (x1^2 + x1 - 9, 3 x2 - 5, x3^3 + x3 - 8, -x4, ..., -xn),
/// K = [0, cap]^n and T(x) = {u in K : ||u|| <= ||x||}. Known solutions are
/// truncated_l2_solution(n) and the origin; both lie inside the cap. The cap
/// keeps K bounded, and its default keeps |f| small enough on K that the
/// convexity identities hold to the absolute tolerances the test suites use
/// (the cubic terms reach ~1e13 at cap 100, drowning a 1e-9 slack in
/// rounding noise).
Problem make_truncated_l2(int n, double cap = 5.0);

/// (3, 2.5, 2, 0, ..., 0) in dimension n.
Vector truncated_l2_solution(int n);

/// One player's cost in one area: evaluated on the full strategy profile,
/// with the gradient taken in the player's own block.
struct PlayerCost {
  std::function<double(const Vector& x)> value;
  std::function<Vector(const Vector& x)> grad_own;
};

struct GnepSpec {
  std::vector<int> dims;  // block size per player
  Vector box_lo, box_hi;  // K as a product box over the full profile
  std::vector<std::vector<PlayerCost>> costs;  // [area][player]
  // Optional per-player strategy pieces in block coordinates, depending on
  // the full profile; empty means the player's box alone.
  std::vector<std::function<std::vector<ConvexPiece>(const Vector& x)>> block_sets;
};

/// Generalized Nash equilibrium as a vector quasi-equilibrium problem: area
/// j's bifunction component sums each player's cost change when that player
/// unilaterally switches to their block of y.
Problem make_gnep(const GnepSpec& spec);

/// Builds an instance from a JSON description {"type": ..., "params": {...}}.
/// Types: "ab", "bimat", "l2trunc", "gnep" (quadratic costs, box strategies).
Problem instance_from_json(const nlohmann::json& j);
Problem load_instance_file(const std::string& path);

/// Named builtin instances for the CLI: "ab" (a=b=c=1), "bimat-paper",
/// "l2trunc" (n=6), "gnep-demo".
Problem make_builtin(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace vqem

#endif
