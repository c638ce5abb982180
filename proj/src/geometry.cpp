#include "vqem/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vqem {

namespace {

void check_same_dim(const Vector& x, const Vector& y, const char* where) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
}

}  // namespace

double BregmanGeometry::distance(const Vector& x, const Vector& y) const {
  return bregman_distance(x, y);
}

double bregman_distance(const Vector& x, const Vector& y) {
  check_same_dim(x, y, "bregman_distance");
  return (x - y).squaredNorm();
}

double Halfspace::distance(const Vector& z) const {
  const double s = slack(z);
  if (s <= 0.0) return 0.0;
  const double nn = normal.norm();
  if (nn == 0.0) return 0.0;  // trivial halfspace is the whole space
  return s / nn;
}

bool Box::contains(const Vector& z, double tol) const {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] < lo[i] - tol || z[i] > hi[i] + tol) return false;
  }
  return true;
}

bool Ball::contains(const Vector& z, double tol) const {
  return (z - center).norm() <= radius + tol;
}

Vector project_halfspace(const Vector& p, const Halfspace& h) {
  check_same_dim(p, h.normal, "project_halfspace");
  const double nn = h.normal.squaredNorm();
  if (nn <= 0.0) throw std::invalid_argument("project_halfspace: zero normal");
  const double s = h.slack(p);
  if (s <= 0.0) return p;
  return p - (s / nn) * h.normal;
}

Vector project_box(const Vector& p, const Vector& lo, const Vector& hi) {
  check_same_dim(p, lo, "project_box");
  check_same_dim(p, hi, "project_box");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (lo[i] > hi[i]) throw std::invalid_argument("project_box: lo > hi");
  }
  return p.cwiseMax(lo).cwiseMin(hi);
}

Vector project_box(const Vector& p, const Box& box) { return project_box(p, box.lo, box.hi); }

Vector project_ball(const Vector& p, const Ball& ball) {
  check_same_dim(p, ball.center, "project_ball");
  const Vector d = p - ball.center;
  const double nd = d.norm();
  if (nd <= ball.radius) return p;
  if (nd == 0.0) return ball.center;
  return ball.center + (ball.radius / nd) * d;
}

Vector project_piece(const Vector& p, const ConvexPiece& piece) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return project_box(p, s);
        else if constexpr (std::is_same_v<T, Halfspace>) return s.trivial() ? p : project_halfspace(p, s);
        else return project_ball(p, s);
      },
      piece);
}

bool piece_contains(const ConvexPiece& piece, const Vector& p, double tol) {
  return std::visit([&](const auto& s) { return s.contains(p, tol); }, piece);
}

double piece_distance(const ConvexPiece& piece, const Vector& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return s.distance(p);
        } else if constexpr (std::is_same_v<T, Box>) {
          return (p - project_box(p, s)).norm();
        } else {
          return std::max(0.0, (p - s.center).norm() - s.radius);
        }
      },
      piece);
}

Vector project_halfspaces_exact(const Vector& p, const std::vector<Halfspace>& hs,
                                double tol_feas) {
  // Normalized rows: the active-subset Gram systems otherwise mix normal
  // scales and lose the answer to conditioning.
  std::vector<Halfspace> active;
  for (const auto& h : hs) {
    if (h.trivial()) continue;
    check_same_dim(p, h.normal, "project_halfspaces_exact");
    const double nn = h.normal.norm();
    active.push_back(Halfspace{h.normal / nn, h.offset / nn});
  }
  const int r = static_cast<int>(active.size());
  if (r == 0) return p;
  if (r > 3) throw std::invalid_argument("project_halfspaces_exact: more than 3 halfspaces");

  const auto feasible = [&](const Vector& q) {
    for (const auto& h : active) {
      if (h.distance(q) > tol_feas) return false;
    }
    return true;
  };

  bool found = false;
  double best_dist = 0.0;
  Vector best;

  // Enumerate active subsets; for subset S the candidate is the closest
  // point with <a_i, q> = b_i for i in S, i.e. q = p + A^T lambda with
  // (A A^T) lambda = b - A p.
  for (int mask = 0; mask < (1 << r); ++mask) {
    Vector q;
    if (mask == 0) {
      q = p;
    } else {
      std::vector<int> idx;
      for (int i = 0; i < r; ++i) {
        if (mask & (1 << i)) idx.push_back(i);
      }
      const int k = static_cast<int>(idx.size());
      Matrix A(k, p.size());
      Vector rhs(k);
      for (int i = 0; i < k; ++i) {
        A.row(i) = active[idx[i]].normal.transpose();
        rhs[i] = active[idx[i]].offset - active[idx[i]].normal.dot(p);
      }
      const Matrix G = A * A.transpose();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
      const Vector lambda = cod.solve(rhs);
      // Rank-deficient subsets (parallel normals) are kept only when the
      // equality system is consistent.
      const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
      if ((G * lambda - rhs).cwiseAbs().maxCoeff() > 1e-8 * scale) continue;
      q = p + A.transpose() * lambda;
    }
    if (!feasible(q)) continue;
    const double d = (q - p).squaredNorm();
    if (!found || d < best_dist) {
      found = true;
      best_dist = d;
      best = q;
    }
  }
  if (!found) {
    throw InfeasibleIntersection("project_halfspaces_exact: no feasible candidate within tolerance");
  }
  return best;
}

Vector project_polyhedron_active_set(const Vector& p, const std::vector<Halfspace>& hs,
                                     double tol_feas) {
  const Eigen::Index n = p.size();

  // Normalized rows so slacks are geometric distances.
  std::vector<Vector> normals;
  std::vector<double> offsets;
  for (const auto& h : hs) {
    if (h.trivial()) continue;
    check_same_dim(p, h.normal, "project_polyhedron_active_set");
    const double nn = h.normal.norm();
    normals.push_back(h.normal / nn);
    offsets.push_back(h.offset / nn);
  }
  const int rows = static_cast<int>(normals.size());
  if (rows == 0) return p;

  Vector w = p;
  std::vector<int> active;
  std::vector<double> mult;

  const auto active_matrix = [&]() {
    Matrix A(active.size(), n);
    for (std::size_t i = 0; i < active.size(); ++i) A.row(i) = normals[active[i]].transpose();
    return A;
  };

  const long iteration_cap = 50L * rows + 200;
  for (long iter = 0; iter < iteration_cap; ++iter) {
    int p_idx = -1;
    double worst = tol_feas;
    for (int i = 0; i < rows; ++i) {
      const double s = normals[i].dot(w) - offsets[i];
      if (s > worst) {
        worst = s;
        p_idx = i;
      }
    }
    if (p_idx < 0) return w;

    const Vector& np = normals[p_idx];
    double u_new = 0.0;
    for (long inner = 0; inner < iteration_cap; ++inner) {
      Vector z = np;
      Vector r;
      if (!active.empty()) {
        const Matrix A = active_matrix();
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A * A.transpose());
        r = cod.solve(A * np);
        z = np - A.transpose() * r;
      }
      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (r.size() > 0 && r[j] > 1e-13) {
          const double cand = mult[j] / r[j];
          if (cand < t1) {
            t1 = cand;
            drop = static_cast<int>(j);
          }
        }
      }
      const double zn = z.dot(np);
      const double slack = np.dot(w) - offsets[p_idx];
      const double t2 = (zn > 1e-13) ? slack / zn : std::numeric_limits<double>::infinity();
      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        throw InfeasibleIntersection(
            "project_polyhedron_active_set: inconsistent constraints");
      }
      const double t = std::min(t1, t2);
      w -= t * z;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (r.size() > 0) mult[j] -= t * r[j];
      }
      u_new += t;
      if (t == t2 && t2 <= t1) {
        active.push_back(p_idx);
        mult.push_back(u_new);
        break;
      }
      active.erase(active.begin() + drop);
      mult.erase(mult.begin() + drop);
    }
  }
  throw InfeasibleIntersection(
      "project_polyhedron_active_set: iteration cap exceeded (degenerate constraint data)");
}

DykstraResult project_intersection_dykstra(const Vector& p,
                                           const std::vector<ConvexPiece>& pieces,
                                           double tol, int max_sweeps) {
  DykstraResult out;
  if (pieces.empty()) {
    out.point = p;
    out.converged = true;
    return out;
  }
  if (pieces.size() == 1) {
    out.point = project_piece(p, pieces.front());
    out.sweeps = 1;
    out.converged = true;
    return out;
  }

  const std::size_t r = pieces.size();
  Vector x = p;
  std::vector<Vector> increments(r, Vector::Zero(p.size()));

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const Vector x_prev = x;
    for (std::size_t i = 0; i < r; ++i) {
      const Vector y = x + increments[i];
      const Vector xn = project_piece(y, pieces[i]);
      increments[i] = y - xn;
      x = xn;
    }
    out.sweeps = sweep;
    double viol = 0.0;
    for (const auto& piece : pieces) viol = std::max(viol, piece_distance(piece, x));
    const double move = (x - x_prev).norm();
    if (viol <= tol && move <= tol) {
      out.converged = true;
      out.max_violation = viol;
      out.point = x;
      return out;
    }
  }
  double viol = 0.0;
  for (const auto& piece : pieces) viol = std::max(viol, piece_distance(piece, x));
  out.max_violation = viol;
  out.point = x;
  return out;
}

DykstraResult project_polyhedron_dykstra(const Vector& p, const std::vector<Halfspace>& hs,
                                         double tol, int max_sweeps) {
  std::vector<ConvexPiece> pieces;
  pieces.reserve(hs.size());
  for (const auto& h : hs) {
    if (!h.trivial()) pieces.emplace_back(h);
  }
  return project_intersection_dykstra(p, pieces, tol, max_sweeps);
}

DykstraResult project_intersection_dykstra(
    const Vector& p, const std::vector<std::function<Vector(const Vector&)>>& projectors,
    double tol, int max_sweeps) {
  DykstraResult out;
  if (projectors.empty()) {
    out.point = p;
    out.converged = true;
    return out;
  }
  if (projectors.size() == 1) {
    out.point = projectors.front()(p);
    out.sweeps = 1;
    out.converged = true;
    return out;
  }
  const std::size_t r = projectors.size();
  Vector x = p;
  std::vector<Vector> increments(r, Vector::Zero(p.size()));
  const auto violation_at = [&](const Vector& q) {
    double viol = 0.0;
    for (const auto& proj : projectors) viol = std::max(viol, (q - proj(q)).norm());
    return viol;
  };
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const Vector x_prev = x;
    for (std::size_t i = 0; i < r; ++i) {
      const Vector y = x + increments[i];
      const Vector xn = projectors[i](y);
      increments[i] = y - xn;
      x = xn;
    }
    out.sweeps = sweep;
    const double move = (x - x_prev).norm();
    if (move <= tol) {
      const double viol = violation_at(x);
      if (viol <= tol) {
        out.converged = true;
        out.max_violation = viol;
        out.point = x;
        return out;
      }
    }
  }
  out.max_violation = violation_at(x);
  out.point = x;
  return out;
}

Vector project_halfplane_ball(const Vector& p, const Vector& a, double lower,
                              const Vector& center, double radius) {
  check_same_dim(p, a, "project_halfplane_ball");
  check_same_dim(p, center, "project_halfplane_ball");
  const double an = a.norm();
  if (an <= 0.0) throw std::invalid_argument("project_halfplane_ball: zero normal");
  if (radius < 0.0) throw std::invalid_argument("project_halfplane_ball: negative radius");

  // Signed margin of the ball's deepest point past the plane; negative means
  // the slab misses the ball.
  const double reach = a.dot(center) + radius * an - lower;
  if (reach < -1e-9 * std::max(1.0, an)) {
    throw InfeasibleIntersection("project_halfplane_ball: plane does not meet the ball");
  }
  if (reach <= 0.0) return center + (radius / an) * a;  // tangency point

  const auto plane_ok = [&](const Vector& q) { return a.dot(q) >= lower - 1e-12 * an; };
  const auto ball_ok = [&](const Vector& q) { return (q - center).norm() <= radius + 1e-12; };

  bool found = false;
  double best = 0.0;
  Vector arg;
  const auto consider = [&](const Vector& q) {
    if (!plane_ok(q) || !ball_ok(q)) return;
    const double d = (q - p).squaredNorm();
    if (!found || d < best) {
      found = true;
      best = d;
      arg = q;
    }
  };

  consider(p);
  consider(project_ball(p, Ball{center, radius}));
  consider(p + ((lower - a.dot(p)) / (an * an)) * a);

  // Projection onto the sphere-plane circle.
  const double h = (lower - a.dot(center)) / an;  // signed plane distance from center
  if (std::abs(h) <= radius) {
    const Vector circle_center = center + (h / an) * a;
    const double circle_radius = std::sqrt(std::max(0.0, radius * radius - h * h));
    Vector dir = p - circle_center;
    dir -= (a.dot(dir) / (an * an)) * a;
    double dn = dir.norm();
    if (dn <= 1e-15) {
      // p sits on the circle's axis; any circle point is equally close.
      for (Eigen::Index i = 0; i < p.size() && dn <= 1e-12; ++i) {
        dir.setZero();
        dir[i] = 1.0;
        dir -= (a.dot(dir) / (an * an)) * a;
        dn = dir.norm();
      }
    }
    if (dn > 1e-15) consider(circle_center + (circle_radius / dn) * dir);
  }
  if (!found) {
    throw InfeasibleIntersection("project_halfplane_ball: no feasible candidate");
  }
  return arg;
}

Vector project_box_ball(const Vector& p, const Box& box, const Vector& center, double radius) {
  check_same_dim(p, box.lo, "project_box_ball");
  check_same_dim(p, center, "project_box_ball");
  if (radius < 0.0) throw std::invalid_argument("project_box_ball: negative radius");
  if (!box.contains(center, 1e-12)) {
    throw std::invalid_argument("project_box_ball: ball center outside the box");
  }
  const auto clamp_scaled = [&](double t) {
    return Vector(project_box(center + (p - center) / (1.0 + t), box));
  };
  Vector q = clamp_scaled(0.0);
  double dist = (q - center).norm();
  if (dist <= radius) return q;
  // (q(t) - center).norm() decreases monotonically to 0; bisect on t.
  double lo = 0.0, hi = 1.0;
  while ((clamp_scaled(hi) - center).norm() > radius && hi < 1e18) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((clamp_scaled(mid) - center).norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  return clamp_scaled(hi);
}

}  // namespace vqem
