#include "vqem/instances.hpp"

#include <cmath>
#include <fstream>

#include "vqem/rng.hpp"

namespace vqem {

namespace {

Box box_from(Vector lo, Vector hi) { return Box{std::move(lo), std::move(hi)}; }

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  Matrix out(rows, j.at(0).size());
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (row.size() != static_cast<std::size_t>(out.cols())) {
      throw std::invalid_argument("instance json: ragged matrix");
    }
    for (std::size_t c = 0; c < row.size(); ++c) out(r, c) = row.at(c).get<double>();
  }
  return out;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out[i] = j.at(i).get<double>();
  return out;
}

}  // namespace

Problem make_ab(double a, double b, double c) {
  if (a < 0.0 || b < 0.0 || c < 0.0) throw std::invalid_argument("make_ab: parameters must be >= 0");

  Problem prob;
  prob.n = 2;
  prob.m = 2;
  prob.name = "ab";
  Vector lo(2), hi(2);
  lo << -10.0, 1.0;
  hi << 10.0, 10.0;
  prob.bounds = box_from(lo, hi);
  prob.K = {prob.bounds};

  const Box kbox = prob.bounds;
  const auto coef1 = [a, kbox](const Vector& x) {
    // Clamping the factor's argument to K keeps the first component convex
    // in y wherever it happens to be evaluated; on K this is the plain
    // factor a (x1^2 + x2).
    const Vector xc = project_box(x, kbox);
    return a * (xc[0] * xc[0] + xc[1]);
  };

  prob.f.eval = [a, b, c, coef1](const Vector& x, const Vector& y) {
    Vector out(2);
    out[0] = coef1(x) * (y.squaredNorm() - x.squaredNorm());
    out[1] = b * x[0] * x[0] * (y[0] - x[0]) + c * x[1] * (y[1] - x[1]);
    return out;
  };
  prob.f.subgrad_y = [b, c, coef1](const Vector& x, const Vector& y, int i) {
    Vector g(2);
    if (i == 0) {
      g = coef1(x) * 2.0 * y;
    } else {
      g[0] = b * x[0] * x[0];
      g[1] = c * x[1];
    }
    return g;
  };

  prob.T = piecewise_constraint_map([kbox](const Vector& x) {
    Vector n(2);
    n << -1.0, -1.0;
    const double bound = std::max(x[0] + x[1], 2.0);
    return std::vector<ConvexPiece>{kbox, Halfspace{n, -bound}};
  });
  return prob;
}

Problem make_bimat(const BimatData& data) {
  const std::size_t m = data.A.size();
  if (m == 0 || data.B.size() != m || data.c.size() != m) {
    throw std::invalid_argument("make_bimat: need matching A, B, c families");
  }
  const Eigen::Index n = data.A[0].rows();
  for (std::size_t i = 0; i < m; ++i) {
    if (data.A[i].rows() != n || data.A[i].cols() != n || data.B[i].rows() != n ||
        data.B[i].cols() != n || data.c[i].size() != n) {
      throw std::invalid_argument("make_bimat: inconsistent dimensions");
    }
    const Matrix sym = 0.5 * (data.B[i] + data.B[i].transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("make_bimat: B_" + std::to_string(i + 1) +
                                  " is not positive semidefinite");
    }
  }
  if (data.box.size() != n) throw std::invalid_argument("make_bimat: box radii size mismatch");
  if (data.box.minCoeff() <= 0.0) throw std::invalid_argument("make_bimat: box radii must be positive");
  if (!(data.d1 <= data.d2 && data.d2 <= data.box.sum())) {
    throw std::invalid_argument("make_bimat: need d1 <= d2 <= sum of box radii");
  }

  Problem prob;
  prob.n = static_cast<int>(n);
  prob.m = static_cast<int>(m);
  prob.name = "bimat";
  prob.bounds = box_from(-data.box, data.box);
  prob.K = {prob.bounds};

  auto shared = std::make_shared<BimatData>(data);
  prob.f.eval = [shared](const Vector& x, const Vector& y) {
    const std::size_t mm = shared->A.size();
    Vector out(mm);
    for (std::size_t i = 0; i < mm; ++i) {
      out[i] = (shared->A[i] * x + shared->B[i] * y + shared->c[i]).dot(y - x);
    }
    return out;
  };
  prob.f.subgrad_y = [shared](const Vector& x, const Vector& y, int i) {
    return Vector(shared->A[i] * x + shared->c[i] + shared->B[i] * y +
                  shared->B[i].transpose() * (y - x));
  };

  // The sum bound and the norm ball can touch tangentially (on the diagonal
  // the feasible set shrinks to a point), which starves alternating
  // projections; the plane-ball pair therefore projects in closed form and
  // only the box alternates against it.
  const Box kbox = prob.bounds;
  const double d1 = data.d1, d2 = data.d2;
  prob.T.contains = [kbox, d1, d2](const Vector& x, const Vector& y, double tol) {
    if (!kbox.contains(y, tol)) return false;
    if (y.sum() < std::max(x.sum(), d1) - tol * std::sqrt(static_cast<double>(y.size()))) return false;
    return y.norm() <= std::max(x.norm(), d2) + tol;
  };
  prob.T.project = [kbox, d1, d2](const Vector& x, const Vector& p) {
    const Eigen::Index dim = p.size();
    const Vector ones = Vector::Ones(dim);
    const double lower = std::max(x.sum(), d1);
    const double radius = std::max(x.norm(), d2);
    const Vector origin = Vector::Zero(dim);
    std::vector<std::function<Vector(const Vector&)>> projectors{
        [kbox](const Vector& q) { return project_box(q, kbox); },
        [ones, lower, origin, radius](const Vector& q) {
          return project_halfplane_ball(q, ones, lower, origin, radius);
        }};
    auto res = project_intersection_dykstra(p, projectors, 1e-11);
    if (!res.converged) {
      throw ProjectionFailure("bimat constraint projection did not converge (violation " +
                              std::to_string(res.max_violation) + ")");
    }
    return res.point;
  };
  return prob;
}

BimatData bimat_paper_data() {
  BimatData d;
  Matrix A1(3, 3), B1(3, 3), A2(3, 3), B2(3, 3);
  A1 << -1, 3, 0, -3, -2, 0, 0, 0, -3;
  B1 << 1, 0, -2, 0, 2, 0, 2, 0, 3;
  A2 << -5, -1, 2, 1, -3, 0, -2, 0, -2;
  B2 << 3, -2, 1, 2, 1, 3, -1, -3, 2;
  d.A = {A1, A2};
  d.B = {B1, B2};
  d.c = {Vector::Zero(3), Vector::Zero(3)};
  d.box = Vector::Constant(3, 10.0);
  d.d1 = 1.0;
  d.d2 = 3.0;
  return d;
}

Problem make_truncated_l2(int n, double cap) {
  if (n < 4) throw std::invalid_argument("make_truncated_l2: n must be at least 4");
  if (cap < 4.0) throw std::invalid_argument("make_truncated_l2: cap must cover the solutions");

  Problem prob;
  prob.n = n;
  prob.m = 3;
  prob.name = "l2trunc";
  prob.bounds = box_from(Vector::Zero(n), Vector::Constant(n, cap));
  prob.K = {prob.bounds};

  const auto displacement = [n](const Vector& x) {
    // x - A(x) with A(x) = (x1^2+x1-9, 3x2-5, x3^3+x3-8, -x4, ...).
    Vector d(n);
    d[0] = 9.0 - x[0] * x[0];
    d[1] = 5.0 - 2.0 * x[1];
    d[2] = 8.0 - x[2] * x[2] * x[2];
    for (int i = 3; i < n; ++i) d[i] = 2.0 * x[i];
    return d;
  };
  const auto factors = [](const Vector& x) {
    Vector phi(3);
    phi[0] = 3.0 * x[0] * x[1] + 1.0;
    phi[1] = x[2] * x[2] + x[1] + 2.0;
    phi[2] = 7.0 * x[1] * x[1] + 4.0 * x[0] * x[2] + 1.0;
    return phi;
  };

  prob.f.eval = [displacement, factors](const Vector& x, const Vector& y) {
    return Vector(((y - x).dot(displacement(x))) * factors(x));
  };
  prob.f.subgrad_y = [displacement, factors](const Vector& x, const Vector& y, int i) {
    (void)y;
    return Vector(factors(x)[i] * displacement(x));
  };

  const Box kbox = prob.bounds;
  prob.T.contains = [kbox](const Vector& x, const Vector& y, double tol) {
    return kbox.contains(y, tol) && y.norm() <= x.norm() + tol;
  };
  prob.T.project = [kbox](const Vector& x, const Vector& p) {
    return project_box_ball(p, kbox, Vector::Zero(p.size()), x.norm());
  };
  return prob;
}

Vector truncated_l2_solution(int n) {
  Vector s = Vector::Zero(n);
  s[0] = 3.0;
  s[1] = 2.5;
  s[2] = 2.0;
  return s;
}

Problem make_gnep(const GnepSpec& spec) {
  const int players = static_cast<int>(spec.dims.size());
  if (players < 1) throw std::invalid_argument("make_gnep: need at least one player");
  int total = 0;
  std::vector<int> offsets(players, 0);
  for (int i = 0; i < players; ++i) {
    if (spec.dims[i] < 1) throw std::invalid_argument("make_gnep: bad block size");
    offsets[i] = total;
    total += spec.dims[i];
  }
  if (spec.box_lo.size() != total || spec.box_hi.size() != total) {
    throw std::invalid_argument("make_gnep: strategy box size mismatch");
  }
  const int areas = static_cast<int>(spec.costs.size());
  if (areas < 1) throw std::invalid_argument("make_gnep: need at least one area");
  for (const auto& area : spec.costs) {
    if (static_cast<int>(area.size()) != players) {
      throw std::invalid_argument("make_gnep: cost family size mismatch");
    }
  }
  if (!spec.block_sets.empty() && static_cast<int>(spec.block_sets.size()) != players) {
    throw std::invalid_argument("make_gnep: block constraint count mismatch");
  }

  Problem prob;
  prob.n = total;
  prob.m = areas;
  prob.name = "gnep";
  prob.bounds = box_from(spec.box_lo, spec.box_hi);
  prob.K = {prob.bounds};

  auto sp = std::make_shared<GnepSpec>(spec);
  auto off = std::make_shared<std::vector<int>>(offsets);

  prob.f.eval = [sp, off, players](const Vector& x, const Vector& y) {
    const int areas_n = static_cast<int>(sp->costs.size());
    Vector out = Vector::Zero(areas_n);
    Vector profile = x;
    for (int i = 0; i < players; ++i) {
      const int o = (*off)[i], d = sp->dims[i];
      profile.segment(o, d) = y.segment(o, d);
      for (int j = 0; j < areas_n; ++j) {
        out[j] += sp->costs[j][i].value(profile) - sp->costs[j][i].value(x);
      }
      profile.segment(o, d) = x.segment(o, d);
    }
    return out;
  };
  prob.f.subgrad_y = [sp, off, players](const Vector& x, const Vector& y, int j) {
    Vector g(x.size());
    Vector profile = x;
    for (int i = 0; i < players; ++i) {
      const int o = (*off)[i], d = sp->dims[i];
      profile.segment(o, d) = y.segment(o, d);
      g.segment(o, d) = sp->costs[j][i].grad_own(profile);
      profile.segment(o, d) = x.segment(o, d);
    }
    return g;
  };

  const Box kbox = prob.bounds;
  if (spec.block_sets.empty()) {
    prob.T.contains = [kbox](const Vector&, const Vector& y, double tol) {
      return kbox.contains(y, tol);
    };
    prob.T.project = [kbox](const Vector&, const Vector& p) { return project_box(p, kbox); };
  } else {
    prob.T.contains = [sp, off, players, kbox](const Vector& x, const Vector& y, double tol) {
      if (!kbox.contains(y, tol)) return false;
      for (int i = 0; i < players; ++i) {
        if (!sp->block_sets[i]) continue;
        const Vector yi = y.segment((*off)[i], sp->dims[i]);
        for (const auto& piece : sp->block_sets[i](x)) {
          if (!piece_contains(piece, yi, tol)) return false;
        }
      }
      return true;
    };
    prob.T.project = [sp, off, players, kbox](const Vector& x, const Vector& p) {
      Vector out = p;
      for (int i = 0; i < players; ++i) {
        const int o = (*off)[i], d = sp->dims[i];
        std::vector<ConvexPiece> pieces{Box{kbox.lo.segment(o, d), kbox.hi.segment(o, d)}};
        if (sp->block_sets[i]) {
          for (auto& piece : sp->block_sets[i](x)) pieces.push_back(std::move(piece));
        }
        auto res = project_intersection_dykstra(p.segment(o, d), pieces);
        if (!res.converged) throw ProjectionFailure("gnep block projection did not converge");
        out.segment(o, d) = res.point;
      }
      return out;
    };
    // The strategy map must keep the current profile feasible for itself.
    Rng rng(0x6e7a1c3b2f9d4e55ULL);
    for (int t = 0; t < 16; ++t) {
      Vector x(total);
      for (int i = 0; i < total; ++i) x[i] = rng.uniform(spec.box_lo[i], spec.box_hi[i]);
      if (!prob.T.contains(x, x, 1e-9)) {
        throw std::invalid_argument("make_gnep: block constraints exclude the current profile");
      }
    }
  }
  return prob;
}

Problem instance_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (type == "ab") {
    return make_ab(params.value("a", 1.0), params.value("b", 1.0), params.value("c", 1.0));
  }
  if (type == "bimat") {
    BimatData d;
    for (const auto& mj : params.at("A")) d.A.push_back(matrix_from_json(mj));
    for (const auto& mj : params.at("B")) d.B.push_back(matrix_from_json(mj));
    for (const auto& vj : params.at("c")) d.c.push_back(vector_from_json(vj));
    d.box = vector_from_json(params.at("a"));
    d.d1 = params.at("d1").get<double>();
    d.d2 = params.at("d2").get<double>();
    return make_bimat(d);
  }
  if (type == "l2trunc") {
    return make_truncated_l2(params.value("n", 6), params.value("cap", 5.0));
  }
  if (type == "gnep") {
    // Data-driven form: quadratic costs on the full profile and the plain
    // strategy box as T(x). Profile-dependent block constraints need the
    // builder API.
    GnepSpec spec;
    spec.dims = params.at("dims").get<std::vector<int>>();
    spec.box_lo = vector_from_json(params.at("box_lo"));
    spec.box_hi = vector_from_json(params.at("box_hi"));
    std::vector<int> offsets;
    int total = 0;
    for (int dimi : spec.dims) {
      offsets.push_back(total);
      total += dimi;
    }
    std::size_t player = 0;
    for (const auto& area : params.at("payoffs")) {
      std::vector<PlayerCost> family;
      player = 0;
      for (const auto& pj : area) {
        if (player >= spec.dims.size()) throw std::invalid_argument("instance json: payoff count");
        const Matrix Q = matrix_from_json(pj.at("Q"));
        const Vector q = vector_from_json(pj.at("q"));
        const double c0 = pj.value("c0", 0.0);
        const int o = offsets[player], d = spec.dims[player];
        family.push_back(PlayerCost{
            [Q, q, c0](const Vector& x) { return 0.5 * x.dot(Q * x) + q.dot(x) + c0; },
            [Q, q, o, d](const Vector& x) {
              return Vector((0.5 * (Q + Q.transpose()) * x + q).segment(o, d));
            }});
        ++player;
      }
      spec.costs.push_back(std::move(family));
    }
    return make_gnep(spec);
  }
  throw std::invalid_argument("instance json: unknown type '" + type + "'");
}

Problem load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

Problem make_builtin(const std::string& name) {
  if (name == "ab") return make_ab(1.0, 1.0, 1.0);
  if (name == "bimat-paper") return make_bimat(bimat_paper_data());
  if (name == "l2trunc") return make_truncated_l2(6);
  if (name == "gnep-demo") {
    GnepSpec spec;
    spec.dims = {1, 1};
    spec.box_lo = Vector::Constant(2, -10.0);
    spec.box_hi = Vector::Constant(2, 10.0);
    PlayerCost p1{[](const Vector& x) { return (x[0] - 1.0) * (x[0] - 1.0); },
                  [](const Vector& x) { return Vector::Constant(1, 2.0 * (x[0] - 1.0)); }};
    PlayerCost p2{[](const Vector& x) { return (x[1] - 2.0) * (x[1] - 2.0); },
                  [](const Vector& x) { return Vector::Constant(1, 2.0 * (x[1] - 2.0)); }};
    spec.costs = {{p1, p2}};
    return make_gnep(spec);
  }
  throw std::invalid_argument("unknown builtin instance '" + name + "'");
}

std::vector<std::string> builtin_names() { return {"ab", "bimat-paper", "l2trunc", "gnep-demo"}; }

}  // namespace vqem
