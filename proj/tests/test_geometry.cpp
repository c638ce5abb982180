#include <doctest.h>

#include "vqem/geometry.hpp"
#include "vqem/rng.hpp"

using namespace vqem;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Dense-grid least-distance oracle over one halfspace: scans a window around
// p and returns the best feasible distance found.
double grid_min_distance(const Vector& p, const Halfspace& h, double step) {
  double best = std::numeric_limits<double>::infinity();
  for (double a = p[0] - 4.0; a <= p[0] + 4.0; a += step) {
    for (double b = p[1] - 4.0; b <= p[1] + 4.0; b += step) {
      const Vector q = vec2(a, b);
      if (h.slack(q) <= 1e-12) best = std::min(best, (q - p).norm());
    }
  }
  return best;
}

Vector random_vec(Rng& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// Nonempty random halfspace collection: every set contains the anchor.
std::vector<Halfspace> random_halfspaces(Rng& rng, int n, int count, const Vector& anchor) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < count; ++i) {
    Vector a = random_vec(rng, n, -1.0, 1.0);
    if (a.norm() < 1e-3) a[0] += 1.0;
    hs.push_back(Halfspace{a, a.dot(anchor) + rng.uniform(0.0, 1.5)});
  }
  return hs;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("bregman distance matches the squared euclidean distance") {
  CHECK(bregman_distance(vec2(1, 2), vec2(1, 2)) == doctest::Approx(0.0));
  CHECK(bregman_distance(vec2(3, 4), vec2(0, 0)) == doctest::Approx(25.0));
  CHECK(bregman_distance(vec2(1, 0), vec2(0, 1)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(bregman_distance(vec2(1, 2), vec3(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("bregman distance agrees with the defining formula") {
  BregmanGeometry geom;
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Vector x = random_vec(rng, 3, -5, 5);
    const Vector y = random_vec(rng, 3, -5, 5);
    const double by_identity = geom.distance(x, y);
    const double by_definition = geom.value(x) - geom.value(y) - (x - y).dot(geom.gradient(y));
    CHECK(by_identity == doctest::Approx(by_definition).epsilon(1e-12));
    CHECK(by_identity >= 0.0);
    if (t == 0) CHECK(geom.distance(x, x) == 0.0);
    // Symmetric in this geometry.
    CHECK(geom.distance(y, x) == doctest::Approx(by_identity));
  }
}

TEST_CASE("halfspace projection") {
  const Halfspace h{vec2(1, 1), 1.0};
  CHECK((project_halfspace(vec2(0, 0), h) - vec2(0, 0)).norm() == doctest::Approx(0.0));

  const Vector q = project_halfspace(vec2(2, 0), h);
  CHECK(q[0] == doctest::Approx(1.5));
  CHECK(q[1] == doctest::Approx(-0.5));
  // Grid oracle: no feasible point is closer.
  const double oracle = grid_min_distance(vec2(2, 0), h, 0.01);
  CHECK((q - vec2(2, 0)).norm() <= oracle + 1e-9);
  CHECK(h.contains(q, 1e-12));

  const Halfspace h2{vec2(0, 1), 1.0};
  const Vector q2 = project_halfspace(vec2(0, 5), h2);
  CHECK(q2[0] == doctest::Approx(0.0));
  CHECK(q2[1] == doctest::Approx(1.0));
  CHECK((q2 - vec2(0, 5)).norm() <= grid_min_distance(vec2(0, 5), h2, 0.01) + 1e-9);

  CHECK_THROWS_AS(project_halfspace(vec2(1, 1), Halfspace{vec2(0, 0), 1.0}),
                  std::invalid_argument);
}

TEST_CASE("box projection clamps componentwise") {
  const Vector p = vec3(15, -12, 3);
  const Vector q = project_box(p, Vector::Constant(3, -10.0), Vector::Constant(3, 10.0));
  CHECK(q == vec3(10, -10, 3));

  const Vector inside = vec3(1, 2, 3);
  CHECK(project_box(inside, Vector::Constant(3, -10.0), Vector::Constant(3, 10.0)) == inside);

  Vector lo(2), hi(2);
  lo << -10, 1;
  hi << 10, 10;
  CHECK(project_box(vec2(0, 0.5), lo, hi) == vec2(0, 1));
  CHECK_THROWS_AS(project_box(vec2(0, 0), vec2(1, 1), vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("exact projection onto up to three halfspaces") {
  const std::vector<Halfspace> two{{vec2(1, 0), 1.0}, {vec2(0, 1), 1.0}};
  // Dykstra to 1e-10 is the oracle for the frozen value (1,1).
  const auto oracle = project_polyhedron_dykstra(vec2(2, 2), two, 1e-12, 100000);
  REQUIRE(oracle.converged);
  CHECK((oracle.point - vec2(1, 1)).norm() <= 1e-8);

  const Vector q = project_halfspaces_exact(vec2(2, 2), two);
  CHECK((q - vec2(1, 1)).norm() <= 1e-12);

  const std::vector<Halfspace> three{{vec2(1, 0), 1.0}, {vec2(0, 1), 1.0}, {vec2(1, 1), 3.0}};
  const Vector q3 = project_halfspaces_exact(vec2(2, 2), three);
  CHECK((q3 - vec2(1, 1)).norm() <= 1e-12);

  CHECK(project_halfspaces_exact(vec2(0, 0), {{vec2(1, 0), 1.0}}) == vec2(0, 0));

  // Trivial halfspaces are ignored.
  const std::vector<Halfspace> with_trivial{{vec2(0, 0), 0.0}, {vec2(1, 0), 1.0}};
  CHECK((project_halfspaces_exact(vec2(3, 0), with_trivial) - vec2(1, 0)).norm() <= 1e-12);

  CHECK_THROWS_AS(
      project_halfspaces_exact(vec2(0, 0), {{vec2(1, 0), 0.0}, {vec2(-1, 0), -1.0}}),
      InfeasibleIntersection);
}

TEST_CASE("dykstra projection onto a polyhedron") {
  const auto redundant =
      project_polyhedron_dykstra(vec2(3, 0), {{vec2(1, 0), 1.0}, {vec2(1, 0), 2.0}});
  REQUIRE(redundant.converged);
  CHECK((redundant.point - vec2(1, 0)).norm() <= 1e-8);

  const auto interior = project_polyhedron_dykstra(vec2(0.2, 0.3), {{vec2(1, 0), 1.0}});
  CHECK((interior.point - vec2(0.2, 0.3)).norm() == doctest::Approx(0.0));

  const auto corner = project_polyhedron_dykstra(vec2(2, 2), {{vec2(1, 0), 1.0}, {vec2(0, 1), 1.0}});
  REQUIRE(corner.converged);
  CHECK((corner.point - vec2(1, 1)).norm() <= 1e-8);

  // Non-convergence reports the best iterate with the flag cleared.
  const auto stalled =
      project_polyhedron_dykstra(vec2(50, 50), {{vec2(1, 0.001), 1.0}, {vec2(0.001, 1), 1.0}}, 1e-14, 2);
  CHECK_FALSE(stalled.converged);
}

TEST_CASE("dykstra agrees with the exact projection on random instances") {
  Rng rng(2024);
  for (int t = 0; t < 120; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 3);
    const Vector anchor = random_vec(rng, n, -2, 2);
    const int count = 1 + static_cast<int>(rng.next() % 3);
    const auto hs = random_halfspaces(rng, n, count, anchor);
    const Vector p = random_vec(rng, n, -4, 4);
    const Vector exact = project_halfspaces_exact(p, hs);
    const auto dyk = project_polyhedron_dykstra(p, hs, 1e-11, 200000);
    REQUIRE(dyk.converged);
    CHECK((dyk.point - exact).norm() <= 1e-8);
  }
}

TEST_CASE("projections satisfy the variational characterization and idempotence") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 2);
    const Vector anchor = random_vec(rng, n, -2, 2);
    const auto hs = random_halfspaces(rng, n, 1 + static_cast<int>(rng.next() % 3), anchor);
    const Vector p = random_vec(rng, n, -5, 5);
    const Vector q = project_halfspaces_exact(p, hs);

    // <z - q, g'(p) - g'(q)> <= tol for feasible z; anchor is feasible, and
    // so are blends of it with q.
    const Vector gdiff = bregman_gradient(p) - bregman_gradient(q);
    for (int s = 0; s < 10; ++s) {
      const double t01 = rng.uniform01();
      const Vector z = t01 * anchor + (1.0 - t01) * q;
      CHECK((z - q).dot(gdiff) <= 1e-9);
    }
    CHECK((project_halfspaces_exact(q, hs) - q).norm() <= 1e-9);
  }
}

TEST_CASE("ball projection") {
  const Ball ball{vec2(1, 1), 2.0};
  CHECK(project_ball(vec2(1.5, 1.0), ball) == vec2(1.5, 1.0));
  const Vector q = project_ball(vec2(5, 1), ball);
  CHECK(q[0] == doctest::Approx(3.0));
  CHECK(q[1] == doctest::Approx(1.0));
  CHECK(project_ball(vec2(7, 7), Ball{vec2(7, 7), 0.0}) == vec2(7, 7));
}

TEST_CASE("piece distance is a euclidean distance") {
  const Halfspace h{vec2(3, 4), 5.0};  // normalized distance uses ||a|| = 5
  CHECK(piece_distance(ConvexPiece{h}, vec2(3, 4)) == doctest::Approx((25.0 - 5.0) / 5.0));
  const Box box{vec2(0, 0), vec2(1, 1)};
  CHECK(piece_distance(ConvexPiece{box}, vec2(2, 0.5)) == doctest::Approx(1.0));
  CHECK(piece_distance(ConvexPiece{Ball{vec2(0, 0), 1.0}}, vec2(0, 3)) == doctest::Approx(2.0));
}

}  // TEST_SUITE
