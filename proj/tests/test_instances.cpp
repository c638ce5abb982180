#include <doctest.h>

#include <fstream>

#include "vqem/instances.hpp"
#include "vqem/oracle.hpp"
#include "vqem/rng.hpp"

using namespace vqem;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector random_in(const Box& box, Rng& rng) {
  Vector v(box.lo.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(box.lo[i], box.hi[i]);
  return v;
}

// Shared property battery: exact B1, midpoint convexity in y, and analytic
// gradients against central differences.
void check_bifunction_contracts(const Problem& prob, std::uint64_t seed, int b1_points = 1000,
                                int grad_points = 100) {
  Rng rng(seed);
  for (int t = 0; t < b1_points; ++t) {
    const Vector x = random_in(prob.bounds, rng);
    CHECK(prob.f.eval(x, x).cwiseAbs().maxCoeff() == 0.0);

    const Vector y = random_in(prob.bounds, rng);
    const Vector z = random_in(prob.bounds, rng);
    const Vector mid = prob.f.eval(x, 0.5 * (y + z));
    const Vector avg = 0.5 * (prob.f.eval(x, y) + prob.f.eval(x, z));
    CHECK((mid - avg).maxCoeff() <= 1e-9);
  }

  auto fd = finite_difference_subgrad(prob.f.eval);
  for (int t = 0; t < grad_points; ++t) {
    const Vector x = random_in(prob.bounds, rng);
    const Vector y = random_in(prob.bounds, rng);
    for (int i = 0; i < prob.m; ++i) {
      const Vector g = prob.f.subgrad_y(x, y, i);
      const Vector g_fd = fd(x, y, i);
      const double scale = std::max(1.0, g_fd.norm());
      CHECK((g - g_fd).norm() / scale <= 1e-4);

      // Subgradient inequality at a random second point.
      const Vector yp = random_in(prob.bounds, rng);
      const double lhs = prob.f.eval(x, yp)[i];
      const double rhs = prob.f.eval(x, y)[i] + g.dot(yp - y);
      CHECK(lhs >= rhs - 1e-7);
    }
  }
}

}  // namespace

TEST_SUITE("instances") {

TEST_CASE("two-objective family evaluates as written") {
  const Problem prob = make_ab(1, 1, 1);
  CHECK(prob.f.eval(vec2(1, 1), vec2(1, 1)).cwiseAbs().maxCoeff() == 0.0);
  const Vector f = prob.f.eval(vec2(1, 1), vec2(2, 0));
  CHECK(f[0] == doctest::Approx(4.0));   // a * 2 * (4 - 2)
  CHECK(f[1] == doctest::Approx(0.0));   // b - c
  const Problem scaled = make_ab(2, 3, 5);
  const Vector g = scaled.f.eval(vec2(1, 1), vec2(2, 0));
  CHECK(g[0] == doctest::Approx(8.0));
  CHECK(g[1] == doctest::Approx(-2.0));

  // The solution is a fixed point of its constraint set.
  CHECK(prob.T.contains(vec2(1, 1), vec2(1, 1), 1e-12));
  CHECK_THROWS_AS(make_ab(-1, 0, 0), std::invalid_argument);
}

TEST_CASE("two-objective family satisfies the model contracts") {
  check_bifunction_contracts(make_ab(1, 1, 1), 101);
  check_bifunction_contracts(make_ab(87.3, 0.4, 55.0), 102, 300, 40);
}

TEST_CASE("bilinear-quadratic family matches hand arithmetic") {
  const Problem prob = make_bimat(bimat_paper_data());
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  const Vector f = prob.f.eval(Vector::Zero(3), e1);
  CHECK(f[0] == doctest::Approx(1.0));  // <B1 e1, e1>
  CHECK(f[1] == doctest::Approx(3.0));  // <B2 e1, e1>
  check_bifunction_contracts(prob, 103, 300, 40);
}

TEST_CASE("non positive semidefinite quadratic parts are rejected") {
  BimatData d = bimat_paper_data();
  d.B[0](0, 0) = -5.0;
  CHECK_THROWS_AS(make_bimat(d), std::invalid_argument);

  BimatData bad_d = bimat_paper_data();
  bad_d.d1 = 50.0;  // d1 > d2
  CHECK_THROWS_AS(make_bimat(bad_d), std::invalid_argument);
}

TEST_CASE("sequence-space truncation vanishes at its closed-form solution") {
  const Problem prob = make_truncated_l2(6);
  const Vector xs = truncated_l2_solution(6);
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const Vector y = random_in(prob.bounds, rng);
    CHECK(prob.f.eval(xs, y).cwiseAbs().maxCoeff() <= 1e-12);
  }
  check_bifunction_contracts(prob, 104, 300, 40);

  const auto cert = vqep_residual(prob, xs, 4000, 9);
  CHECK(cert.primal_residual >= -1e-9);
  CHECK(cert.fix_distance <= 1e-9);

  CHECK_THROWS_AS(make_truncated_l2(3), std::invalid_argument);
}

TEST_CASE("nash builder: separable quadratic costs solve independently") {
  const Problem prob = make_builtin("gnep-demo");
  CHECK(prob.n == 2);
  CHECK(prob.m == 1);
  check_bifunction_contracts(prob, 105, 300, 40);

  const auto cert = vqep_residual(prob, vec2(1, 2), 4000, 21);
  CHECK(cert.primal_residual >= -1e-9);
  CHECK(cert.fix_distance <= 1e-9);

  // A non-equilibrium profile is refuted.
  const auto bad = vqep_residual(prob, vec2(0, 0), 4000, 21);
  CHECK(bad.primal_residual < -1e-3);
}

TEST_CASE("nash builder: single player reduces to constrained minimization") {
  GnepSpec spec;
  spec.dims = {1};
  spec.box_lo = Vector::Constant(1, -10.0);
  spec.box_hi = Vector::Constant(1, 10.0);
  // Cost (x - 15)^2: the box clamps the unconstrained minimizer to 10.
  spec.costs = {{PlayerCost{[](const Vector& x) { return (x[0] - 15.0) * (x[0] - 15.0); },
                            [](const Vector& x) {
                              return Vector(Vector::Constant(1, 2.0 * (x[0] - 15.0)));
                            }}}};
  const Problem prob = make_gnep(spec);
  const auto cert = vqep_residual(prob, Vector::Constant(1, 10.0), 2000, 31);
  CHECK(cert.primal_residual >= -1e-9);
  CHECK(cert.fix_distance <= 1e-9);
}

TEST_CASE("nash builder validates block constraints against the profile") {
  GnepSpec spec;
  spec.dims = {1, 1};
  spec.box_lo = Vector::Constant(2, -1.0);
  spec.box_hi = Vector::Constant(2, 1.0);
  PlayerCost flat{[](const Vector&) { return 0.0; },
                  [](const Vector&) { return Vector::Zero(1); }};
  spec.costs = {{flat, flat}};
  spec.block_sets.resize(2);
  spec.block_sets[0] = [](const Vector& x) {
    // Excludes the current profile whenever x1 > 0.
    return std::vector<ConvexPiece>{Halfspace{Vector::Constant(1, 1.0), -std::abs(x[0])}};
  };
  CHECK_THROWS_AS(make_gnep(spec), std::invalid_argument);
}

TEST_CASE("instances load from json") {
  const auto j = nlohmann::json::parse(R"({"type":"ab","params":{"a":2,"b":3,"c":5}})");
  const Problem prob = instance_from_json(j);
  const Vector f = prob.f.eval(vec2(1, 1), vec2(2, 0));
  CHECK(f[0] == doctest::Approx(8.0));
  CHECK(f[1] == doctest::Approx(-2.0));

  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"type":"nope"})")),
                  std::invalid_argument);

  const auto gj = nlohmann::json::parse(R"({
    "type": "gnep",
    "params": {
      "dims": [1, 1],
      "box_lo": [-10, -10],
      "box_hi": [10, 10],
      "payoffs": [[
        {"Q": [[2, 0], [0, 0]], "q": [-2, 0]},
        {"Q": [[0, 0], [0, 2]], "q": [0, -4]}
      ]]
    }
  })");
  const Problem gnep = instance_from_json(gj);
  CHECK(gnep.n == 2);
  // Costs x1^2 - 2x1 and x2^2 - 4x2: equilibrium (1, 2).
  const auto cert = vqep_residual(gnep, vec2(1, 2), 2000, 17);
  CHECK(cert.primal_residual >= -1e-9);

  const auto bj = nlohmann::json::parse(R"({
    "type": "bimat",
    "params": {
      "A": [[[0]], [[0]]],
      "B": [[[1]], [[2]]],
      "c": [[0], [0]],
      "a": [5],
      "d1": 0,
      "d2": 1
    }
  })");
  const Problem b1 = instance_from_json(bj);
  CHECK(b1.n == 1);
  CHECK(b1.m == 2);

  const Problem l2 = instance_from_json(
      nlohmann::json::parse(R"({"type":"l2trunc","params":{"n":5}})"));
  CHECK(l2.n == 5);
}

TEST_CASE("builtins are all constructible") {
  for (const auto& name : builtin_names()) {
    const Problem prob = make_builtin(name);
    CHECK(prob.n >= 1);
    CHECK(prob.m >= 1);
  }
  CHECK_THROWS_AS(make_builtin("missing"), std::invalid_argument);
}

}  // TEST_SUITE
