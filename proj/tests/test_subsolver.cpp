#include <doctest.h>

#include "vqem/instances.hpp"
#include "vqem/oracle.hpp"
#include "vqem/rng.hpp"
#include "vqem/subsolver.hpp"

using namespace vqem;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Scalar variational-inequality toy: m = 1, f(x, y) = <x, y - x> on the
// constant feasible set [0,1]^2.
Problem make_toy_vi() {
  Problem prob;
  prob.n = 2;
  prob.m = 1;
  prob.name = "toy-vi";
  prob.bounds = Box{Vector::Zero(2), Vector::Ones(2)};
  prob.K = {prob.bounds};
  prob.f.eval = [](const Vector& x, const Vector& y) {
    Vector out(1);
    out[0] = x.dot(y - x);
    return out;
  };
  prob.f.subgrad_y = [](const Vector& x, const Vector&, int) { return x; };
  const Box box = prob.bounds;
  prob.T.contains = [box](const Vector&, const Vector& y, double tol) { return box.contains(y, tol); };
  prob.T.project = [box](const Vector&, const Vector& p) { return project_box(p, box); };
  return prob;
}

Problem make_zero_bifunction() {
  Problem prob = make_toy_vi();
  prob.name = "zero";
  prob.f.eval = [](const Vector&, const Vector&) { return Vector::Zero(1); };
  prob.f.subgrad_y = [](const Vector&, const Vector&, int) { return Vector::Zero(2); };
  return prob;
}

SubproblemSpec default_spec(const Problem& prob, Vector x, Vector base) {
  return SubproblemSpec(std::move(x), std::move(base), 1.0, InteriorDirection::ones(prob.m),
                        DualWeight::uniform(prob.m));
}

}  // namespace

TEST_SUITE("subsolver") {

TEST_CASE("prox of a linear objective on the unit box") {
  const Problem prob = make_toy_vi();
  const auto spec = default_spec(prob, vec2(1, 1), vec2(1, 1));
  const auto res = solve_subproblem(prob, spec);
  REQUIRE(res.converged);

  // Independent dense grid at step 1e-3 over [0,1]^2.
  double best = std::numeric_limits<double>::infinity();
  Vector arg;
  for (double a = 0.0; a <= 1.0 + 1e-12; a += 1e-3) {
    for (double b = 0.0; b <= 1.0 + 1e-12; b += 1e-3) {
      const Vector y = vec2(a, b);
      const double v = scalarized_objective(prob, spec, y);
      if (v < best) {
        best = v;
        arg = y;
      }
    }
  }
  CHECK((arg - vec2(0.5, 0.5)).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK((res.z - vec2(0.5, 0.5)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((res.z - arg).cwiseAbs().maxCoeff() <= 2e-3);
}

TEST_CASE("prox of the zero bifunction is the feasible projection") {
  const Problem prob = make_zero_bifunction();

  const auto interior = solve_subproblem(prob, default_spec(prob, vec2(0.25, 0.75), vec2(0, 0)));
  CHECK((interior.z - vec2(0.25, 0.75)).cwiseAbs().maxCoeff() <= 1e-8);

  const auto outside = solve_subproblem(prob, default_spec(prob, vec2(3, -1), vec2(0, 0)));
  CHECK((outside.z - vec2(1, 0)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("known solution of the two-objective family is its own prox point") {
  const Problem prob = make_ab(1.0, 1.0, 1.0);
  const auto spec = default_spec(prob, vec2(1, 1), vec2(1, 1));
  const auto res = solve_subproblem(prob, spec);
  REQUIRE(res.converged);
  CHECK((res.z - vec2(1, 1)).cwiseAbs().maxCoeff() <= 1e-6);

  const Vector grid = brute_force_subproblem(prob, spec, 2e-4);
  CHECK((grid - vec2(1, 1)).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("objective never exceeds the warm start value") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const Problem prob = make_ab(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10));
    const Vector base = vec2(rng.uniform(-10, 10), rng.uniform(1, 10));
    const Vector x = prob.T.project(base, vec2(rng.uniform(-10, 10), rng.uniform(1, 10)));
    const auto spec = default_spec(prob, x, base);
    const auto res = solve_subproblem(prob, spec);
    const Vector warm = prob.T.project(base, x);
    CHECK(scalarized_objective(prob, spec, res.z) <=
          scalarized_objective(prob, spec, warm) + 1e-10);
  }
}

TEST_CASE("optimality inequality holds against sampled feasible points") {
  const Problem prob = make_ab(2.0, 1.0, 3.0);
  const Vector base = vec2(-3, 2);
  const Vector x = prob.T.project(base, base);
  const auto spec = default_spec(prob, x, base);
  const auto res = solve_subproblem(prob, spec);
  REQUIRE(res.converged);

  Rng rng(77);
  for (int s = 0; s < 100; ++s) {
    const Vector draw = vec2(rng.uniform(-10, 10), rng.uniform(1, 10));
    const Vector y = prob.T.project(base, draw);
    CHECK(subproblem_optimality_gap(prob, spec, res.z, y) <= 1e-5);
  }
}

TEST_CASE("agrees with the grid oracle on random two-dimensional specs") {
  Rng rng(4242);
  for (int t = 0; t < 10; ++t) {
    const Problem prob = make_ab(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100));
    const Vector base = vec2(rng.uniform(-10, 10), rng.uniform(1, 10));
    const Vector x = prob.T.project(base, vec2(rng.uniform(-10, 10), rng.uniform(1, 10)));
    const auto spec = default_spec(prob, x, base);
    const auto res = solve_subproblem(prob, spec);
    const Vector grid = brute_force_subproblem(prob, spec, 2e-4);
    CHECK((res.z - grid).cwiseAbs().maxCoeff() <= 1e-3);
  }
}

TEST_CASE("spec validation") {
  const Problem prob = make_toy_vi();
  CHECK_THROWS_AS(SubproblemSpec(vec2(0, 0), vec2(0, 0), -1.0, InteriorDirection::ones(1),
                                 DualWeight::uniform(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SubproblemSpec(vec2(0, 0), vec2(0, 0), 1.0, InteriorDirection::ones(2),
                                 DualWeight::uniform(1)),
                  std::invalid_argument);
  (void)prob;
}

}  // TEST_SUITE
