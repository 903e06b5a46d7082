#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "upress/system.hpp"

using namespace upress;

namespace {

SystemSpec linear2() { return SystemSpec::linear_toral(); }
SystemSpec rot3() { return SystemSpec::linear_times_rotation(0.33); }
SystemSpec pert3(double eps = 0.05) { return SystemSpec::perturbed_times_rotation(0.33, eps); }

double angle_between(Vec2 a, Vec2 b) {
  const double c = std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0);
  return std::acos(std::fabs(c));  // direction fields are defined up to sign
}

}  // namespace

TEST_CASE("apply: fixed point and hand-computed images") {
  const SystemSpec sys = linear2();
  const TorusPoint origin = apply(sys, TorusPoint::wrapped2(0, 0));
  CHECK(origin[0] == 0.0);
  CHECK(origin[1] == 0.0);

  const TorusPoint p = apply(sys, TorusPoint::wrapped2(0.5, 0.5));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-15));

  const SystemSpec rot = SystemSpec::linear_times_rotation(0.25);
  const TorusPoint q = apply(rot, TorusPoint::wrapped3(0, 0, 0));
  CHECK(q[0] == 0.0);
  CHECK(q[1] == 0.0);
  CHECK(q[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("inverse: integer inverse matrix and zero-perturbation reduction") {
  const SystemSpec sys = linear2();
  const TorusPoint z = inverse(sys, TorusPoint::wrapped2(0, 0));
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  // [[1,-1],[-1,2]] applied to (0.5, 0) gives (0.5, -0.5) -> (0.5, 0.5) mod 1
  const TorusPoint x = inverse(sys, TorusPoint::wrapped2(0.5, 0.0));
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-14));

  const SystemSpec p0 = SystemSpec::perturbed_times_rotation(0.33, 0.0);
  SplitMix64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const TorusPoint y = testref::random_point(rng, 3);
    const TorusPoint a = inverse(p0, y);
    const TorusPoint b = inverse(rot3(), y);
    CHECK(torus_distance(a, b) < 1e-14);
  }
}

TEST_CASE("apply then inverse is the identity on random points, all families") {
  SplitMix64 rng(20240601);
  for (const SystemSpec& sys : {linear2(), rot3(), pert3()}) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const TorusPoint x = testref::random_point(rng, sys.dim());
      const TorusPoint back = inverse(sys, apply(sys, x));
      for (int k = 0; k < sys.dim(); ++k)
        worst = std::max(worst, circle_distance(back[k], x[k]));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("derivative: constant Jacobians and the perturbed fiber block") {
  const SquareMatrix J2 = derivative(linear2(), TorusPoint::wrapped2(0.3, 0.7));
  CHECK(J2(0, 0) == 2.0);
  CHECK(J2(0, 1) == 1.0);
  CHECK(J2(1, 0) == 1.0);
  CHECK(J2(1, 1) == 1.0);

  const SquareMatrix J3 = derivative(rot3(), TorusPoint::wrapped3(0.1, 0.2, 0.9));
  CHECK(J3(2, 2) == 1.0);
  CHECK(J3(0, 2) == 0.0);
  CHECK(J3(2, 0) == 0.0);

  const double eps = 0.05;
  const SystemSpec pert = pert3(eps);
  const SquareMatrix Jp = derivative(pert, TorusPoint::wrapped3(0, 0, 0));
  CHECK(Jp(0, 0) == doctest::Approx(2.0 + eps).epsilon(1e-14));
  CHECK(Jp(1, 1) == doctest::Approx(1.0 + eps).epsilon(1e-14));
  CHECK(Jp(0, 1) == 1.0);
}

TEST_CASE("derivative matches central finite differences of the lifted map") {
  const SystemSpec pert = pert3();
  SplitMix64 rng(7);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 p{rng.next_unit(), rng.next_unit()};
    const Mat2 J = pert.fiber_jacobian_lift(p);
    for (int col = 0; col < 2; ++col) {
      Vec2 lo = p, hi = p;
      (col == 0 ? lo[0] : lo[1]) -= h;
      (col == 0 ? hi[0] : hi[1]) += h;
      const Vec2 diff = 0.5 / h * (pert.fiber_apply_lift(hi) - pert.fiber_apply_lift(lo));
      const double j0 = col == 0 ? J.a : J.b;
      const double j1 = col == 0 ? J.c : J.d;
      CHECK(std::fabs(diff[0] - j0) / std::max(1.0, std::fabs(j0)) < 1e-6);
      CHECK(std::fabs(diff[1] - j1) / std::max(1.0, std::fabs(j1)) < 1e-6);
    }
  }
}

TEST_CASE("unstable_direction: exact eigendirection for linear fibers") {
  const SystemSpec sys = linear2();
  const auto v = unstable_direction(sys, TorusPoint::wrapped2(0.2, 0.8));
  // eigendirection of [[2,1],[1,1]] for (3+sqrt5)/2 is parallel to (1, (sqrt5-1)/2)
  const double slope = 0.5 * (std::sqrt(5.0) - 1.0);
  CHECK(v[1] / v[0] == doctest::Approx(slope).epsilon(1e-14));
  CHECK(std::hypot(v[0], v[1]) == doctest::Approx(1.0).epsilon(1e-14));

  const auto v1 = unstable_direction(sys, TorusPoint::wrapped2(0.2, 0.8), 1);
  const auto v50 = unstable_direction(sys, TorusPoint::wrapped2(0.2, 0.8), 50);
  CHECK(std::fabs(v1[0] - v50[0]) < 1e-12);
  CHECK(std::fabs(v1[1] - v50[1]) < 1e-12);
}

TEST_CASE("unstable_direction: perturbed field stays near the linear one and is equivariant") {
  const SystemSpec pert = pert3();
  const Vec2 vu = pert.unstable_eigendirection();
  SplitMix64 rng(99);
  double worst_angle = 0.0, worst_resid = 0.0;
  for (int i = 0; i < 40; ++i) {
    const TorusPoint x = testref::random_point(rng, 3);
    const auto vx = unstable_direction(pert, x);
    const Vec2 v{vx[0], vx[1]};
    worst_angle = std::max(worst_angle, angle_between(v, vu));

    const auto vfx = unstable_direction(pert, apply(pert, x));
    const Vec2 w = pert.fiber_jacobian_lift(x.fiber()) * v;
    worst_resid = std::max(worst_resid, angle_between(w, {vfx[0], vfx[1]}));
  }
  CHECK(worst_angle < 0.1);
  CHECK(worst_resid < 1e-6);
}

TEST_CASE("unstable_direction: equivariance residuals across families") {
  SplitMix64 rng(123);
  for (const SystemSpec& sys : {linear2(), rot3()}) {
    for (int i = 0; i < 25; ++i) {
      const TorusPoint x = testref::random_point(rng, sys.dim());
      const auto vx = unstable_direction(sys, x);
      const auto vfx = unstable_direction(sys, apply(sys, x));
      const Vec2 w = sys.fiber_jacobian_lift(x.fiber()) * Vec2{vx[0], vx[1]};
      CHECK(angle_between(w, {vfx[0], vfx[1]}) < 1e-6);
    }
  }
  const SystemSpec pert = pert3(0.12);
  for (int i = 0; i < 25; ++i) {
    const TorusPoint x = testref::random_point(rng, 3);
    const auto vx = unstable_direction(pert, x);
    const auto vfx = unstable_direction(pert, apply(pert, x));
    const Vec2 w = pert.fiber_jacobian_lift(x.fiber()) * Vec2{vx[0], vx[1]};
    CHECK(angle_between(w, {vfx[0], vfx[1]}) < 1e-4);
  }
}

TEST_CASE("expansion_factor: Perron value on linear families, uniform expansion in general") {
  CHECK(expansion_factor(linear2(), TorusPoint::wrapped2(0.4, 0.9)) ==
        doctest::Approx(testref::lambda_u()).epsilon(1e-13));
  CHECK(expansion_factor(rot3(), TorusPoint::wrapped3(0.4, 0.9, 0.1)) ==
        doctest::Approx(testref::lambda_u()).epsilon(1e-13));
  CHECK(expansion_factor(SystemSpec::perturbed_times_rotation(0.33, 0.0),
                         TorusPoint::wrapped3(0.4, 0.9, 0.1)) ==
        doctest::Approx(testref::lambda_u()).epsilon(1e-13));

  const SystemSpec pert = pert3();
  SplitMix64 rng(5);
  for (int i = 0; i < 50; ++i)
    CHECK(expansion_factor(pert, testref::random_point(rng, 3)) > 1.0);
}

TEST_CASE("construction rejects invalid specs") {
  CHECK_THROWS_AS(SystemSpec::linear_toral({1, 0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SystemSpec::linear_toral({2, 0, 0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SystemSpec::linear_toral({0, 1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SystemSpec::perturbed_times_rotation(0.33, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(SystemSpec::perturbed_times_rotation(0.33, -0.01), std::invalid_argument);
  CHECK_NOTHROW(SystemSpec::perturbed_times_rotation(0.33, 0.15));
  // orientation-reversing hyperbolic matrices are allowed
  CHECK_NOTHROW(SystemSpec::linear_toral({1, 1, 1, 0}));
}

TEST_CASE("wrapped coordinates always land in [0, 1)") {
  CHECK(wrap_unit(1.0) == 0.0);
  CHECK(wrap_unit(-1e-18) < 1.0);
  CHECK(wrap_unit(-1e-18) >= 0.0);
  CHECK(wrap_unit(-0.25) == 0.75);
  CHECK(wrap_unit(17.25) == doctest::Approx(0.25).epsilon(1e-15));
  const TorusPoint p = TorusPoint::wrapped3(2.5, -0.5, 1.0 - 1e-17);
  for (int i = 0; i < 3; ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] < 1.0);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(apply(linear2(), TorusPoint::wrapped3(0, 0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(inverse(rot3(), TorusPoint::wrapped2(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(unstable_direction(linear2(), TorusPoint::wrapped2(0, 0), 0),
                  std::invalid_argument);
}
