#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "upress/leaf.hpp"

using namespace upress;

namespace {

const SystemSpec kLin = SystemSpec::linear_toral();
const SystemSpec kRot = SystemSpec::linear_times_rotation(0.33);
SystemSpec pert(double eps = 0.05) { return SystemSpec::perturbed_times_rotation(0.33, eps); }

}  // namespace

TEST_CASE("linear leaves are straight unstable segments with exact endpoints") {
  const TorusPoint base = TorusPoint::wrapped2(0.0, 0.0);
  const LeafSegment leaf = trace_leaf(kLin, base, 0.2, 1e-3);
  CHECK(leaf.s.front() == -0.2);
  CHECK(leaf.s.back() == 0.2);
  CHECK(leaf.s[leaf.center_index()] == 0.0);

  const Vec2 vu = kLin.unstable_eigendirection();
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const double q = (rng.next_unit() * 2.0 - 1.0) * 0.2;
    const Vec2 p = leaf.point_at(q);
    CHECK(p[0] == doctest::Approx(q * vu[0]).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(q * vu[1]).epsilon(1e-12));
  }
  for (std::size_t i = 1; i < leaf.s.size(); ++i)
    CHECK(leaf.s[i] - leaf.s[i - 1] <= 1e-3 * (1 + 1e-12));

  CHECK(du_distance(leaf, 0.0, 0.2) == 0.2);
  CHECK(du_distance(leaf, 0.0, -0.2) == 0.2);
}

TEST_CASE("du_distance basics and range checks") {
  const LeafSegment leaf = trace_leaf(kLin, TorusPoint::wrapped2(0.3, 0.6), 0.2, 1e-3);
  CHECK(du_distance(leaf, 0.07, 0.07) == 0.0);
  CHECK(du_distance(leaf, -0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(du_distance(leaf, -0.3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(trace_leaf(kLin, TorusPoint::wrapped2(0, 0), 0.5, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_leaf(kLin, TorusPoint::wrapped2(0, 0), 0.2, 0.0),
                  std::invalid_argument);
}

TEST_CASE("dun_distance: closed form for linear fibers") {
  const LeafSegment leaf = trace_leaf(kRot, TorusPoint::wrapped3(0.2, 0.5, 0.1), 0.2, 1e-3);
  const double lambda = testref::lambda_u();
  const double sigma = 0.05;
  for (int n = 1; n <= 10; ++n) {
    const double expected = sigma * std::pow(lambda, n - 1);
    if (expected >= 0.5) break;
    const double got = dun_distance(kRot, leaf, -0.025, 0.025, n);
    CHECK(std::fabs(got - expected) / expected < 1e-10);
  }
  // single term reduces to the leaf metric
  CHECK(dun_distance(kRot, leaf, -0.1, 0.06, 1) ==
        doctest::Approx(du_distance(leaf, -0.1, 0.06)).epsilon(1e-15));
}

TEST_CASE("dun_distance: monotone in n and cross-checked by direct iteration") {
  const LeafSegment leaf = trace_leaf(kRot, TorusPoint::wrapped3(0.4, 0.8, 0.3), 0.2, 1e-3);
  SplitMix64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const double s1 = (rng.next_unit() * 2.0 - 1.0) * 0.2;
    const double s2 = (rng.next_unit() * 2.0 - 1.0) * 0.2;
    double prev = 0.0;
    for (int n = 1; n <= 6; ++n) {
      const double d = dun_distance(kRot, leaf, s1, s2, n);
      CHECK(d >= prev - 1e-15);
      prev = d;
    }
    CHECK(dun_distance(kRot, leaf, s1, s2, 3) ==
          doctest::Approx(testref::dun_direct_linear(kRot, leaf, s1, s2, 3)).epsilon(1e-12));
  }
}

TEST_CASE("dun_distance is a metric on sampled parameters") {
  const LeafSegment leaf = trace_leaf(kRot, TorusPoint::wrapped3(0.1, 0.9, 0.4), 0.15, 1e-3);
  SplitMix64 rng(18);
  for (int i = 0; i < 40; ++i) {
    const double a = (rng.next_unit() * 2.0 - 1.0) * 0.15;
    const double b = (rng.next_unit() * 2.0 - 1.0) * 0.15;
    const double c = (rng.next_unit() * 2.0 - 1.0) * 0.15;
    const int n = 1 + static_cast<int>(rng.next_u64() % 5);
    const double dab = dun_distance(kRot, leaf, a, b, n);
    const double dba = dun_distance(kRot, leaf, b, a, n);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-12));
    CHECK(dun_distance(kRot, leaf, a, a, n) == 0.0);
    if (a != b) CHECK(dab > 0.0);
    const double dac = dun_distance(kRot, leaf, a, c, n);
    const double dcb = dun_distance(kRot, leaf, c, b, n);
    CHECK(dab <= dac + dcb + 1e-12);
  }
}

TEST_CASE("ambient and leaf metrics are uniformly comparable on small disks") {
  // d <= d^u <= C d with a modest C at this radius
  for (const SystemSpec& sys : {SystemSpec::linear_toral(), pert()}) {
    const TorusPoint base = sys.dim() == 2 ? TorusPoint::wrapped2(0.37, 0.62)
                                           : TorusPoint::wrapped3(0.37, 0.62, 0.25);
    const LeafSegment leaf = trace_leaf(sys, base, 0.2, 1e-3);
    SplitMix64 rng(19);
    double worst_ratio = 1.0;
    for (int i = 0; i < 300; ++i) {
      const double s1 = (rng.next_unit() * 2.0 - 1.0) * 0.2;
      const double s2 = (rng.next_unit() * 2.0 - 1.0) * 0.2;
      if (std::fabs(s1 - s2) < 1e-6) continue;
      const double du = du_distance(leaf, s1, s2);
      const double d = torus_distance(leaf.torus_point_at(s1), leaf.torus_point_at(s2));
      CHECK(d <= du * (1.0 + 1e-9));
      worst_ratio = std::max(worst_ratio, du / d);
    }
    CHECK(worst_ratio < 1.2);
  }
}

TEST_CASE("perturbed leaves: anchored at the base with bounded sample spacing") {
  const SystemSpec sys = pert();
  const TorusPoint base = TorusPoint::wrapped3(0.21, 0.43, 0.68);
  const LeafSegment leaf = trace_leaf(sys, base, 0.2, 1e-3);

  CHECK(leaf.s.front() == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(leaf.s.back() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(leaf.s[leaf.center_index()] == 0.0);
  CHECK(torus_distance(leaf.torus_point_at(0.0), base) < 1e-6);
  for (std::size_t i = 1; i < leaf.s.size(); ++i) {
    CHECK(leaf.s[i] > leaf.s[i - 1]);
    CHECK(leaf.s[i] - leaf.s[i - 1] <= 1e-3 * (1 + 1e-9));
  }
  // theta is constant along the leaf
  CHECK(leaf.torus_point_at(0.13)[2] == doctest::Approx(0.68).epsilon(1e-12));
}

TEST_CASE("perturbed leaves contract backward toward the base orbit") {
  const SystemSpec sys = pert();
  const TorusPoint base = TorusPoint::wrapped3(0.81, 0.17, 0.33);
  const LeafSegment leaf = trace_leaf(sys, base, 0.2, 1e-3);
  for (const double s : {-0.2, -0.11, 0.045, 0.13, 0.2}) {
    TorusPoint y = leaf.torus_point_at(s);
    TorusPoint x = base;
    for (int k = 1; k <= 10; ++k) {
      y = inverse(sys, y);
      x = inverse(sys, x);
      CHECK(torus_distance(y, x) <= std::pow(0.62, k));
    }
  }
}

TEST_CASE("perturbed dun_distance stays close to the linear closed form") {
  const SystemSpec sys = pert();
  const LeafSegment leaf = trace_leaf(sys, TorusPoint::wrapped3(0.5, 0.25, 0.1), 0.1, 1e-3);
  const double lambda = testref::lambda_u();
  for (int n = 2; n <= 5; ++n) {
    const double expected = 0.04 * std::pow(lambda, n - 1);
    const double got = dun_distance(sys, leaf, -0.02, 0.02, n);
    CHECK(std::fabs(got - expected) / expected < 0.1);
  }
}
