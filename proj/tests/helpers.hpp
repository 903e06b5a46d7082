// Shared test fixtures: reference constants and independent brute-force
// oracles (grid greedy sets, finite differences, direct orbit iteration).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "upress/leaf.hpp"
#include "upress/pressure.hpp"
#include "upress/rng.hpp"
#include "upress/system.hpp"

namespace testref {

using namespace upress;  // Vec2 is std::array, so ADL alone misses its operators

// Perron data of [[2,1],[1,1]], from the characteristic polynomial.
inline double lambda_u() { return 0.5 * (3.0 + std::sqrt(5.0)); }
inline double lambda_s() { return 0.5 * (3.0 - std::sqrt(5.0)); }
inline double log_lambda_u() { return std::log(lambda_u()); }
inline double golden_ratio() { return 0.5 * (1.0 + std::sqrt(5.0)); }

inline TorusPoint random_point(SplitMix64& rng, int dim) {
  if (dim == 2) return TorusPoint::wrapped2(rng.next_unit(), rng.next_unit());
  return TorusPoint::wrapped3(rng.next_unit(), rng.next_unit(), rng.next_unit());
}

/// Greedy maximal separated subset of a uniform parameter grid, using an
/// arbitrary distance callable. Independent of the production sweep.
inline std::vector<double> grid_greedy_separated(
    double delta, int grid_points, double eps,
    const std::function<double(double, double)>& dist) {
  std::vector<double> out;
  double last = 0.0;
  for (int i = 0; i <= grid_points; ++i) {
    const double s = -delta + 2.0 * delta * i / grid_points;
    if (out.empty() || dist(last, s) >= eps * (1.0 - 1e-9)) {
      out.push_back(s);
      last = s;
    }
  }
  return out;
}

/// Greedy cover of a uniform parameter grid by eps-balls of the distance.
inline std::vector<double> grid_greedy_spanning(
    double delta, int grid_points, double eps,
    const std::function<double(double, double)>& dist) {
  std::vector<double> centers;
  const auto param = [&](int i) { return -delta + 2.0 * delta * i / grid_points; };
  int frontier = 0;
  while (frontier <= grid_points) {
    int c = frontier;
    while (c + 1 <= grid_points && dist(param(frontier), param(c + 1)) <= eps * (1.0 + 5e-4)) ++c;
    centers.push_back(param(c));
    int next = c + 1;
    while (next <= grid_points && dist(param(c), param(next)) <= eps * (1.0 + 5e-4)) ++next;
    frontier = next;
  }
  return centers;
}

/// d^u_n on a linear-fiber system by direct two-point lift iteration.
inline double dun_direct_linear(const SystemSpec& system, const LeafSegment& leaf,
                                double s1, double s2, int n) {
  Vec2 a = leaf.point_at(s1);
  Vec2 b = leaf.point_at(s2);
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    best = std::max(best, norm(a - b));
    a = system.fiber_apply_lift(a);
    b = system.fiber_apply_lift(b);
  }
  return best;
}

}  // namespace testref
