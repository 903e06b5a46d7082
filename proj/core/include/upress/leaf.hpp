// Local unstable leaves W^u(x, delta): construction by backward-orbit
// push-forward, arclength parameterization, and the leaf metrics d^u, d^u_n.
#pragma once

#include <limits>
#include <vector>

#include "upress/system.hpp"

namespace upress {

/// A sampled arclength parameterization of W^u(x, delta). Sample fiber
/// coordinates live in a single lift chart around the base; theta is constant
/// along a leaf for the rotation-extended families.
struct LeafSegment {
  TorusPoint base;
  double delta = 0.0;
  double resolution = 0.0;
  int construction_depth = 0;
  int dim = 2;
  double theta = 0.0;  // meaningful when dim == 3

  std::vector<double> s;     // strictly increasing, s.front() = -delta, s.back() = +delta
  std::vector<Vec2> points;  // fiber lifts; same length as s

  /// Fiber lift at arclength parameter q (piecewise-linear interpolation).
  Vec2 point_at(double q) const;
  /// Same, with a segment-index hint for monotone sweeps.
  Vec2 point_at(double q, std::size_t& hint) const;
  TorusPoint torus_point_at(double q) const;
  /// Index of the sample at s = 0 (the base point).
  std::size_t center_index() const { return center_; }

  std::size_t center_ = 0;
};

/// Trace W^u(x, delta) at the given sample resolution. Linear fibers produce
/// the exact straight segment along the unstable eigendirection; perturbed
/// fibers push a short seed segment forward `depth` steps with adaptive
/// resampling, then trim to arclength radius delta.
LeafSegment trace_leaf(const SystemSpec& system, const TorusPoint& x, double delta,
                       double resolution, int depth = 20);

/// Leaf distance between parameters: arclength |s2 - s1|.
double du_distance(const LeafSegment& leaf, double s1, double s2);

/// Bowen leaf distance max_{0<=j<n} d^u(f^j y(s1), f^j y(s2)), measured along
/// the iterated leaf. Values above `saturation` are reported as lower bounds.
double dun_distance(const SystemSpec& system, const LeafSegment& leaf, double s1, double s2,
                    int n, double saturation = std::numeric_limits<double>::infinity());

}  // namespace upress
