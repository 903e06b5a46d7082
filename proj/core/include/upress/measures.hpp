// Empirical invariant measures: orbit-based SRB approximations, periodic-orbit
// measures, unstable entropy via the Lyapunov integral, and variational gaps.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "upress/potential.hpp"
#include "upress/pressure.hpp"

namespace upress {

enum class HuMethod { LyapunovIntegral, ExactLinear };

std::string hu_method_name(HuMethod m);

class MeasureEstimate {
 public:
  enum class Kind { EmpiricalSrb, PointMass };

  /// Birkhoff orbit of a seeded random point after burn-in.
  static MeasureEstimate empirical_srb(const SystemSpec& system, long long orbit_length,
                                       long long burn_in, std::uint64_t seed);
  /// Invariant measure on a fiber-periodic orbit. For rotation-extended
  /// systems the rotation admits no finite invariant orbit, so the measure is
  /// the product with Haar on the circle (theta-averaged integrals).
  static MeasureEstimate point_mass(const SystemSpec& system, const TorusPoint& near, int period);

  Kind kind() const { return kind_; }
  int period() const { return period_; }
  bool circle_averaged() const { return circle_averaged_; }
  const std::vector<TorusPoint>& orbit() const { return orbit_; }

  /// Birkhoff average of phi over the stored orbit (theta-averaged for
  /// circle-extended point masses). Constants and affine combinations are
  /// integrated exactly by construction.
  double integrate(const SystemSpec& system, const Potential& phi) const;

  double hu() const { return hu_; }
  HuMethod hu_method() const { return hu_method_; }
  /// True when hu is only the Lyapunov upper bound (non-Gibbs measures).
  bool bound_only() const { return bound_only_; }

  void check_system(const SystemSpec& system) const;

 private:
  MeasureEstimate() = default;

  Kind kind_ = Kind::EmpiricalSrb;
  std::uint64_t system_fingerprint_ = 0;
  std::uint64_t seed_ = 0;
  int period_ = 0;
  bool circle_averaged_ = false;
  std::vector<TorusPoint> orbit_;
  double hu_ = 0.0;
  HuMethod hu_method_ = HuMethod::LyapunovIntegral;
  bool bound_only_ = false;

  friend struct EntropyOps;
};

struct EntropyResult {
  double hu = 0.0;
  HuMethod method = HuMethod::LyapunovIntegral;
  bool bound_only = false;
};

/// Unstable entropy of the measure. For SRB approximations this is the Gibbs
/// identity h^u = integral of -phi^u; for atomic measures the same number is
/// only an upper bound and is flagged bound_only.
EntropyResult unstable_entropy(const SystemSpec& system, const MeasureEstimate& mu);

/// P.value - (h^u_mu + integral of phi); near zero certifies a u-equilibrium.
double variational_gap(const SystemSpec& system, const Potential& phi, const MeasureEstimate& mu,
                       const PressureEstimate& pressure);

struct DominanceRow {
  std::string potential;
  double integral = 0.0;
  double pressure = 0.0;
  double slack = 0.0;  // pressure - integral
};

struct DominanceReport {
  std::vector<DominanceRow> rows;
  double min_slack = 0.0;
};

/// Per-potential slack P^u(phi) - integral phi dmu; invariance demands >= 0
/// up to estimator tolerance.
DominanceReport pressure_dominates(const SystemSpec& system, const MeasureEstimate& mu,
                                   const std::vector<Potential>& potentials,
                                   const std::vector<double>& pressure_values);

/// All fiber-periodic points of the given period (fixed points of the p-th
/// iterate), found from the linear lattice solutions and refined by Newton
/// for the perturbed family.
std::vector<Vec2> periodic_fiber_points(const SystemSpec& system, int period);

}  // namespace upress
