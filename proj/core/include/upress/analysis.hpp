// Property harness for the pressure functional and finite-difference probes
// of its one-sided directional derivatives.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "upress/measures.hpp"
#include "upress/pressure.hpp"

namespace upress {

struct PropertyCheck {
  std::string name;
  std::string detail;
  bool applicable = true;
  bool exact = false;   // holds by a shared-evaluation algebraic identity
  double slack = 0.0;   // margin by which the inequality holds (>= -tolerance passes)
  double tolerance = 0.0;
  bool pass = true;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  std::vector<std::string> battery_labels;
  std::vector<double> pressure_values;
  std::vector<double> spreads;
  bool all_pass = true;
  bool all_converged = true;
};

/// Runs the pressure-functional battery: zero-potential entropy value,
/// constant shift (exact), monotonicity, Lipschitz, convexity, coboundary
/// invariance (exact telescoping + statistical), subadditivity, scaling, and
/// |P(phi)| <= P(|phi|). All estimates share leaves, base points, and sweep
/// geometry, so the algebraically forced identities hold to machine precision.
PropertyReport property_suite(const SystemSpec& system, const std::vector<Potential>& battery,
                              const SeparationParams& params);

struct DerivativeProbe {
  std::vector<double> t_grid;      // symmetric, contains 0
  std::vector<double> values;      // P^u(phi + t psi) per t
  std::vector<double> spreads;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double tolerance = 0.0;
  bool gateaux_flag = false;       // |d_plus - d_minus| <= 2 * tolerance
  double convexity_violation = 0.0;  // worst second-difference defect on the grid
  std::optional<double> equilibrium_match;  // |d_plus - integral psi dmu| when mu given
  bool all_converged = true;
};

DerivativeProbe derivative_probe(const SystemSpec& system, const Potential& phi,
                                 const Potential& psi, const std::vector<double>& t_grid,
                                 const SeparationParams& params,
                                 const MeasureEstimate* equilibrium = nullptr);

/// Default symmetric probe grid with smallest step 0.05.
std::vector<double> default_t_grid();

}  // namespace upress
