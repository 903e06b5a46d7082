#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "upress/analysis.hpp"

using namespace upress;

namespace {

const SystemSpec kRot = SystemSpec::linear_times_rotation(0.33);

SeparationParams fast_params() {
  SeparationParams p;
  p.eps_list = {0.1, 0.05};
  p.n_min = 4;
  p.n_max = 10;
  p.offsets = 2;
  p.base_point_count = 2;
  p.seed = 42;
  return p;
}

std::vector<double> short_grid() { return {-0.1, -0.05, 0.0, 0.05, 0.1}; }

}  // namespace

TEST_CASE("derivative_probe: constant directions differentiate exactly") {
  const DerivativeProbe probe = derivative_probe(kRot, Potential::constant(0.0),
                                                 Potential::constant(1.0), short_grid(),
                                                 fast_params());
  CHECK(std::fabs(probe.d_plus - 1.0) < 1e-12);
  CHECK(std::fabs(probe.d_minus - 1.0) < 1e-12);
  CHECK(probe.gateaux_flag);
  CHECK(probe.convexity_violation < 1e-12);
}

TEST_CASE("derivative_probe: one-sided symmetry d-(psi) = -d+(-psi) on shared grids") {
  const Potential phi = Potential::constant(0.0);
  const Potential psi = Potential::trig({TrigTerm{{1, 0, 0}, 0.5, 0.0}});
  const SeparationParams p = fast_params();
  const DerivativeProbe plus = derivative_probe(kRot, phi, psi, short_grid(), p);
  const DerivativeProbe minus = derivative_probe(kRot, phi, psi.scaled(-1.0), short_grid(), p);
  CHECK(std::fabs(plus.d_minus - (-minus.d_plus)) < 1e-12);
  CHECK(std::fabs(minus.d_minus - (-plus.d_plus)) < 1e-12);
  CHECK(plus.d_minus <= plus.d_plus + 2.0 * plus.tolerance);
}

TEST_CASE("derivative_probe: slope along phi^u matches the SRB integral") {
  const MeasureEstimate srb = MeasureEstimate::empirical_srb(kRot, 100000, 1000, 7);
  const DerivativeProbe probe = derivative_probe(kRot, Potential::constant(0.0),
                                                 Potential::geometric(), short_grid(),
                                                 fast_params(), &srb);
  CHECK(std::fabs(probe.d_plus - (-testref::log_lambda_u())) < 0.06);
  CHECK(std::fabs(probe.d_minus - (-testref::log_lambda_u())) < 0.06);
  REQUIRE(probe.equilibrium_match.has_value());
  CHECK(*probe.equilibrium_match < 0.06);
}

TEST_CASE("derivative_probe: grid validation") {
  const Potential z = Potential::constant(0.0);
  const Potential one = Potential::constant(1.0);
  CHECK_THROWS_AS(derivative_probe(kRot, z, one, {-0.1, 0.0, 0.2}, fast_params()),
                  std::invalid_argument);
  CHECK_THROWS_AS(derivative_probe(kRot, z, one, {-0.1, 0.1}, fast_params()),
                  std::invalid_argument);
  CHECK_THROWS_AS(derivative_probe(kRot, z, one, {-2.0, 0.0, 2.0}, fast_params()),
                  std::invalid_argument);
}

TEST_CASE("property_suite: full battery passes on the rotation extension") {
  const std::vector<Potential> battery{
      Potential::constant(0.0),
      Potential::constant(0.3),
      Potential::constant(-0.25),
      Potential::trig({TrigTerm{{1, 0, 0}, 0.5, 0.0}}),
      Potential::trig({TrigTerm{{1, 0, 0}, 0.0, 0.2}, TrigTerm{{0, 1, 0}, 0.1, 0.0}}),
      Potential::geometric(),
  };
  const PropertyReport report = property_suite(kRot, battery, fast_params());
  for (const PropertyCheck& c : report.checks) {
    INFO(c.name, ": ", c.detail, " slack=", c.slack, " tol=", c.tolerance);
    CHECK(c.pass);
    if (c.exact && c.applicable) CHECK(c.slack >= -1e-12);
  }
  CHECK(report.all_pass);
  CHECK(report.all_converged);

  // the suite must exercise every numbered property at least once
  for (const char* prefix : {"p1_", "p2_", "p3_", "p4_", "p5_", "p6_", "p7_", "p8_", "p9_"}) {
    bool found = false;
    for (const PropertyCheck& c : report.checks)
      if (c.applicable && c.name.rfind(prefix, 0) == 0) found = true;
    INFO("property group ", prefix);
    CHECK(found);
  }
}

TEST_CASE("property_suite rejects degenerate batteries") {
  CHECK_THROWS_AS(property_suite(kRot, {Potential::constant(0.0)}, fast_params()),
                  std::invalid_argument);
}
