#include "upress/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upress/rng.hpp"

namespace upress {

namespace {

struct Run {
  double value = 0.0;
  double spread = 0.0;
  bool converged = true;
};

Run run_estimate(const SystemSpec& system, const Potential& phi, const SeparationParams& params) {
  const PressureEstimate est = estimate_pressure(system, phi, params);
  return {est.value, est.spread, est.converged};
}

/// Pointwise range of phi - psi over a deterministic sample.
std::pair<double, double> sampled_range_diff(const SystemSpec& system, const Potential& phi,
                                             const Potential& psi, int samples = 1000) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const auto q = quasi_random_point(0x5eedd1ffu, i, system.dim());
    const TorusPoint x{{q[0], q[1], q[2]}, system.dim()};
    const double d = phi.eval(system, x) - psi.eval(system, x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

// Convention: slack is the raw margin of the inequality (ideal >= 0) and a
// check passes when slack >= -tolerance.
void push_check(PropertyReport& report, PropertyCheck check) {
  check.pass = !check.applicable || check.slack >= -check.tolerance;
  report.all_pass = report.all_pass && check.pass;
  report.checks.push_back(std::move(check));
}

}  // namespace

PropertyReport property_suite(const SystemSpec& system, const std::vector<Potential>& battery,
                              const SeparationParams& params) {
  params.validate();
  if (battery.size() < 2)
    throw std::invalid_argument("property_suite: battery needs at least two potentials");

  PropertyReport report;
  std::vector<Run> runs;
  for (const Potential& phi : battery) {
    runs.push_back(run_estimate(system, phi, params));
    report.battery_labels.push_back(phi.label());
    report.pressure_values.push_back(runs.back().value);
    report.spreads.push_back(runs.back().spread);
    report.all_converged = report.all_converged && runs.back().converged;
  }
  auto tol_stat = [&](std::size_t i, std::size_t j) {
    return 2.0 * std::max(runs[i].spread, runs[j].spread) + 1e-9;
  };
  std::size_t zero_index = battery.size();
  for (std::size_t i = 0; i < battery.size(); ++i)
    if (battery[i].is_zero()) {
      zero_index = i;
      break;
    }

  // (1) zero potential reproduces the top unstable entropy (Perron oracle on
  // linear fibers).
  {
    PropertyCheck c;
    c.name = "p1_zero_potential_entropy";
    if (zero_index == battery.size() || !system.linear_fiber()) {
      c.applicable = false;
      c.detail = "needs a zero potential in the battery and a linear fiber";
    } else {
      c.tolerance = 0.05;
      c.slack = -std::fabs(runs[zero_index].value - std::log(system.lambda_u()));
      c.detail = "P(0) vs log lambda_u";
    }
    push_check(report, c);
  }

  // (2) constant shift: exact on shared sweeps, then with reseeded bases.
  {
    const double shift = 0.3;
    const Potential shifted = battery[0].plus_constant(shift);
    const Run r = run_estimate(system, shifted, params);
    PropertyCheck c;
    c.name = "p2_constant_shift_exact";
    c.exact = true;
    c.tolerance = 1e-12;
    c.slack = -std::fabs(r.value - runs[0].value - shift);
    c.detail = "rate(phi + 0.3) - rate(phi) vs 0.3, shared geometry";
    push_check(report, c);

    SeparationParams reseeded = params;
    reseeded.seed = params.seed + 1;
    reseeded.base_points.clear();
    const Run r2 = run_estimate(system, shifted, reseeded);
    PropertyCheck c2;
    c2.name = "p2_constant_shift_independent";
    c2.tolerance = 2.0 * (runs[0].spread + r2.spread) + params.plateau_tol;
    c2.slack = -std::fabs(r2.value - runs[0].value - shift);
    c2.detail = "independently seeded base points";
    push_check(report, c2);
  }

  // (3) monotonicity on sampled-ordered pairs, plus the inf/sup envelope.
  for (std::size_t i = 0; i < battery.size(); ++i)
    for (std::size_t j = 0; j < battery.size(); ++j) {
      if (i == j) continue;
      const auto [lo, hi] = sampled_range_diff(system, battery[i], battery[j]);
      (void)lo;
      if (hi <= 0.0) {  // phi_i <= phi_j pointwise on the sample
        PropertyCheck c;
        c.name = "p3_monotone_" + std::to_string(i) + "_le_" + std::to_string(j);
        c.tolerance = tol_stat(i, j);
        c.slack = runs[j].value - runs[i].value;
        c.detail = report.battery_labels[i] + " <= " + report.battery_labels[j];
        push_check(report, c);
      }
    }
  if (zero_index < battery.size()) {
    for (std::size_t i = 0; i < battery.size(); ++i) {
      if (i == zero_index) continue;
      const auto [lo, hi] = sampled_range_diff(system, battery[i], battery[zero_index]);
      PropertyCheck c;
      c.name = "p3_envelope_" + std::to_string(i);
      c.tolerance = tol_stat(i, zero_index);
      const double h_top = runs[zero_index].value;
      c.slack = std::min(h_top + hi - runs[i].value, runs[i].value - (h_top + lo));
      c.detail = "h_top + inf phi <= P(phi) <= h_top + sup phi";
      push_check(report, c);
    }
  }

  // (4) Lipschitz bound over all pairs.
  for (std::size_t i = 0; i < battery.size(); ++i)
    for (std::size_t j = i + 1; j < battery.size(); ++j) {
      const auto [lo, hi] = sampled_range_diff(system, battery[i], battery[j]);
      const double sup_diff = std::max(std::fabs(lo), std::fabs(hi));
      PropertyCheck c;
      c.name = "p4_lipschitz_" + std::to_string(i) + "_" + std::to_string(j);
      c.tolerance = tol_stat(i, j);
      c.slack = sup_diff - std::fabs(runs[i].value - runs[j].value);
      c.detail = report.battery_labels[i] + " vs " + report.battery_labels[j];
      push_check(report, c);
    }

  // Representative pair with the largest sampled distance drives the binary
  // checks below.
  std::size_t pi = 0, pj = 1;
  double best_sep = -1.0;
  for (std::size_t i = 0; i < battery.size(); ++i)
    for (std::size_t j = i + 1; j < battery.size(); ++j) {
      const auto [lo, hi] = sampled_range_diff(system, battery[i], battery[j]);
      const double sep = std::max(std::fabs(lo), std::fabs(hi));
      if (sep > best_sep) {
        best_sep = sep;
        pi = i;
        pj = j;
      }
    }

  // (5) convexity at the midpoint of the representative pair.
  {
    const Potential mix = Potential::affine(battery[pi].scaled(0.5), battery[pj], 0.5);
    const Run rm = run_estimate(system, mix, params);
    PropertyCheck c;
    c.name = "p5_convexity_midpoint";
    c.tolerance = tol_stat(pi, pj) + rm.spread;
    c.slack = 0.5 * (runs[pi].value + runs[pj].value) - rm.value;
    c.detail = report.battery_labels[pi] + " / " + report.battery_labels[pj];
    push_check(report, c);
  }

  // (6) coboundary invariance: exact telescoping identity of the Birkhoff
  // sums, then the statistical rate comparison.
  {
    const Potential psi = Potential::trig({TrigTerm{{1, 0, 0}, 0.0, 0.2}});
    const Potential psi_of = psi.composed_with_map(system);
    const Potential cob = Potential::affine(battery[0].plus(psi_of), psi, -1.0);

    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto q = quasi_random_point(0x5eedcb01u, i, system.dim());
      TorusPoint x{{q[0], q[1], q[2]}, system.dim()};
      TorusPoint fx = x;
      for (int k = 0; k < params.n_max; ++k) fx = apply(system, fx);
      const double lhs = birkhoff_sum(system, cob, x, params.n_max);
      const double rhs = birkhoff_sum(system, battery[0], x, params.n_max) +
                         psi.eval(system, fx) - psi.eval(system, x);
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
    PropertyCheck c;
    c.name = "p6_coboundary_telescoping_exact";
    c.exact = true;
    c.tolerance = 1e-12;
    c.slack = -worst;
    c.detail = "S_n(phi + psi o f - psi) = S_n phi + psi o f^n - psi";
    push_check(report, c);

    const Run rc = run_estimate(system, cob, params);
    const double psi_norm = sup_norm_sampled(system, psi);
    PropertyCheck c2;
    c2.name = "p6_coboundary_rate";
    c2.tolerance = 2.0 * psi_norm / params.n_max + runs[0].spread + rc.spread + 1e-9;
    c2.slack = -std::fabs(rc.value - runs[0].value);
    c2.detail = "psi = 0.2 sin(2 pi x)";
    push_check(report, c2);
  }

  // (7) subadditivity on the representative pair.
  {
    const Potential sum = battery[pi].plus(battery[pj]);
    const Run rs = run_estimate(system, sum, params);
    PropertyCheck c;
    c.name = "p7_subadditive";
    c.tolerance = tol_stat(pi, pj) + rs.spread;
    c.slack = runs[pi].value + runs[pj].value - rs.value;
    c.detail = report.battery_labels[pi] + " + " + report.battery_labels[pj];
    push_check(report, c);
  }

  // (8) scaling comparisons at c = 2 and c = 1/2 on a non-zero battery member.
  {
    std::size_t si = 0;
    for (std::size_t i = 0; i < battery.size(); ++i)
      if (!battery[i].is_zero()) {
        si = i;
        break;
      }
    const Run r2 = run_estimate(system, battery[si].scaled(2.0), params);
    PropertyCheck c;
    c.name = "p8_scaling_up";
    c.tolerance = 2.0 * std::max(runs[si].spread, r2.spread) + 1e-9;
    c.slack = 2.0 * runs[si].value - r2.value;
    c.detail = "P(2 phi) <= 2 P(phi), phi = " + report.battery_labels[si];
    push_check(report, c);

    const Run rh = run_estimate(system, battery[si].scaled(0.5), params);
    PropertyCheck c2;
    c2.name = "p8_scaling_down";
    c2.tolerance = 2.0 * std::max(runs[si].spread, rh.spread) + 1e-9;
    c2.slack = rh.value - 0.5 * runs[si].value;
    c2.detail = "P(phi/2) >= P(phi)/2, phi = " + report.battery_labels[si];
    push_check(report, c2);
  }

  // (9) |P(phi)| <= P(|phi|) wherever |phi| is representable.
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto abs_phi = battery[i].abs_if_sign_definite(system);
    PropertyCheck c;
    c.name = "p9_abs_" + std::to_string(i);
    c.detail = report.battery_labels[i];
    if (!abs_phi) {
      c.applicable = false;
      c.detail += " (no representable |phi|)";
    } else {
      const bool nonnegative = battery[i].kind() == Potential::Kind::Constant &&
                               battery[i].constant_value() >= 0.0;
      Run ra = nonnegative ? runs[i] : run_estimate(system, *abs_phi, params);
      c.tolerance = 2.0 * std::max(runs[i].spread, ra.spread) + 1e-9;
      c.slack = ra.value - std::fabs(runs[i].value);
    }
    push_check(report, c);
  }

  return report;
}

std::vector<double> default_t_grid() { return {-0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2}; }

DerivativeProbe derivative_probe(const SystemSpec& system, const Potential& phi,
                                 const Potential& psi, const std::vector<double>& t_grid,
                                 const SeparationParams& params,
                                 const MeasureEstimate* equilibrium) {
  params.validate();
  DerivativeProbe probe;
  probe.t_grid = t_grid;
  std::sort(probe.t_grid.begin(), probe.t_grid.end());
  if (probe.t_grid.size() < 3)
    throw std::invalid_argument("derivative_probe: t_grid needs at least three values");
  bool has_zero = false;
  for (double t : probe.t_grid) {
    if (t == 0.0) has_zero = true;
    if (std::fabs(t) > 1.0)
      throw std::invalid_argument("derivative_probe: |t| must be <= 1 on the grid");
    bool mirrored = false;
    for (double u : probe.t_grid)
      if (std::fabs(u + t) <= 1e-12) mirrored = true;
    if (!mirrored) throw std::invalid_argument("derivative_probe: t_grid must be symmetric");
  }
  if (!has_zero) throw std::invalid_argument("derivative_probe: t_grid must contain 0");

  double max_spread = 0.0;
  for (double t : probe.t_grid) {
    const PressureEstimate est = estimate_pressure(system, Potential::affine(phi, psi, t), params);
    probe.values.push_back(est.value);
    probe.spreads.push_back(est.spread);
    probe.all_converged = probe.all_converged && est.converged;
    max_spread = std::max(max_spread, est.spread);
  }

  const auto& ts = probe.t_grid;
  const auto& vs = probe.values;
  std::size_t zi = 0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] == 0.0) zi = i;
  if (zi + 1 >= ts.size() || zi == 0)
    throw std::invalid_argument("derivative_probe: grid must straddle 0");
  probe.d_plus = (vs[zi + 1] - vs[zi]) / ts[zi + 1];
  probe.d_minus = (vs[zi] - vs[zi - 1]) / (-ts[zi - 1]);
  probe.tolerance = max_spread + 1e-9;
  probe.gateaux_flag = std::fabs(probe.d_plus - probe.d_minus) <= 2.0 * probe.tolerance;

  double viol = 0.0;
  for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
    const double ta = ts[i], tb = ts[i + 1], tc = ts[i + 2];
    const double interp = ((tc - tb) * vs[i] + (tb - ta) * vs[i + 2]) / (tc - ta);
    viol = std::max(viol, vs[i + 1] - interp);
  }
  probe.convexity_violation = viol;

  if (equilibrium)
    probe.equilibrium_match = std::fabs(probe.d_plus - equilibrium->integrate(system, psi));
  return probe;
}

}  // namespace upress
