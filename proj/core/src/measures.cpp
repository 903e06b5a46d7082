#include "upress/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upress/rng.hpp"

namespace upress {

std::string hu_method_name(HuMethod m) {
  return m == HuMethod::ExactLinear ? "exact_linear" : "lyapunov_integral";
}

namespace {

/// Kahan-compensated mean.
struct MeanAcc {
  double sum = 0.0, comp = 0.0;
  long long n = 0;

  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
};

constexpr int kThetaQuadrature = 256;  // exact for trig theta-frequencies < 128

/// Orbit average of phi with the expansion cocycle carried along.
double orbit_average(const SystemSpec& system, const std::vector<TorusPoint>& orbit,
                     const Potential& phi, bool theta_average) {
  const bool geom = phi.uses_geometry();
  Vec2 v{0.0, 0.0};
  if (geom) v = system.fiber_unstable_direction(orbit.front().fiber(), 30);
  MeanAcc acc;
  for (const TorusPoint& x : orbit) {
    double e = 1.0;
    if (geom) {
      Vec2 w = system.fiber_jacobian_lift(x.fiber()) * v;
      e = norm(w);
      v = {w[0] / e, w[1] / e};
    }
    if (theta_average) {
      MeanAcc circle;
      for (int k = 0; k < kThetaQuadrature; ++k) {
        TorusPoint y{{x[0], x[1], static_cast<double>(k) / kThetaQuadrature}, 3};
        circle.add(phi.eval_with_expansion(system, y, e));
      }
      acc.add(circle.mean());
    } else {
      acc.add(phi.eval_with_expansion(system, x, e));
    }
  }
  return acc.mean();
}

}  // namespace

MeasureEstimate MeasureEstimate::empirical_srb(const SystemSpec& system, long long orbit_length,
                                               long long burn_in, std::uint64_t seed) {
  if (orbit_length < 10000)
    throw std::invalid_argument("empirical_srb: orbit_length must be >= 10^4");
  if (burn_in < 0) throw std::invalid_argument("empirical_srb: burn_in must be >= 0");

  MeasureEstimate mu;
  mu.kind_ = Kind::EmpiricalSrb;
  mu.system_fingerprint_ = system.fingerprint();
  mu.seed_ = seed;
  SplitMix64 rng(seed);
  TorusPoint x = system.dim() == 2
                     ? TorusPoint::wrapped2(rng.next_unit(), rng.next_unit())
                     : TorusPoint::wrapped3(rng.next_unit(), rng.next_unit(), rng.next_unit());
  for (long long k = 0; k < burn_in; ++k) x = apply(system, x);
  mu.orbit_.reserve(static_cast<std::size_t>(orbit_length));
  for (long long k = 0; k < orbit_length; ++k) {
    mu.orbit_.push_back(x);
    if (k + 1 < orbit_length) x = apply(system, x);
  }
  const EntropyResult h = unstable_entropy(system, mu);
  mu.hu_ = h.hu;
  mu.hu_method_ = h.method;
  mu.bound_only_ = h.bound_only;
  return mu;
}

std::vector<Vec2> periodic_fiber_points(const SystemSpec& system, int period) {
  if (period < 1 || period > 6)
    throw std::invalid_argument("periodic_fiber_points: period must lie in [1, 6]");
  IMat2 Ap{1, 0, 0, 1};
  for (int k = 0; k < period; ++k) Ap = Ap * system.matrix();
  const IMat2 M{Ap.a - 1, Ap.b, Ap.c, Ap.d - 1};
  const long long D = M.det();
  if (D == 0) throw std::runtime_error("periodic_fiber_points: degenerate period matrix");

  // Lattice solutions x = M^{-1} k with x in [0,1)^2; k ranges over M [0,1)^2.
  std::vector<Vec2> seeds;
  const long long k1_lo = std::min({0LL, M.a, M.b, M.a + M.b});
  const long long k1_hi = std::max({0LL, M.a, M.b, M.a + M.b});
  const long long k2_lo = std::min({0LL, M.c, M.d, M.c + M.d});
  const long long k2_hi = std::max({0LL, M.c, M.d, M.c + M.d});
  const double invD = 1.0 / static_cast<double>(D);
  for (long long k1 = k1_lo; k1 <= k1_hi; ++k1)
    for (long long k2 = k2_lo; k2 <= k2_hi; ++k2) {
      const double x1 = (static_cast<double>(M.d) * k1 - static_cast<double>(M.b) * k2) * invD;
      const double x2 = (-static_cast<double>(M.c) * k1 + static_cast<double>(M.a) * k2) * invD;
      if (x1 >= -1e-12 && x1 < 1.0 - 1e-12 && x2 >= -1e-12 && x2 < 1.0 - 1e-12)
        seeds.push_back({wrap_unit(x1), wrap_unit(x2)});
    }

  if (system.linear_fiber()) return seeds;

  // Newton refinement of F^p(x) = x + k on the lift for the perturbed fiber.
  std::vector<Vec2> refined;
  for (Vec2 seed : seeds) {
    Vec2 x = seed;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      Vec2 y = x;
      Mat2 J{1, 0, 0, 1};
      for (int k = 0; k < period; ++k) {
        const Mat2 Dk = system.fiber_jacobian_lift(y);
        J = Dk * J;
        y = system.fiber_apply_lift(y);
      }
      // residual against the nearest lattice translate
      Vec2 r{y[0] - x[0], y[1] - x[1]};
      r[0] -= std::round(r[0]);
      r[1] -= std::round(r[1]);
      if (std::fabs(r[0]) < 1e-12 && std::fabs(r[1]) < 1e-12) {
        ok = true;
        break;
      }
      Mat2 G{J.a - 1.0, J.b, J.c, J.d - 1.0};
      const double det = G.det();
      if (det == 0.0) break;
      const Vec2 dx{(G.d * r[0] - G.b * r[1]) / det, (-G.c * r[0] + G.a * r[1]) / det};
      x = {x[0] - dx[0], x[1] - dx[1]};
    }
    if (ok) refined.push_back({wrap_unit(x[0]), wrap_unit(x[1])});
  }
  // dedupe on the torus
  std::vector<Vec2> unique_pts;
  for (Vec2 p : refined) {
    bool dup = false;
    for (Vec2 q : unique_pts)
      if (circle_distance(p[0], q[0]) < 1e-9 && circle_distance(p[1], q[1]) < 1e-9) dup = true;
    if (!dup) unique_pts.push_back(p);
  }
  return unique_pts;
}

MeasureEstimate MeasureEstimate::point_mass(const SystemSpec& system, const TorusPoint& near,
                                            int period) {
  if (near.dim != system.dim()) throw std::invalid_argument("point_mass: dimension mismatch");
  const std::vector<Vec2> candidates = periodic_fiber_points(system, period);
  if (candidates.empty()) throw std::runtime_error("point_mass: no periodic point found");
  Vec2 target = near.fiber();
  Vec2 best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (Vec2 p : candidates) {
    const double d = std::hypot(circle_distance(p[0], target[0]), circle_distance(p[1], target[1]));
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }

  MeasureEstimate mu;
  mu.kind_ = Kind::PointMass;
  mu.system_fingerprint_ = system.fingerprint();
  mu.period_ = period;
  mu.circle_averaged_ = system.dim() == 3;
  Vec2 p = best;
  for (int k = 0; k < period; ++k) {
    mu.orbit_.push_back(system.dim() == 2 ? TorusPoint::wrapped2(p[0], p[1])
                                          : TorusPoint::wrapped3(p[0], p[1], 0.0));
    p = {wrap_unit(system.fiber_apply_lift(p)[0]), wrap_unit(system.fiber_apply_lift(p)[1])};
  }
  const EntropyResult h = unstable_entropy(system, mu);
  mu.hu_ = h.hu;
  mu.hu_method_ = h.method;
  mu.bound_only_ = h.bound_only;
  return mu;
}

void MeasureEstimate::check_system(const SystemSpec& system) const {
  if (system.fingerprint() != system_fingerprint_)
    throw std::invalid_argument("MeasureEstimate: measure was built from a different system");
}

double MeasureEstimate::integrate(const SystemSpec& system, const Potential& phi) const {
  check_system(system);
  switch (phi.kind()) {
    case Potential::Kind::Constant:
      return phi.constant_value();
    case Potential::Kind::Affine:
      return integrate(system, phi.base()) + phi.affine_t() * integrate(system, phi.direction());
    default:
      break;
  }
  if (circle_averaged_ && 2 * phi.max_theta_frequency() >= kThetaQuadrature)
    throw std::invalid_argument("integrate: theta frequency too high for the circle quadrature");
  return orbit_average(system, orbit_, phi, circle_averaged_);
}

EntropyResult unstable_entropy(const SystemSpec& system, const MeasureEstimate& mu) {
  mu.check_system(system);
  const Potential minus_phi_u = Potential::geometric().scaled(-1.0);
  EntropyResult r;
  r.hu = orbit_average(system, mu.orbit(), minus_phi_u, false);
  r.method = system.linear_fiber() ? HuMethod::ExactLinear : HuMethod::LyapunovIntegral;
  r.bound_only = mu.kind() == MeasureEstimate::Kind::PointMass;
  return r;
}

double variational_gap(const SystemSpec& system, const Potential& phi, const MeasureEstimate& mu,
                       const PressureEstimate& pressure) {
  mu.check_system(system);
  return pressure.value - (mu.hu() + mu.integrate(system, phi));
}

DominanceReport pressure_dominates(const SystemSpec& system, const MeasureEstimate& mu,
                                   const std::vector<Potential>& potentials,
                                   const std::vector<double>& pressure_values) {
  if (potentials.size() != pressure_values.size())
    throw std::invalid_argument("pressure_dominates: potentials and values differ in length");
  if (potentials.empty()) throw std::invalid_argument("pressure_dominates: empty battery");
  DominanceReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < potentials.size(); ++i) {
    DominanceRow row;
    row.potential = potentials[i].label();
    row.integral = mu.integrate(system, potentials[i]);
    row.pressure = pressure_values[i];
    row.slack = row.pressure - row.integral;
    report.min_slack = std::min(report.min_slack, row.slack);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace upress
