#include "upress/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "upress/parallel.hpp"
#include "upress/rng.hpp"

namespace upress {

void SeparationParams::validate() const {
  if (!(delta > 0.0) || delta >= 0.5)
    throw std::invalid_argument("SeparationParams: delta must lie in (0, 0.5)");
  if (eps_list.empty()) throw std::invalid_argument("SeparationParams: eps_list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || eps_list[i] >= 2.0 * delta)
      throw std::invalid_argument("SeparationParams: each eps must lie in (0, 2*delta)");
    if (i > 0 && eps_list[i] >= eps_list[i - 1])
      throw std::invalid_argument("SeparationParams: eps_list must be strictly decreasing");
  }
  if (n_min < 1) throw std::invalid_argument("SeparationParams: n_min must be >= 1");
  if (n_max < n_min + 4)
    throw std::invalid_argument("SeparationParams: n_max must be >= n_min + 4");
  if (n_max > 60) throw std::invalid_argument("SeparationParams: n_max must be <= 60");
  if (offsets < 1) throw std::invalid_argument("SeparationParams: offsets must be >= 1");
  if (base_points.empty() && base_point_count < 1)
    throw std::invalid_argument("SeparationParams: need at least one base point");
  if (!(resolution > 0.0)) throw std::invalid_argument("SeparationParams: resolution must be > 0");
  if (!(plateau_tol > 0.0))
    throw std::invalid_argument("SeparationParams: plateau_tol must be > 0");
  if (leaf_depth < 1) throw std::invalid_argument("SeparationParams: leaf_depth must be >= 1");
}

namespace {

constexpr double kInvTwoPi = 1.0 / kTwoPi;

/// Flattened fiber dynamics for the sweep hot path.
struct FiberDyn {
  double a, b, c, d;
  double e1, e2;  // eps * s1, eps * s2
  bool linear;

  static FiberDyn from(const SystemSpec& system) {
    const Mat2 A = system.matrix().real();
    return {A.a, A.b, A.c, A.d, system.eps_pert() * system.shape().s1,
            system.eps_pert() * system.shape().s2, system.linear_fiber()};
  }

  Vec2 step(Vec2 p) const {
    Vec2 q{a * p[0] + b * p[1], c * p[0] + d * p[1]};
    if (!linear) {
      q[0] += e1 * std::sin(kTwoPi * p[0]) * kInvTwoPi;
      q[1] += e2 * std::sin(kTwoPi * p[1]) * kInvTwoPi;
    }
    return q;
  }
};

/// Streaming max-shifted log-sum-exp.
struct LogSumAcc {
  double shift = -std::numeric_limits<double>::infinity();
  double acc = 0.0;

  void add(double a) {
    if (a <= shift) {
      acc += std::exp(a - shift);
    } else {
      acc = (acc == 0.0) ? 1.0 : acc * std::exp(shift - a) + 1.0;
      shift = a;
    }
  }
  double value() const { return shift + std::log(acc); }
};

/// Orbits of leaf points and Bowen distances measured by chords between the
/// iterated lifts (the image of the sampled leaf). Exact for linear fibers;
/// for the perturbed family the chord differs from the image-leaf arc by
/// O((curvature * eps)^2) at the scales the sweeps compare against.
class BowenWalker {
 public:
  BowenWalker(const SystemSpec& system, const LeafSegment& leaf, int n)
      : dyn_(FiberDyn::from(system)), leaf_(leaf), n_(n) {}

  void orbit(double q, Vec2* out) {
    out[0] = leaf_.point_at(q, hint_);
    for (int j = 1; j < n_; ++j) out[j] = dyn_.step(out[j - 1]);
  }

  /// max_j |a_j - b_j|^2 with early exit once cap_sq is exceeded.
  double dist_sq(const Vec2* a, const Vec2* b, double cap_sq) const {
    double m = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double dx = a[j][0] - b[j][0];
      const double dy = a[j][1] - b[j][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 > m) {
        m = d2;
        if (m >= cap_sq) return m;
      }
    }
    return m;
  }

  int n() const { return n_; }

 private:
  FiberDyn dyn_;
  const LeafSegment& leaf_;
  int n_;
  std::size_t hint_ = 0;
};

/// S_n phi read off a precomputed fiber orbit. Potentials are affine in the
/// geometric slot, so the expansion cocycle contributes through one matrix
/// product per orbit: S_n phi = S_n(nongeometric) - coeff * log ||Df^n v||.
double birkhoff_from_orbit(const SystemSpec& system, const Potential& phi, const Vec2* orbit,
                           int n, double theta0) {
  if (phi.is_zero()) return 0.0;
  double sum = 0.0;

  const double gcoeff = phi.geometric_coefficient();
  if (gcoeff != 0.0) {
    Vec2 w = system.linear_fiber()
                 ? system.unstable_eigendirection()
                 : system.fiber_unstable_direction({wrap_unit(orbit[0][0]), wrap_unit(orbit[0][1])},
                                                   30);
    double log_growth = 0.0;
    for (int j = 0; j < n; ++j) {
      w = system.fiber_jacobian_lift(orbit[j]) * w;
      if ((j & 15) == 15) {  // renormalize; keeps the product in range for any n <= 60
        const double e = norm(w);
        log_growth += std::log(e);
        w = {w[0] / e, w[1] / e};
      }
    }
    log_growth += std::log(norm(w));
    sum += gcoeff * (-log_growth);
  }

  if (!phi.nongeometric_is_zero()) {
    const int dim = system.dim();
    const double alpha = system.rotation_angle();
    for (int j = 0; j < n; ++j) {
      TorusPoint x = dim == 2 ? TorusPoint::wrapped2(orbit[j][0], orbit[j][1])
                              : TorusPoint::wrapped3(orbit[j][0], orbit[j][1], theta0 + j * alpha);
      sum += phi.eval_nongeometric(system, x);
    }
  }
  return sum;
}

struct Bands {
  double lo_sq;   // accepted crossings satisfy d^2 >= lo_sq ...
  double hi_sq;   // ... and d^2 <= hi_sq
  double cap_sq;  // distance evaluations may clip above this
};

/// Comparison slack: arclength parameters carry rounding from chord
/// accumulation, so exact-tie selections (spacing == eps) must not drop out.
constexpr double kTieSlack = 1e-9;
/// Root acceptance width; biases greedy spacings by at most this fraction.
constexpr double kBandWidth = 2e-4;

/// Smallest sigma in (0, room] with dist(from, from+sigma) inside the band.
/// Returns nullopt when even sigma = room stays below the band (no crossing).
/// On success fills o_accept with the orbit at the accepted parameter.
std::optional<double> find_crossing(BowenWalker& walker, double s_from, const Vec2* o_from,
                                    double room, double& guess, const Bands& bands,
                                    Vec2* o_accept, Vec2* o_scratch) {
  if (room <= 1e-15) return std::nullopt;
  double lo = 0.0;
  double hi = std::min(std::max(guess, 1e-14), room);
  walker.orbit(s_from + hi, o_accept);
  double dhi_sq = walker.dist_sq(o_from, o_accept, bands.cap_sq);
  while (dhi_sq < bands.lo_sq) {
    if (hi >= room) return std::nullopt;
    lo = hi;
    hi = std::min(room, hi * 2.0);
    walker.orbit(s_from + hi, o_accept);
    dhi_sq = walker.dist_sq(o_from, o_accept, bands.cap_sq);
  }
  const double target = std::sqrt(0.5 * (bands.lo_sq + bands.hi_sq));
  for (int it = 0; dhi_sq > bands.hi_sq && it < 80; ++it) {
    double prop = hi * (target / std::sqrt(dhi_sq));
    if (!(prop > lo && prop < hi)) prop = 0.5 * (lo + hi);
    walker.orbit(s_from + prop, o_scratch);
    const double d_sq = walker.dist_sq(o_from, o_scratch, bands.cap_sq);
    if (d_sq >= bands.lo_sq) {
      hi = prop;
      dhi_sq = d_sq;
      std::swap_ranges(o_accept, o_accept + walker.n(), o_scratch);
    } else {
      lo = prop;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  guess = hi;
  return s_from + hi;
}

double initial_guess(const SystemSpec& system, int n, double eps) {
  return eps / std::pow(system.lambda_u(), n - 1);
}

}  // namespace

namespace detail {

SweepResult sweep_separated(const SystemSpec& system, const LeafSegment& leaf,
                            const Potential& phi, int n, double eps, double offset,
                            std::vector<double>* collect) {
  if (!(eps > 0.0)) throw std::invalid_argument("separated sweep: eps must be > 0");
  if (offset < 0.0 || offset >= eps)
    throw std::invalid_argument("separated sweep: offset must lie in [0, eps)");
  BowenWalker walker(system, leaf, n);
  std::vector<Vec2> buf_last(static_cast<std::size_t>(n)), buf_next(static_cast<std::size_t>(n)),
      buf_probe(static_cast<std::size_t>(n));
  Vec2* o_last = buf_last.data();
  Vec2* o_next = buf_next.data();

  const Bands bands{eps * eps * (1.0 - kTieSlack) * (1.0 - kTieSlack),
                    eps * eps * (1.0 + kBandWidth) * (1.0 + kBandWidth), 16.0 * eps * eps};

  double s = -leaf.delta + offset;
  walker.orbit(s, o_last);
  LogSumAcc acc;
  acc.add(birkhoff_from_orbit(system, phi, o_last, n, leaf.theta));
  long long count = 1;
  if (collect) collect->push_back(s);

  double guess = initial_guess(system, n, eps);
  while (true) {
    auto next = find_crossing(walker, s, o_last, leaf.delta - s, guess, bands, o_next,
                              buf_probe.data());
    if (!next) break;
    s = *next;
    std::swap(o_last, o_next);
    acc.add(birkhoff_from_orbit(system, phi, o_last, n, leaf.theta));
    ++count;
    if (collect) collect->push_back(s);
  }
  return {acc.value(), count};
}

SweepResult sweep_spanning(const SystemSpec& system, const LeafSegment& leaf,
                           const Potential& phi, int n, double eps,
                           std::vector<double>* collect) {
  if (!(eps > 0.0)) throw std::invalid_argument("spanning sweep: eps must be > 0");
  BowenWalker walker(system, leaf, n);
  std::vector<Vec2> buf_front(static_cast<std::size_t>(n)), buf_center(static_cast<std::size_t>(n)),
      buf_probe(static_cast<std::size_t>(n)), buf_end(static_cast<std::size_t>(n));
  Vec2* o_front = buf_front.data();
  Vec2* o_center = buf_center.data();

  // Mirrored band: centers may undershoot eps slightly, never overshoot
  // beyond the tie slack, so the claimed cover radius stays valid.
  const Bands bands{eps * eps * (1.0 - kBandWidth) * (1.0 - kBandWidth),
                    eps * eps * (1.0 + kTieSlack) * (1.0 + kTieSlack), 16.0 * eps * eps};

  LogSumAcc acc;
  long long count = 0;
  double frontier = -leaf.delta;
  walker.orbit(frontier, o_front);
  walker.orbit(leaf.delta, buf_end.data());
  const Vec2* o_end = buf_end.data();
  double guess = initial_guess(system, n, eps);

  while (true) {
    const double room = leaf.delta - frontier;
    // Terminal center: the rest of the leaf fits inside one Bowen ball.
    if (walker.dist_sq(o_front, o_end, bands.cap_sq) <= bands.hi_sq) {
      acc.add(birkhoff_from_orbit(system, phi, o_end, n, leaf.theta));
      ++count;
      if (collect) collect->push_back(leaf.delta);
      break;
    }
    auto center = find_crossing(walker, frontier, o_front, room, guess, bands, o_center,
                                buf_probe.data());
    if (!center) {  // cannot happen after the terminal test; keep the sweep safe
      acc.add(birkhoff_from_orbit(system, phi, o_front, n, leaf.theta));
      ++count;
      if (collect) collect->push_back(frontier);
      break;
    }
    acc.add(birkhoff_from_orbit(system, phi, o_center, n, leaf.theta));
    ++count;
    if (collect) collect->push_back(*center);

    // Everything within the band of this center is covered; if that reaches
    // the right end the cover is complete.
    if (walker.dist_sq(o_center, o_end, bands.cap_sq) <= bands.hi_sq) break;
    auto next_frontier = find_crossing(walker, *center, o_center, leaf.delta - *center, guess,
                                       bands, o_front, buf_probe.data());
    if (!next_frontier) break;
    frontier = *next_frontier;
  }
  return {acc.value(), count};
}

double fit_slope(const std::vector<double>& ns, const std::vector<double>& ys,
                 double* rms_residual) {
  if (ns.size() != ys.size() || ns.size() < 2)
    throw std::invalid_argument("fit_slope: need at least two points");
  const double m = static_cast<double>(ns.size());
  double nbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    nbar += ns[i];
    ybar += ys[i];
  }
  nbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxx += (ns[i] - nbar) * (ns[i] - nbar);
    sxy += (ns[i] - nbar) * (ys[i] - ybar);
  }
  const double slope = sxy / sxx;
  if (rms_residual) {
    double rr = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double r = ys[i] - ybar - slope * (ns[i] - nbar);
      rr += r * r;
    }
    *rms_residual = std::sqrt(rr / m);
  }
  return slope;
}

}  // namespace detail

std::vector<double> separated_set(const SystemSpec& system, const LeafSegment& leaf, int n,
                                  double eps, double offset) {
  std::vector<double> out;
  detail::sweep_separated(system, leaf, Potential::constant(0.0), n, eps, offset, &out);
  return out;
}

std::vector<double> spanning_set(const SystemSpec& system, const LeafSegment& leaf, int n,
                                 double eps) {
  std::vector<double> out;
  detail::sweep_spanning(system, leaf, Potential::constant(0.0), n, eps, &out);
  return out;
}

double weighted_sum(const SystemSpec& system, const Potential& phi, const LeafSegment& leaf,
                    const std::vector<double>& points, int n) {
  if (points.empty()) throw std::invalid_argument("weighted_sum: empty point list");
  std::vector<double> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  LogSumAcc acc;
  for (double q : sorted) acc.add(birkhoff_sum(system, phi, leaf.torus_point_at(q), n));
  return acc.value();
}

PressureEstimate estimate_pressure(const SystemSpec& system, const Potential& phi,
                                   const SeparationParams& params) {
  params.validate();

  PressureEstimate est;
  est.base_points = params.base_points;
  if (est.base_points.empty()) {
    for (int i = 0; i < params.base_point_count; ++i) {
      const auto q = quasi_random_point(params.seed, i, system.dim());
      est.base_points.push_back(TorusPoint{{q[0], q[1], q[2]}, system.dim()});
    }
  }
  const int nb = static_cast<int>(est.base_points.size());
  const int ne = static_cast<int>(params.eps_list.size());
  const int nn = params.n_max - params.n_min + 1;
  const int noff = params.offsets;

  std::vector<LeafSegment> leaves;
  leaves.reserve(static_cast<std::size_t>(nb));
  for (const TorusPoint& b : est.base_points)
    leaves.push_back(trace_leaf(system, b, params.delta, params.resolution, params.leaf_depth));

  // Grid rows in fixed key order; jobs fill disjoint slots.
  est.grid.resize(static_cast<std::size_t>(nb * ne * nn * noff));
  auto row_index = [&](int b, int ei, int ni, int off) {
    return static_cast<std::size_t>(((b * ne + ei) * nn + ni) * noff + off);
  };

  struct Job {
    int b, ei, ni, off;  // off == -1 encodes the spanning job for (b, ei, ni)
    double cost;
  };
  std::vector<Job> jobs;
  jobs.reserve(static_cast<std::size_t>(nb * ne * nn * (noff + 1)));
  for (int b = 0; b < nb; ++b)
    for (int ei = 0; ei < ne; ++ei)
      for (int ni = 0; ni < nn; ++ni) {
        const int n = params.n_min + ni;
        const double cost = std::pow(system.lambda_u(), n) / params.eps_list[static_cast<std::size_t>(ei)];
        for (int off = -1; off < noff; ++off) jobs.push_back({b, ei, ni, off, cost});
      }
  std::stable_sort(jobs.begin(), jobs.end(),
                   [](const Job& x, const Job& y) { return x.cost > y.cost; });

  parallel_for(jobs.size(), params.threads, [&](std::size_t ji) {
    const Job& job = jobs[ji];
    const int n = params.n_min + job.ni;
    const double eps = params.eps_list[static_cast<std::size_t>(job.ei)];
    const LeafSegment& leaf = leaves[static_cast<std::size_t>(job.b)];
    if (job.off < 0) {
      const auto span = detail::sweep_spanning(system, leaf, phi, n, eps);
      for (int off = 0; off < noff; ++off) {
        GridRow& row = est.grid[row_index(job.b, job.ei, job.ni, off)];
        row.log_sum_span = span.log_sum;
        row.count_span = span.count;
      }
    } else {
      const double offset = job.off * eps / noff;
      const auto sep = detail::sweep_separated(system, leaf, phi, n, eps, offset);
      GridRow& row = est.grid[row_index(job.b, job.ei, job.ni, job.off)];
      row.log_sum_sep = sep.log_sum;
      row.count_sep = sep.count;
    }
  });
  // key columns, in one deterministic pass
  for (int b = 0; b < nb; ++b)
    for (int ei = 0; ei < ne; ++ei)
      for (int ni = 0; ni < nn; ++ni)
        for (int off = 0; off < noff; ++off) {
          GridRow& row = est.grid[row_index(b, ei, ni, off)];
          row.base_index = b;
          row.eps = params.eps_list[static_cast<std::size_t>(ei)];
          row.n = params.n_min + ni;
          row.offset = off;
        }

  // Per (base, eps): max over offsets, then the slope over the upper n-range.
  const int fit_from = params.fit_start();
  std::vector<double> ns;
  for (int n = fit_from; n <= params.n_max; ++n) ns.push_back(static_cast<double>(n));
  est.rates.reserve(static_cast<std::size_t>(nb * ne));
  for (int b = 0; b < nb; ++b)
    for (int ei = 0; ei < ne; ++ei) {
      std::vector<double> ys_sep, ys_span;
      for (int n = fit_from; n <= params.n_max; ++n) {
        const int ni = n - params.n_min;
        double best = -std::numeric_limits<double>::infinity();
        for (int off = 0; off < noff; ++off)
          best = std::max(best, est.grid[row_index(b, ei, ni, off)].log_sum_sep);
        ys_sep.push_back(best);
        ys_span.push_back(est.grid[row_index(b, ei, ni, 0)].log_sum_span);
      }
      RateFit fit;
      fit.base_index = b;
      fit.eps = params.eps_list[static_cast<std::size_t>(ei)];
      fit.rate_sep = detail::fit_slope(ns, ys_sep, &fit.residual_sep);
      fit.rate_span = detail::fit_slope(ns, ys_span, &fit.residual_span);
      est.rates.push_back(fit);
    }

  auto rate_at = [&](int b, int ei, bool span) {
    const RateFit& f = est.rates[static_cast<std::size_t>(b * ne + ei)];
    return span ? f.rate_span : f.rate_sep;
  };
  const int last = ne - 1;
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  double smax = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < nb; ++b) {
    vmax = std::max(vmax, rate_at(b, last, false));
    vmin = std::min(vmin, rate_at(b, last, false));
    smax = std::max(smax, rate_at(b, last, true));
  }
  est.value = vmax;
  est.spread = vmax - vmin;
  est.bracket = {smax, vmax};

  est.converged = true;
  if (ne >= 2) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) prev = std::max(prev, rate_at(b, last - 1, false));
    if (std::fabs(est.value - prev) > params.plateau_tol) est.converged = false;
  }
  return est;
}

}  // namespace upress
