// Unstable topological pressure: (n, eps) u-separated and u-spanning sets on
// leaf disks, weighted Birkhoff sums, and the extrapolated estimate over a
// (base point, eps, n) grid.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "upress/leaf.hpp"
#include "upress/potential.hpp"

namespace upress {

struct SeparationParams {
  double delta = 0.2;
  std::vector<double> eps_list{0.1, 0.05, 0.025};  // strictly decreasing
  int n_min = 4;
  int n_max = 14;
  int offsets = 8;             // greedy start offsets per (base, eps, n)
  int base_point_count = 5;    // used when base_points is empty
  std::uint64_t seed = 1;
  std::vector<TorusPoint> base_points;
  double resolution = 1e-3;    // leaf sample spacing
  double plateau_tol = 0.05;   // eps-plateau detection threshold
  int leaf_depth = 20;
  int threads = 0;             // 0 = hardware concurrency

  void validate() const;
  /// n-range over which the growth rate is fitted: upper half of [n_min, n_max].
  int fit_start() const { return (n_min + n_max + 1) / 2; }
};

struct GridRow {
  int base_index = 0;
  double eps = 0.0;
  int n = 0;
  int offset = 0;
  double log_sum_sep = 0.0;
  double log_sum_span = 0.0;
  long long count_sep = 0;
  long long count_span = 0;
};

struct RateFit {
  int base_index = 0;
  double eps = 0.0;
  double rate_sep = 0.0;
  double rate_span = 0.0;
  double residual_sep = 0.0;  // rms residual of the log-sum fit
  double residual_span = 0.0;
};

struct PressureEstimate {
  std::vector<GridRow> grid;   // ordered by (base, eps list position, n, offset)
  std::vector<RateFit> rates;
  std::vector<TorusPoint> base_points;
  double value = 0.0;                 // max over bases of the smallest-eps rate
  std::array<double, 2> bracket{};    // {spanning-derived, separated-derived}
  double spread = 0.0;                // max - min over bases at smallest eps
  bool converged = true;
};

/// Greedy left-to-right (n, eps) u-separated sweep from s = -delta + offset;
/// returns the selected arclength parameters. offset in [0, eps).
std::vector<double> separated_set(const SystemSpec& system, const LeafSegment& leaf, int n,
                                  double eps, double offset);

/// Greedy (n, eps) u-spanning cover of the leaf; returns center parameters.
std::vector<double> spanning_set(const SystemSpec& system, const LeafSegment& leaf, int n,
                                 double eps);

/// log sum_{y in points} exp(S_n phi(y)), max-shifted, in sorted parameter order.
double weighted_sum(const SystemSpec& system, const Potential& phi, const LeafSegment& leaf,
                    const std::vector<double>& points, int n);

PressureEstimate estimate_pressure(const SystemSpec& system, const Potential& phi,
                                   const SeparationParams& params);

namespace detail {

struct SweepResult {
  double log_sum = 0.0;
  long long count = 0;
};

/// Fused sweep + weighted accumulation (single pass; what the estimator runs).
SweepResult sweep_separated(const SystemSpec& system, const LeafSegment& leaf,
                            const Potential& phi, int n, double eps, double offset,
                            std::vector<double>* collect = nullptr);
SweepResult sweep_spanning(const SystemSpec& system, const LeafSegment& leaf,
                           const Potential& phi, int n, double eps,
                           std::vector<double>* collect = nullptr);

/// Least-squares slope of y against n; optional rms residual.
double fit_slope(const std::vector<double>& ns, const std::vector<double>& ys,
                 double* rms_residual = nullptr);

}  // namespace detail

}  // namespace upress
