#include "upress/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace upress {

void SftSpec::validate() const {
  const int k = transition.size;
  if (k < 1 || k > 64) throw std::invalid_argument("SftSpec: symbol count must lie in [1, 64]");
  if (static_cast<int>(site_potential.size()) != k)
    throw std::invalid_argument("SftSpec: site_potential size must match the symbol count");
  for (double v : transition.data)
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("SftSpec: transition entries must be 0 or 1");
  if (!is_irreducible(transition))
    throw std::invalid_argument("SftSpec: transition matrix must be irreducible");
}

bool is_irreducible(const Matrix& m) {
  const int k = m.size;
  if (k <= 0) return false;
  if (k == 1) return m(0, 0) > 0.0;
  // Strong connectivity of the positivity digraph, one BFS per vertex.
  std::vector<int> stack, seen(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, s);
    seen[static_cast<std::size_t>(s)] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v)
        if (m(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached < k) return false;
  }
  return true;
}

PerronResult perron(const Matrix& m) {
  const int k = m.size;
  if (k < 1) throw std::invalid_argument("perron: empty matrix");
  for (double v : m.data)
    if (!(v >= 0.0)) throw std::invalid_argument("perron: matrix must be nonnegative");
  if (!is_irreducible(m)) throw std::invalid_argument("perron: matrix must be irreducible");

  // Power iteration on M + I; the shift makes periodic transition structures
  // aperiodic without moving the dominant eigenvector.
  std::vector<double> x(static_cast<std::size_t>(k), 1.0 / std::sqrt(static_cast<double>(k)));
  std::vector<double> y(static_cast<std::size_t>(k));
  constexpr int kCap = 100000;
  int it = 0;
  for (; it < kCap; ++it) {
    for (int i = 0; i < k; ++i) {
      double s = x[static_cast<std::size_t>(i)];
      for (int j = 0; j < k; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    double nn = 0.0;
    for (double v : y) nn += v * v;
    nn = std::sqrt(nn);
    double diff = 0.0;
    for (int i = 0; i < k; ++i) {
      const double xi = y[static_cast<std::size_t>(i)] / nn;
      diff = std::max(diff, std::fabs(xi - x[static_cast<std::size_t>(i)]));
      x[static_cast<std::size_t>(i)] = xi;
    }
    if (diff <= 1e-15) break;
  }
  if (it >= kCap) throw std::runtime_error("perron: power iteration did not converge");

  // Rayleigh quotient of the unshifted matrix at the converged vector.
  double num = 0.0, den = 0.0;
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
    num += x[static_cast<std::size_t>(i)] * s;
    den += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  }
  return {num / den, x, it + 1};
}

double sft_pressure(const SftSpec& sft) {
  sft.validate();
  const int k = sft.transition.size;
  Matrix m = Matrix::zero(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      m(i, j) = sft.transition(i, j) * std::exp(sft.site_potential[static_cast<std::size_t>(i)]);
  return std::log(perron(m).eigenvalue);
}

double convexity_slack(const std::vector<double>& p, const std::vector<double>& a) {
  if (p.size() != a.size() || p.empty())
    throw std::invalid_argument("convexity_slack: p and a must have equal, nonzero length");
  double s = 0.0;
  for (double pi : p) {
    if (pi < 0.0 || pi > 1.0)
      throw std::invalid_argument("convexity_slack: p entries must lie in [0, 1]");
    s += pi;
  }
  if (!(s > 0.0)) throw std::invalid_argument("convexity_slack: sum of p must be positive");

  double amax = a[0];
  for (double ai : a) amax = std::max(amax, ai);
  double expsum = 0.0;
  for (double ai : a) expsum += std::exp(ai - amax);
  const double log_sum_exp = amax + std::log(expsum);

  double lhs = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) lhs += p[i] * (a[i] - std::log(p[i]));
  return s * (log_sum_exp - std::log(s)) - lhs;
}

}  // namespace upress
