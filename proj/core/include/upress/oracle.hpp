// Exact reference values: transfer-matrix pressure for subshifts of finite
// type, dominant eigenpairs of nonnegative matrices, and the weighted
// log-sum-exp convexity inequality.
#pragma once

#include <vector>

namespace upress {

/// Square nonnegative matrix, row major.
struct Matrix {
  int size = 0;
  std::vector<double> data;

  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) +
                static_cast<std::size_t>(j)];
  }
  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) +
                static_cast<std::size_t>(j)];
  }
  static Matrix zero(int k) { return Matrix{k, std::vector<double>(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0.0)}; }
};

/// Subshift of finite type with a locally constant (per-symbol) potential.
struct SftSpec {
  Matrix transition;                  // 0/1 entries, irreducible, size <= 64
  std::vector<double> site_potential;  // one value per symbol

  void validate() const;
};

struct PerronResult {
  double eigenvalue = 0.0;
  std::vector<double> eigenvector;  // positive, unit L2 norm
  int iterations = 0;
};

/// Dominant eigenpair of a nonnegative irreducible matrix, to 1e-12.
PerronResult perron(const Matrix& m);

/// Classical pressure log(spectral radius) of M_ij = transition_ij * exp(potential_i).
double sft_pressure(const SftSpec& sft);

/// RHS - LHS of  sum p_i (a_i - log p_i) <= s (log sum e^{a_i} - log s),
/// s = sum p_i; zero p_i contribute nothing. Nonnegative; zero exactly when
/// p is proportional to the Gibbs weights e^{a_i}.
double convexity_slack(const std::vector<double>& p, const std::vector<double>& a);

bool is_irreducible(const Matrix& m);

}  // namespace upress
