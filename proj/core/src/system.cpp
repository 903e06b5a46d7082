#include "upress/system.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace upress {

std::string family_name(Family f) {
  switch (f) {
    case Family::LinearToral: return "linear_toral";
    case Family::LinearTimesRotation: return "linear_times_rotation";
    case Family::PerturbedTimesRotation: return "perturbed_times_rotation";
  }
  return "unknown";
}

namespace {

void check_point(const SystemSpec& system, const TorusPoint& x, const char* op) {
  if (x.dim != system.dim())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

Vec2 perturbation(const PerturbationShape& s, Vec2 p) {
  constexpr double inv_two_pi = 1.0 / kTwoPi;
  return {s.s1 * std::sin(kTwoPi * p[0]) * inv_two_pi,
          s.s2 * std::sin(kTwoPi * p[1]) * inv_two_pi};
}

}  // namespace

void SystemSpec::init_derived() {
  const long long D = matrix_.det();
  if (D != 1 && D != -1)
    throw std::invalid_argument("SystemSpec: matrix must have determinant +-1");
  const double T = static_cast<double>(matrix_.trace());
  const double disc = T * T - 4.0 * static_cast<double>(D);
  if (disc <= 0.0)
    throw std::invalid_argument("SystemSpec: matrix eigenvalues must be real and distinct");
  const double root = std::sqrt(disc);
  const double l1 = 0.5 * (T + root);
  const double l2 = 0.5 * (T - root);
  const double lu = (std::fabs(l1) >= std::fabs(l2)) ? l1 : l2;
  const double ls = (std::fabs(l1) >= std::fabs(l2)) ? l2 : l1;
  if (std::fabs(lu) <= 1.0 + 1e-12)
    throw std::invalid_argument("SystemSpec: matrix must be hyperbolic (spectral radius > 1)");
  lambda_u_ = std::fabs(lu);
  lambda_s_ = std::fabs(ls);
  // b != 0 for every hyperbolic unimodular integer matrix, so this is safe.
  Vec2 v{static_cast<double>(matrix_.b), lu - static_cast<double>(matrix_.a)};
  const double nv = norm(v);
  v_u_ = {v[0] / nv, v[1] / nv};
  inverse_matrix_ = matrix_.unimodular_inverse();

  // ||A^{-1}||_2 = 1/sigma_min(A) from the singular values of a 2x2 matrix.
  const double a = static_cast<double>(matrix_.a), b = static_cast<double>(matrix_.b);
  const double c = static_cast<double>(matrix_.c), d = static_cast<double>(matrix_.d);
  const double G = a * a + b * b + c * c + d * d;
  const double sigma_min_sq = 0.5 * (G - std::sqrt(G * G - 4.0));
  inv_op_norm_ = 1.0 / std::sqrt(sigma_min_sq);

  if (eps_pert_ < 0.0) throw std::invalid_argument("SystemSpec: eps_pert must be >= 0");
  const double smax = std::max(std::fabs(shape_.s1), std::fabs(shape_.s2));
  if (eps_pert_ * smax > kConePreservationBound)
    throw std::invalid_argument(
        "SystemSpec: eps_pert * max|shape| exceeds the cone-preservation bound 0.15");
  // Contraction constant of the inverse fixed-point iteration.
  if (eps_pert_ * smax * inv_op_norm_ >= 0.95)
    throw std::invalid_argument("SystemSpec: eps_pert outside the inverse contraction bound");
}

SystemSpec SystemSpec::linear_toral(IMat2 matrix) {
  SystemSpec s;
  s.family_ = Family::LinearToral;
  s.matrix_ = matrix;
  s.init_derived();
  return s;
}

SystemSpec SystemSpec::linear_times_rotation(double rotation_angle, IMat2 matrix) {
  SystemSpec s;
  s.family_ = Family::LinearTimesRotation;
  s.matrix_ = matrix;
  s.rotation_angle_ = rotation_angle;
  s.init_derived();
  return s;
}

SystemSpec SystemSpec::perturbed_times_rotation(double rotation_angle, double eps_pert,
                                                PerturbationShape shape, IMat2 matrix) {
  SystemSpec s;
  s.family_ = Family::PerturbedTimesRotation;
  s.matrix_ = matrix;
  s.rotation_angle_ = rotation_angle;
  s.eps_pert_ = eps_pert;
  s.shape_ = shape;
  s.init_derived();
  return s;
}

Vec2 SystemSpec::fiber_apply_lift(Vec2 p) const {
  const Mat2 A = matrix_.real();
  Vec2 q = A * p;
  if (eps_pert_ != 0.0) {
    Vec2 g = perturbation(shape_, p);
    q[0] += eps_pert_ * g[0];
    q[1] += eps_pert_ * g[1];
  }
  return q;
}

Mat2 SystemSpec::fiber_jacobian_lift(Vec2 p) const {
  Mat2 J = matrix_.real();
  if (eps_pert_ != 0.0) {
    J.a += eps_pert_ * shape_.s1 * std::cos(kTwoPi * p[0]);
    J.d += eps_pert_ * shape_.s2 * std::cos(kTwoPi * p[1]);
  }
  return J;
}

Vec2 SystemSpec::fiber_inverse(Vec2 y) const {
  const Mat2 Ainv = inverse_matrix_.real();
  if (eps_pert_ == 0.0) return {wrap_unit((Ainv * y)[0]), wrap_unit((Ainv * y)[1])};

  // Fixed-point iteration on the lift, seeded with the unperturbed inverse.
  Vec2 x = Ainv * y;
  constexpr int kCap = 100;
  constexpr double kTol = 1e-13;
  for (int k = 0; k < kCap; ++k) {
    Vec2 g = perturbation(shape_, x);
    Vec2 next = Ainv * Vec2{y[0] - eps_pert_ * g[0], y[1] - eps_pert_ * g[1]};
    const double step = std::max(std::fabs(next[0] - x[0]), std::fabs(next[1] - x[1]));
    x = next;
    if (step <= kTol) return {wrap_unit(x[0]), wrap_unit(x[1])};
  }
  throw std::runtime_error("fiber_inverse: fixed-point iteration did not converge");
}

Vec2 SystemSpec::fiber_unstable_direction(Vec2 p, int depth) const {
  if (depth < 1) throw std::invalid_argument("fiber_unstable_direction: depth must be >= 1");
  if (linear_fiber()) return v_u_;

  // Backward orbit, then push the cone seed forward along it.
  std::vector<Vec2> orbit(static_cast<std::size_t>(depth) + 1);
  orbit[0] = p;
  for (int k = 1; k <= depth; ++k)
    orbit[static_cast<std::size_t>(k)] = fiber_inverse(orbit[static_cast<std::size_t>(k - 1)]);
  Vec2 v = v_u_;
  for (int k = depth; k >= 1; --k) {
    Vec2 w = fiber_jacobian_lift(orbit[static_cast<std::size_t>(k)]) * v;
    const double nw = norm(w);
    v = {w[0] / nw, w[1] / nw};
  }
  return v;
}

std::uint64_t SystemSpec::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(family_));
  mix(static_cast<std::uint64_t>(matrix_.a));
  mix(static_cast<std::uint64_t>(matrix_.b));
  mix(static_cast<std::uint64_t>(matrix_.c));
  mix(static_cast<std::uint64_t>(matrix_.d));
  auto bits = [](double x) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    __builtin_memcpy(&u, &x, sizeof(u));
    return u;
  };
  mix(bits(rotation_angle_));
  mix(bits(eps_pert_));
  mix(bits(shape_.s1));
  mix(bits(shape_.s2));
  return h;
}

TorusPoint apply(const SystemSpec& system, const TorusPoint& x) {
  check_point(system, x, "apply");
  Vec2 q = system.fiber_apply_lift(x.fiber());
  if (system.dim() == 2) return TorusPoint::wrapped2(q[0], q[1]);
  return TorusPoint::wrapped3(q[0], q[1], x.theta() + system.rotation_angle());
}

TorusPoint inverse(const SystemSpec& system, const TorusPoint& y) {
  check_point(system, y, "inverse");
  Vec2 p = system.fiber_inverse(y.fiber());
  if (system.dim() == 2) return TorusPoint::wrapped2(p[0], p[1]);
  return TorusPoint::wrapped3(p[0], p[1], y.theta() - system.rotation_angle());
}

SquareMatrix derivative(const SystemSpec& system, const TorusPoint& x) {
  check_point(system, x, "derivative");
  const Mat2 J = system.fiber_jacobian_lift(x.fiber());
  SquareMatrix M;
  M.dim = system.dim();
  M(0, 0) = J.a;
  M(0, 1) = J.b;
  M(1, 0) = J.c;
  M(1, 1) = J.d;
  if (M.dim == 3) M(2, 2) = 1.0;
  return M;
}

std::array<double, 3> unstable_direction(const SystemSpec& system, const TorusPoint& x,
                                         int depth) {
  check_point(system, x, "unstable_direction");
  Vec2 v = system.fiber_unstable_direction(x.fiber(), depth);
  return {v[0], v[1], 0.0};
}

double expansion_factor(const SystemSpec& system, const TorusPoint& x) {
  check_point(system, x, "expansion_factor");
  Vec2 v = system.fiber_unstable_direction(x.fiber(), 30);
  return norm(system.fiber_jacobian_lift(x.fiber()) * v);
}

}  // namespace upress
