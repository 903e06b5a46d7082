// Concrete partially hyperbolic map families on T^2 and T^3 = T^2 x S^1:
// a hyperbolic toral automorphism A, A x rigid rotation, and a fiber-perturbed
// variant (A(x,y) + eps * g(x,y), theta + alpha) with trigonometric g.
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "upress/geometry.hpp"

namespace upress {

enum class Family { LinearToral, LinearTimesRotation, PerturbedTimesRotation };

std::string family_name(Family f);

/// Displacement field on the fiber torus:
///   g(x,y) = (s1 * sin(2*pi*x) / (2*pi), s2 * sin(2*pi*y) / (2*pi)),
/// normalized so that max |Dg| = max(|s1|,|s2|).
struct PerturbationShape {
  double s1 = 1.0;
  double s2 = 1.0;
};

class SystemSpec {
 public:
  static SystemSpec linear_toral(IMat2 matrix = default_matrix());
  static SystemSpec linear_times_rotation(double rotation_angle, IMat2 matrix = default_matrix());
  static SystemSpec perturbed_times_rotation(double rotation_angle, double eps_pert,
                                             PerturbationShape shape = {},
                                             IMat2 matrix = default_matrix());

  static IMat2 default_matrix() { return {2, 1, 1, 1}; }

  /// Construction rejects eps_pert * max|s| above this bound; the standard
  /// unstable cone of A stays forward-invariant with margin below it.
  static constexpr double kConePreservationBound = 0.15;

  Family family() const { return family_;  }
  int dim() const { return family_ == Family::LinearToral ? 2 : 3; }
  bool has_rotation() const { return family_ != Family::LinearToral; }
  /// True when the fiber dynamics is exactly the linear automorphism.
  bool linear_fiber() const { return eps_pert_ == 0.0; }

  const IMat2& matrix() const { return matrix_; }
  double rotation_angle() const { return rotation_angle_; }
  double eps_pert() const { return eps_pert_; }
  const PerturbationShape& shape() const { return shape_; }

  /// Moduli of the eigenvalues of A (|lambda_u| > 1 > |lambda_s|).
  double lambda_u() const { return lambda_u_; }
  double lambda_s() const { return lambda_s_; }
  /// Unit unstable eigendirection of A in the fiber.
  Vec2 unstable_eigendirection() const { return v_u_; }

  // Fiber-level dynamics on lifts to R^2 (equivariant under Z^2 translation).
  Vec2 fiber_apply_lift(Vec2 p) const;
  Mat2 fiber_jacobian_lift(Vec2 p) const;
  /// Inverse of the fiber map on wrapped coordinates. For the perturbed family
  /// this runs the fixed-point iteration x <- A^{-1}(y - eps*g(x)) to 1e-13,
  /// capped at 100 iterations; throws std::runtime_error past the cap.
  Vec2 fiber_inverse(Vec2 y_wrapped) const;

  /// Unit unstable direction in the fiber at a wrapped fiber point.
  Vec2 fiber_unstable_direction(Vec2 p_wrapped, int depth) const;

  /// Identifies the system; measures remember the one they were built from.
  std::uint64_t fingerprint() const;

 private:
  SystemSpec() = default;
  void init_derived();

  Family family_ = Family::LinearToral;
  IMat2 matrix_ = default_matrix();
  IMat2 inverse_matrix_{};
  double rotation_angle_ = 0.0;
  double eps_pert_ = 0.0;
  PerturbationShape shape_{};
  double lambda_u_ = 0.0;
  double lambda_s_ = 0.0;
  Vec2 v_u_{};
  double inv_op_norm_ = 0.0;  // ||A^{-1}||_2
};

// Pointwise operations.
TorusPoint apply(const SystemSpec& system, const TorusPoint& x);
TorusPoint inverse(const SystemSpec& system, const TorusPoint& y);
SquareMatrix derivative(const SystemSpec& system, const TorusPoint& x);
/// Unit vector approximating E^u(x), via depth backward steps and a forward
/// cocycle push (exact eigendirection for linear fibers). depth >= 1.
std::array<double, 3> unstable_direction(const SystemSpec& system, const TorusPoint& x,
                                         int depth = 30);
/// ||Df(x) v|| for the unit unstable vector v at x; > 1 on these families.
double expansion_factor(const SystemSpec& system, const TorusPoint& x);

}  // namespace upress
