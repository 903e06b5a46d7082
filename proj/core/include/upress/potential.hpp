// Potentials on the phase space: constants, trigonometric polynomials, the
// geometric potential -log ||Df|E^u||, and affine combinations of these.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "upress/system.hpp"

namespace upress {

/// One band of a trigonometric polynomial:
///   cos_coeff * cos(2*pi*(freq . x)) + sin_coeff * sin(2*pi*(freq . x)).
struct TrigTerm {
  std::array<int, 3> freq{0, 0, 0};
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

class Potential {
 public:
  enum class Kind { Constant, TrigPoly, Geometric, Affine };

  static Potential constant(double c);
  static Potential trig(std::vector<TrigTerm> terms);
  /// phi^u(x) = -log ||Df|E^u(x)||.
  static Potential geometric();
  /// base(x) + t * direction(x).
  static Potential affine(Potential base, Potential direction, double t);

  Kind kind() const { return kind_; }
  double constant_value() const { return value_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const Potential& base() const { return *base_; }
  const Potential& direction() const { return *direction_; }
  double affine_t() const { return t_; }

  double eval(const SystemSpec& system, const TorusPoint& x) const;

  bool is_zero() const;
  /// True when evaluation needs the unstable direction field.
  bool uses_geometry() const;
  /// Largest |k_theta| over trig terms (0 if theta-independent).
  int max_theta_frequency() const;

  // Every potential here is affine in its geometric slot, so Birkhoff sums
  // factor as S_n(nongeometric) + coeff * (-log ||Df^n|E^u||).
  double geometric_coefficient() const;
  double eval_nongeometric(const SystemSpec& system, const TorusPoint& x) const;
  bool nongeometric_is_zero() const;

  Potential scaled(double t) const { return affine(constant(0.0), *this, t); }
  Potential plus(const Potential& other) const { return affine(*this, other, 1.0); }
  Potential plus_constant(double c) const { return affine(*this, constant(c), 1.0); }

  /// phi o f for linear-fiber systems, where the class is closed under
  /// composition (trig frequencies map through A^T, theta terms pick a phase).
  Potential composed_with_map(const SystemSpec& system) const;

  /// |phi| when phi has a representable absolute value: sign-definite on a
  /// dense deterministic sample. Returns nullopt otherwise.
  std::optional<Potential> abs_if_sign_definite(const SystemSpec& system) const;

  std::string label() const;

  /// eval with a precomputed expansion factor at x (cocycle walkers pass the
  /// pushed value so geometric parts avoid reseeding the direction field).
  double eval_with_expansion(const SystemSpec& system, const TorusPoint& x,
                             double expansion) const;

 private:
  Potential() = default;

  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<TrigTerm> terms_;
  std::shared_ptr<const Potential> base_;
  std::shared_ptr<const Potential> direction_;
  double t_ = 0.0;
};

/// Birkhoff sum S_n phi(x) = sum_{j<n} phi(f^j x). Geometric parts ride the
/// cocycle: the unstable vector is seeded once and pushed along the orbit.
double birkhoff_sum(const SystemSpec& system, const Potential& phi, const TorusPoint& x, int n);

/// sup |phi| over a deterministic low-discrepancy sample of the torus.
double sup_norm_sampled(const SystemSpec& system, const Potential& phi, int samples = 4096);

/// Modulus of continuity sup{|phi(x)-phi(y)| : d(x,y) <= scale}, sampled.
double modulus_of_continuity_sampled(const SystemSpec& system, const Potential& phi, double scale,
                                     int samples = 2048);

}  // namespace upress
