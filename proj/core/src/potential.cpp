#include "upress/potential.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "upress/rng.hpp"

namespace upress {

Potential Potential::constant(double c) {
  Potential p;
  p.kind_ = Kind::Constant;
  p.value_ = c;
  return p;
}

Potential Potential::trig(std::vector<TrigTerm> terms) {
  Potential p;
  p.kind_ = Kind::TrigPoly;
  p.terms_ = std::move(terms);
  return p;
}

Potential Potential::geometric() {
  Potential p;
  p.kind_ = Kind::Geometric;
  return p;
}

Potential Potential::affine(Potential base, Potential direction, double t) {
  Potential p;
  p.kind_ = Kind::Affine;
  p.base_ = std::make_shared<const Potential>(std::move(base));
  p.direction_ = std::make_shared<const Potential>(std::move(direction));
  p.t_ = t;
  return p;
}

namespace {

double eval_trig(const std::vector<TrigTerm>& terms, const TorusPoint& x) {
  double sum = 0.0;
  for (const TrigTerm& t : terms) {
    for (int i = x.dim; i < 3; ++i)
      if (t.freq[static_cast<std::size_t>(i)] != 0)
        throw std::invalid_argument("Potential: trig frequency exceeds system dimension");
    double arg = 0.0;
    for (int i = 0; i < x.dim; ++i) arg += t.freq[static_cast<std::size_t>(i)] * x[i];
    arg *= kTwoPi;
    sum += t.cos_coeff * std::cos(arg) + t.sin_coeff * std::sin(arg);
  }
  return sum;
}

}  // namespace

double Potential::eval_with_expansion(const SystemSpec& system, const TorusPoint& x,
                                      double expansion) const {
  switch (kind_) {
    case Kind::Constant: return value_;
    case Kind::TrigPoly: return eval_trig(terms_, x);
    case Kind::Geometric: return -std::log(expansion);
    case Kind::Affine:
      return base_->eval_with_expansion(system, x, expansion) +
             t_ * direction_->eval_with_expansion(system, x, expansion);
  }
  return 0.0;
}

double Potential::eval(const SystemSpec& system, const TorusPoint& x) const {
  double expansion = 1.0;
  if (uses_geometry()) expansion = expansion_factor(system, x);
  return eval_with_expansion(system, x, expansion);
}

bool Potential::is_zero() const {
  switch (kind_) {
    case Kind::Constant: return value_ == 0.0;
    case Kind::TrigPoly: {
      for (const TrigTerm& t : terms_)
        if (t.cos_coeff != 0.0 || t.sin_coeff != 0.0) return false;
      return true;
    }
    case Kind::Geometric: return false;
    case Kind::Affine: return base_->is_zero() && (t_ == 0.0 || direction_->is_zero());
  }
  return false;
}

bool Potential::uses_geometry() const {
  switch (kind_) {
    case Kind::Geometric: return true;
    case Kind::Affine:
      return base_->uses_geometry() || (t_ != 0.0 && direction_->uses_geometry());
    default: return false;
  }
}

double Potential::geometric_coefficient() const {
  switch (kind_) {
    case Kind::Geometric: return 1.0;
    case Kind::Affine:
      return base_->geometric_coefficient() + t_ * direction_->geometric_coefficient();
    default: return 0.0;
  }
}

double Potential::eval_nongeometric(const SystemSpec& system, const TorusPoint& x) const {
  switch (kind_) {
    case Kind::Constant: return value_;
    case Kind::TrigPoly: return eval_trig(terms_, x);
    case Kind::Geometric: return 0.0;
    case Kind::Affine:
      return base_->eval_nongeometric(system, x) +
             t_ * direction_->eval_nongeometric(system, x);
  }
  return 0.0;
}

bool Potential::nongeometric_is_zero() const {
  switch (kind_) {
    case Kind::Constant: return value_ == 0.0;
    case Kind::TrigPoly: {
      for (const TrigTerm& t : terms_)
        if (t.cos_coeff != 0.0 || t.sin_coeff != 0.0) return false;
      return true;
    }
    case Kind::Geometric: return true;
    case Kind::Affine:
      return base_->nongeometric_is_zero() && (t_ == 0.0 || direction_->nongeometric_is_zero());
  }
  return true;
}

int Potential::max_theta_frequency() const {
  switch (kind_) {
    case Kind::TrigPoly: {
      int m = 0;
      for (const TrigTerm& t : terms_) m = std::max(m, std::abs(t.freq[2]));
      return m;
    }
    case Kind::Affine:
      return std::max(base_->max_theta_frequency(), direction_->max_theta_frequency());
    default: return 0;
  }
}

Potential Potential::composed_with_map(const SystemSpec& system) const {
  if (!system.linear_fiber())
    throw std::invalid_argument(
        "composed_with_map: closed-form composition needs a linear fiber map");
  switch (kind_) {
    case Kind::Constant: return *this;
    case Kind::Geometric: return *this;  // constant expansion along E^u
    case Kind::Affine:
      return affine(base_->composed_with_map(system), direction_->composed_with_map(system), t_);
    case Kind::TrigPoly: {
      const IMat2& A = system.matrix();
      std::vector<TrigTerm> out;
      out.reserve(terms_.size());
      for (const TrigTerm& t : terms_) {
        TrigTerm nt;
        // Fiber frequencies map through A^T; the rotation adds a fixed phase.
        nt.freq[0] = static_cast<int>(A.a * t.freq[0] + A.c * t.freq[1]);
        nt.freq[1] = static_cast<int>(A.b * t.freq[0] + A.d * t.freq[1]);
        nt.freq[2] = t.freq[2];
        const double phase = kTwoPi * t.freq[2] * system.rotation_angle();
        const double cp = std::cos(phase), sp = std::sin(phase);
        nt.cos_coeff = t.cos_coeff * cp + t.sin_coeff * sp;
        nt.sin_coeff = t.sin_coeff * cp - t.cos_coeff * sp;
        out.push_back(nt);
      }
      return trig(std::move(out));
    }
  }
  return *this;
}

std::optional<Potential> Potential::abs_if_sign_definite(const SystemSpec& system) const {
  constexpr int kSamples = 4096;
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    auto q = quasi_random_point(0x5eedab50u, i, system.dim());
    TorusPoint x{{q[0], q[1], q[2]}, system.dim()};
    const double v = eval(system, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo >= 0.0) return *this;
  if (hi <= 0.0) return scaled(-1.0);
  return std::nullopt;
}

std::string Potential::label() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "const(" << value_ << ")"; break;
    case Kind::Geometric: os << "phi_u"; break;
    case Kind::TrigPoly: {
      os << "trig(";
      bool first = true;
      for (const TrigTerm& t : terms_) {
        if (!first) os << "+";
        first = false;
        os << "[" << t.freq[0] << "," << t.freq[1] << "," << t.freq[2] << "]";
        if (t.cos_coeff != 0.0) os << "c" << t.cos_coeff;
        if (t.sin_coeff != 0.0) os << "s" << t.sin_coeff;
      }
      os << ")";
      break;
    }
    case Kind::Affine:
      os << base_->label() << "+" << t_ << "*" << direction_->label();
      break;
  }
  return os.str();
}

double birkhoff_sum(const SystemSpec& system, const Potential& phi, const TorusPoint& x, int n) {
  if (n < 1) throw std::invalid_argument("birkhoff_sum: n must be >= 1");
  const bool geom = phi.uses_geometry();
  Vec2 v{0.0, 0.0};
  if (geom) v = system.fiber_unstable_direction(x.fiber(), 30);
  TorusPoint cur = x;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double e = 1.0;
    if (geom) {
      Vec2 w = system.fiber_jacobian_lift(cur.fiber()) * v;
      e = norm(w);
      v = {w[0] / e, w[1] / e};
    }
    sum += phi.eval_with_expansion(system, cur, e);
    if (j + 1 < n) cur = apply(system, cur);
  }
  return sum;
}

double sup_norm_sampled(const SystemSpec& system, const Potential& phi, int samples) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    auto q = quasi_random_point(0x5eed5a17u, i, system.dim());
    TorusPoint x{{q[0], q[1], q[2]}, system.dim()};
    m = std::max(m, std::fabs(phi.eval(system, x)));
  }
  return m;
}

double modulus_of_continuity_sampled(const SystemSpec& system, const Potential& phi, double scale,
                                     int samples) {
  SplitMix64 rng(0x5eedc0c0u);
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    auto q = quasi_random_point(0x5eedc0c1u, i, system.dim());
    TorusPoint x{{q[0], q[1], q[2]}, system.dim()};
    // random direction on the sphere of radius <= scale
    double ux = rng.next_unit() * 2.0 - 1.0;
    double uy = rng.next_unit() * 2.0 - 1.0;
    double uz = (system.dim() == 3) ? rng.next_unit() * 2.0 - 1.0 : 0.0;
    double nn = std::sqrt(ux * ux + uy * uy + uz * uz);
    if (nn == 0.0) continue;
    const double r = scale / nn;
    TorusPoint y{{wrap_unit(x[0] + r * ux), wrap_unit(x[1] + r * uy),
                  system.dim() == 3 ? wrap_unit(x[2] + r * uz) : 0.0},
                 system.dim()};
    m = std::max(m, std::fabs(phi.eval(system, x) - phi.eval(system, y)));
  }
  return m;
}

}  // namespace upress
