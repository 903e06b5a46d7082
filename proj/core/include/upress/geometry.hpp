// Flat-torus geometry: wrapped points, lifts, and small fixed-size matrices.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace upress {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double t, Vec2 a) { return {t * a[0], t * a[1]}; }
inline double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm_sq(Vec2 a) { return a[0] * a[0] + a[1] * a[1]; }
inline double norm(Vec2 a) { return std::sqrt(norm_sq(a)); }

/// Reduce a real to its mod-1 representative in [0,1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guards against floor rounding for tiny negatives
  return r;
}

/// Distance on the circle R/Z between two representatives in [0,1).
inline double circle_distance(double a, double b) {
  double w = std::fabs(a - b);
  return std::min(w, 1.0 - w);
}

/// A point on T^2 or T^3 with coordinates reduced mod 1.
struct TorusPoint {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 2;

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  static TorusPoint wrapped2(double x, double y) {
    return TorusPoint{{wrap_unit(x), wrap_unit(y), 0.0}, 2};
  }
  static TorusPoint wrapped3(double x, double y, double theta) {
    return TorusPoint{{wrap_unit(x), wrap_unit(y), wrap_unit(theta)}, 3};
  }

  Vec2 fiber() const { return {c[0], c[1]}; }
  double theta() const { return c[2]; }
};

/// Flat metric on the torus (min over deck translations in each coordinate).
inline double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim != b.dim) throw std::invalid_argument("torus_distance: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    double w = circle_distance(a[i], b[i]);
    s += w * w;
  }
  return std::sqrt(s);
}

/// 2x2 real matrix, row major: [[a,b],[c,d]].
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;

  Vec2 operator*(Vec2 v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  double det() const { return a * d - b * c; }
};

/// 2x2 integer matrix for the toral automorphism and its exact inverse.
struct IMat2 {
  long long a = 0, b = 0, c = 0, d = 0;

  long long det() const { return a * d - b * c; }
  long long trace() const { return a + d; }
  Mat2 real() const {
    return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
            static_cast<double>(d)};
  }
  /// Exact integer inverse; valid only when |det| = 1.
  IMat2 unimodular_inverse() const {
    long long D = det();
    if (D != 1 && D != -1) throw std::invalid_argument("unimodular_inverse: |det| != 1");
    return {d / D, -b / D, -c / D, a / D};
  }
  IMat2 operator*(const IMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const IMat2& o) const = default;
};

/// Dense dim x dim Jacobian (dim = 2 or 3), row major.
struct SquareMatrix {
  int dim = 2;
  std::array<std::array<double, 3>, 3> m{};

  double operator()(int i, int j) const {
    return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  double& operator()(int i, int j) {
    return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

}  // namespace upress
