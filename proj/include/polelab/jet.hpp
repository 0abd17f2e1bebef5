#pragma once

#include <cmath>
#include <stdexcept>

namespace polelab {

// Second-order jet (value, first and second derivative with respect to t).
// Arithmetic propagates the exact product/chain rules; only floating-point
// rounding enters.
struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static constexpr Jet2 constant(double c) { return {c, 0.0, 0.0}; }
  static constexpr Jet2 variable(double t) { return {t, 1.0, 0.0}; }
};

inline Jet2 operator-(const Jet2& x) { return {-x.v, -x.d1, -x.d2}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.v == 0.0) throw std::domain_error("jet: division by zero");
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

// f(u) given f, f', f'' at u.v
inline Jet2 chain(const Jet2& u, double f, double fp, double fpp) {
  return {f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2};
}

inline Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.v);
  return chain(u, e, e, e);
}

inline Jet2 log(const Jet2& u) {
  if (!(u.v > 0.0)) throw std::domain_error("jet: log of nonpositive value");
  return chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}

inline Jet2 sqrt(const Jet2& u) {
  if (u.v < 0.0) throw std::domain_error("jet: sqrt of negative value");
  const double s = std::sqrt(u.v);
  return chain(u, s, 0.5 / s, -0.25 / (s * s * s));
}

inline Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, s, c, -s);
}

inline Jet2 cos(const Jet2& u) {
  const double s = std::sin(u.v), c = std::cos(u.v);
  return chain(u, c, -s, -c);
}

inline Jet2 tanh(const Jet2& u) {
  const double th = std::tanh(u.v);
  const double sech2 = 1.0 - th * th;
  return chain(u, th, sech2, -2.0 * th * sech2);
}

inline Jet2 atan(const Jet2& u) {
  const double w = 1.0 + u.v * u.v;
  return chain(u, std::atan(u.v), 1.0 / w, -2.0 * u.v / (w * w));
}

// Constant exponent only; exponents 0 and 1 are handled exactly so that
// e.g. t^1 has a finite second derivative at t = 0.
inline Jet2 pow(const Jet2& u, double c) {
  if (c == 0.0) return Jet2::constant(1.0);
  if (c == 1.0) return u;
  if (u.v < 0.0 && c != std::floor(c))
    throw std::domain_error("jet: pow of negative base with non-integer exponent");
  const double f = std::pow(u.v, c);
  const double fp = c * std::pow(u.v, c - 1.0);
  const double fpp = c * (c - 1.0) * std::pow(u.v, c - 2.0);
  return chain(u, f, fp, fpp);
}

}  // namespace polelab
