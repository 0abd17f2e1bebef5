#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "polelab/profile.hpp"

namespace polelab {

struct Mat2 {
  double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diagonal(double a, double b) { return {a, 0.0, 0.0, b}; }

  double trace() const { return m00 + m11; }
  double det() const { return m00 * m11 - m01 * m10; }
  double max_abs() const {
    return std::max(std::max(std::abs(m00), std::abs(m01)),
                    std::max(std::abs(m10), std::abs(m11)));
  }
  Mat2 inverse() const {
    const double d = det();
    if (d == 0.0) throw std::domain_error("Mat2: singular matrix");
    return {m11 / d, -m01 / d, -m10 / d, m00 / d};
  }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}
inline Mat2 operator*(double s, const Mat2& a) {
  return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

// d/dt det U = tr(adj(U) U')
inline double det_derivative(const Mat2& u, const Mat2& u1) {
  return u.m11 * u1.m00 - u.m01 * u1.m10 - u.m10 * u1.m01 + u.m00 * u1.m11;
}

// Direction-dependent radial curvature operator R(t, theta): a symmetric 2x2
// matrix field sampled at n_directions representative directions
// theta_j = 2 pi j / n_directions.
struct RadialCurvatureField {
  std::function<Mat2(double t, int direction)> eval;
  int n_directions = 8;
  std::string label;
  bool nonneg_trace = true;  // field claims trace R >= 0 (radial Ricci >= 0)
};

inline RadialCurvatureField isotropic_field(const RadialProfile& profile, int n_directions = 8) {
  RadialCurvatureField f;
  f.n_directions = n_directions;
  f.label = "isotropic:" + unparse(profile.expr);
  const ProfileExpr expr = profile.expr;
  // -phi''/phi has a removable 0/0 at the pole; clamp the sample point.
  f.eval = [expr](double t, int) {
    const double tc = std::max(t, 1e-6);
    const Jet2 p = eval_jet2(expr, tc);
    const double k = -p.d2 / p.v;
    return Mat2::diagonal(k, k);
  };
  return f;
}

inline RadialCurvatureField constant_field(double k, int n_directions = 8) {
  RadialCurvatureField f;
  f.n_directions = n_directions;
  f.label = "constant:" + detail::format_double(k);
  f.nonneg_trace = k >= 0.0;
  f.eval = [k](double, int) { return Mat2::diagonal(k, k); };
  return f;
}

// R(t, theta) = k sech^2(t) diag(1 + b cos theta, 1 - b cos theta). The
// sech^2 envelope keeps k (1 + |b|) <= 2 conjugate-point free on (0, inf):
// u'' + 2 sech^2(t) u = 0 is solved by tanh, and Sturm comparison applies.
inline RadialCurvatureField aniso_field(double k, double b, int n_directions = 8) {
  RadialCurvatureField f;
  f.n_directions = n_directions;
  f.label = "aniso:" + detail::format_double(k) + "," + detail::format_double(b);
  f.nonneg_trace = k >= 0.0;
  const int n = n_directions;
  f.eval = [k, b, n](double t, int direction) {
    const double theta = 2.0 * std::numbers::pi * direction / n;
    const double c = std::cosh(t);
    const double env = k / (c * c);
    return Mat2::diagonal(env * (1.0 + b * std::cos(theta)),
                          env * (1.0 - b * std::cos(theta)));
  };
  return f;
}

// Labels: "isotropic:<profile spec>" | "constant:<k>" | "aniso:<k,b>"
inline RadialCurvatureField make_field(const std::string& label, int n_directions = 8) {
  const auto split = label.find(':');
  if (split == std::string::npos)
    throw std::invalid_argument("field label needs the form kind:args, got '" + label + "'");
  const std::string kind = label.substr(0, split);
  const std::string args = label.substr(split + 1);
  if (kind == "isotropic") {
    RadialCurvatureField f = isotropic_field(parse_profile_spec(args), n_directions);
    f.label = label;
    return f;
  }
  if (kind == "constant") return constant_field(std::stod(args), n_directions);
  if (kind == "aniso") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("aniso field label needs aniso:<k,b>");
    return aniso_field(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)),
                       n_directions);
  }
  throw std::invalid_argument("unknown field kind '" + kind + "'");
}

// One radial Jacobi solution U'' + R U = 0, U(0) = 0, U'(0) = I along a fixed
// direction, on the uniform grid t_k = (k+1) h. The field handle is kept so
// shape data can report trace R and interpolate with U'' = -R U.
struct JacobiSolution {
  RadialCurvatureField field;
  int direction = 0;
  double h = 0.0;
  std::vector<double> t;
  std::vector<Mat2> U;
  std::vector<Mat2> U1;
  std::vector<double> J;  // det U
  std::optional<double> conjugate_point;
};

inline std::optional<double> conjugate_point_scan(const JacobiSolution& sol);

// Classic fixed-step 4th-order integration, started at t0 = h from the Taylor
// seed U(h) = h I - (h^3/6) R(0), U'(h) = I - (h^2/2) R(0) through the
// singular initial condition.
inline JacobiSolution integrate_jacobi(const RadialCurvatureField& field, int direction,
                                       double t_max, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate_jacobi: h must be positive");
  if (!(t_max >= 10.0 * h)) throw std::invalid_argument("integrate_jacobi: t_max must be >= 10h");
  if (direction < 0 || direction >= field.n_directions)
    throw std::invalid_argument("integrate_jacobi: direction index out of range");

  JacobiSolution sol;
  sol.field = field;
  sol.direction = direction;
  sol.h = h;

  const auto steps = static_cast<std::size_t>(std::llround(t_max / h));
  sol.t.reserve(steps);
  sol.U.reserve(steps);
  sol.U1.reserve(steps);
  sol.J.reserve(steps);

  const Mat2 r0 = field.eval(0.0, direction);
  Mat2 u = h * Mat2::identity() - (h * h * h / 6.0) * r0;
  Mat2 v = Mat2::identity() - (h * h / 2.0) * r0;

  const auto push = [&](double t) {
    sol.t.push_back(t);
    sol.U.push_back(u);
    sol.U1.push_back(v);
    sol.J.push_back(u.det());
  };
  push(h);

  Mat2 r_beg = field.eval(h, direction);
  for (std::size_t k = 1; k + 1 <= steps; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const Mat2 r_mid = field.eval(t0 + 0.5 * h, direction);
    const Mat2 r_end = field.eval(t0 + h, direction);

    const Mat2 k1u = v;
    const Mat2 k1v = -1.0 * (r_beg * u);
    const Mat2 k2u = v + (0.5 * h) * k1v;
    const Mat2 k2v = -1.0 * (r_mid * (u + (0.5 * h) * k1u));
    const Mat2 k3u = v + (0.5 * h) * k2v;
    const Mat2 k3v = -1.0 * (r_mid * (u + (0.5 * h) * k2u));
    const Mat2 k4u = v + h * k3v;
    const Mat2 k4v = -1.0 * (r_end * (u + h * k3u));

    u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!std::isfinite(u.max_abs()) || !std::isfinite(v.max_abs()))
      throw std::runtime_error("integrate_jacobi: non-finite state (field blow-up) near t = " +
                               std::to_string(t0 + h));
    push(static_cast<double>(k + 1) * h);
    r_beg = r_end;
  }

  sol.conjugate_point = conjugate_point_scan(sol);
  return sol;
}

namespace detail {

// Cubic Hermite interpolation of W = det U on one grid interval, using the
// exact nodal derivative tr(adj U U').
struct HermiteCubic {
  double t0, t1, w0, w1, d0, d1;
  double operator()(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * w0 + (s3 - 2 * s2 + s) * h * d0 +
           (-2 * s3 + 3 * s2) * w1 + (s3 - s2) * h * d1;
  }
  double derivative(double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * w0 + (3 * s2 - 4 * s + 1) * h * d0 +
            (-6 * s2 + 6 * s) * w1 + (3 * s2 - 2 * s) * h * d1) /
           h;
  }
};

inline HermiteCubic det_cubic(const JacobiSolution& sol, std::size_t k) {
  return {sol.t[k],
          sol.t[k + 1],
          sol.J[k],
          sol.J[k + 1],
          det_derivative(sol.U[k], sol.U1[k]),
          det_derivative(sol.U[k + 1], sol.U1[k + 1])};
}

inline double bisect_root(const HermiteCubic& c, double lo, double hi) {
  double flo = c(lo);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = c(mid);
    if ((flo > 0.0) == (fm > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Location of the minimum of the cubic on [t0, t1], by sign change of the
// (quadratic) derivative.
inline std::optional<std::pair<double, double>> cubic_interior_min(const HermiteCubic& c) {
  if (!(c.derivative(c.t0) < 0.0) || !(c.derivative(c.t1) > 0.0)) return std::nullopt;
  double lo = c.t0, hi = c.t1;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (c.derivative(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double arg = 0.5 * (lo + hi);
  return std::make_pair(arg, c(arg));
}

}  // namespace detail

// Smallest t where det U reaches zero: located by sign change and bisection
// on the Hermite interpolant, plus a touching-zero detector for fields where
// both eigenvalues vanish simultaneously (det U has a double zero there, as
// with sin(t)^2).
inline std::optional<double> conjugate_point_scan(const JacobiSolution& sol) {
  double run_max = 0.0;
  for (std::size_t k = 0; k + 1 < sol.t.size(); ++k) {
    run_max = std::max(run_max, sol.J[k]);
    const auto cubic = detail::det_cubic(sol, k);
    if (sol.J[k] > 0.0 && sol.J[k + 1] <= 0.0)
      return detail::bisect_root(cubic, sol.t[k], sol.t[k + 1]);
    if (const auto m = detail::cubic_interior_min(cubic)) {
      if (m->second <= 1e-8 * std::max(1.0, run_max)) return m->first;
      if (m->second <= 0.0) return detail::bisect_root(cubic, sol.t[k], m->first);
    }
  }
  if (!sol.J.empty() && sol.J.back() <= 0.0) return sol.t.back();
  return std::nullopt;
}

struct ShapeData {
  double lambda1 = 0.0;  // larger eigenvalue of S = U' U^{-1}
  double lambda2 = 0.0;
  double J_over_J = 0.0;  // trace S = J'/J
  double ric_radial = 0.0;  // trace R(t, theta)
};

namespace detail {

inline Mat2 hermite_mat(const Mat2& a, const Mat2& da, const Mat2& b, const Mat2& db,
                        double t0, double t1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * a + ((s3 - 2 * s2 + s) * h) * da +
         (-2 * s3 + 3 * s2) * b + ((s3 - s2) * h) * db;
}

}  // namespace detail

inline ShapeData shape_data(const JacobiSolution& sol, double t) {
  if (sol.conjugate_point && t >= *sol.conjugate_point)
    throw std::domain_error("shape_data: t beyond conjugate point");
  if (t < sol.t.front() || t > sol.t.back() * (1.0 + 1e-12))
    throw std::domain_error("shape_data: t outside solution grid");

  std::size_t k = static_cast<std::size_t>((t - sol.t.front()) / sol.h);
  if (k + 1 >= sol.t.size()) k = sol.t.size() - 2;

  const Mat2 r_k = sol.field.eval(sol.t[k], sol.direction);
  const Mat2 r_k1 = sol.field.eval(sol.t[k + 1], sol.direction);
  const Mat2 u2_k = -1.0 * (r_k * sol.U[k]);
  const Mat2 u2_k1 = -1.0 * (r_k1 * sol.U[k + 1]);

  const Mat2 u = detail::hermite_mat(sol.U[k], sol.U1[k], sol.U[k + 1], sol.U1[k + 1],
                                     sol.t[k], sol.t[k + 1], t);
  const Mat2 u1 = detail::hermite_mat(sol.U1[k], u2_k, sol.U1[k + 1], u2_k1,
                                      sol.t[k], sol.t[k + 1], t);

  const Mat2 s = u1 * u.inverse();
  const double tr = s.trace();
  const double disc = 0.25 * tr * tr - s.det();
  const double root = std::sqrt(std::max(0.0, disc));

  ShapeData d;
  d.lambda1 = 0.5 * tr + root;
  d.lambda2 = 0.5 * tr - root;
  d.J_over_J = tr;
  d.ric_radial = sol.field.eval(t, sol.direction).trace();
  return d;
}

// det U at an off-grid radius, Hermite-interpolated.
inline double jacobian_at(const JacobiSolution& sol, double t) {
  if (t < sol.t.front() || t > sol.t.back() * (1.0 + 1e-12))
    throw std::domain_error("jacobian_at: t outside solution grid");
  std::size_t k = static_cast<std::size_t>((t - sol.t.front()) / sol.h);
  if (k + 1 >= sol.t.size()) k = sol.t.size() - 2;
  return detail::det_cubic(sol, k)(t);
}

}  // namespace polelab
