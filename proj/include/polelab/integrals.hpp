#pragma once

#include <string>

#include "polelab/quadrature.hpp"
#include "polelab/warped.hpp"

namespace polelab {

struct QuadTol {
  double rel = 1e-10;
  double abs = 1e-12;
};

// Raised when two independent computation paths that must agree do not;
// signals an implementation fault rather than bad input.
struct diagnostic_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All ball integrands below are assembled in measure form (quantity times
// 4 pi phi^2) and reduced so that t = 0 is a regular point of the formula.

// Vol(B(r)) = int_0^r 4 pi phi^2
inline double ball_volume(const WarpedManifold& m, double r, QuadTol tol = {}) {
  m.require_radius(r);
  const auto f = [&m](double t) {
    const Jet2 p = m.warp(t);
    return 4.0 * pi * p.v * p.v;
  };
  return integrate_adaptive(f, 0.0, r, tol.rel, tol.abs).value;
}

// int_{B(r)} R dmu = int_0^r 4 pi (2 - 2 phi'^2 - 4 phi phi'')
inline double ball_scalar_integral(const WarpedManifold& m, double r, QuadTol tol = {}) {
  m.require_radius(r);
  const auto f = [&m](double t) {
    const Jet2 p = m.warp(t);
    return 4.0 * pi * (2.0 - 2.0 * p.d1 * p.d1 - 4.0 * p.v * p.d2);
  };
  return integrate_adaptive(f, 0.0, r, tol.rel, tol.abs).value;
}

// Independent route to the same integral, obtained by parts:
//   int_{B(r)} R = 8 pi r - 16 pi phi'(r) phi(r) + 8 pi int_0^r phi'^2.
// Uses phi and phi' only (no phi''), so it shares no curvature formula with
// ball_scalar_integral.
inline double scalar_integral_closed_form(const WarpedManifold& m, double r, QuadTol tol = {}) {
  m.require_radius(r);
  const Jet2 p = m.warp(r);
  const auto f = [&m](double t) {
    const Jet2 q = m.warp(t);
    return q.d1 * q.d1;
  };
  const double slope_sq = integrate_adaptive(f, 0.0, r, tol.rel, tol.abs).value;
  return 8.0 * pi * r - 16.0 * pi * p.d1 * p.v + 8.0 * pi * slope_sq;
}

// int_{B(r)} Rc(radial) dmu = -8 pi int_0^r phi'' phi; nonnegative whenever
// -phi'' >= 0 and phi > 0.
inline double ball_radial_ricci_integral(const WarpedManifold& m, double r, QuadTol tol = {}) {
  m.require_radius(r);
  const auto f = [&m](double t) {
    const Jet2 p = m.warp(t);
    return -8.0 * pi * p.d2 * p.v;
  };
  return integrate_adaptive(f, 0.0, r, tol.rel, tol.abs).value;
}

// int over the annulus a < t < s of (-J''/J) dmu, computed both by quadrature
// of -8 pi (phi'^2 + phi phi'') and by the closed form A'(a) - A'(s). The two
// must agree to 1e-8 relative; the closed form is returned.
inline double annulus_neg_jpp_integral(const WarpedManifold& m, double a, double s,
                                       QuadTol tol = {}) {
  m.require_radius(a);
  m.require_radius(s);
  if (!(a < s)) throw std::invalid_argument("annulus_neg_jpp_integral: requires a < s");
  const auto f = [&m](double t) {
    const Jet2 p = m.warp(t);
    return -8.0 * pi * (p.d1 * p.d1 + p.v * p.d2);
  };
  const double quad = integrate_adaptive(f, a, s, tol.rel, tol.abs).value;
  const double closed =
      sphere_area_and_derivative(m, a).A1 - sphere_area_and_derivative(m, s).A1;
  if (!(std::abs(quad - closed) <= 1e-8 * (1.0 + std::abs(closed))))
    throw diagnostic_error("annulus_neg_jpp_integral: quadrature " + std::to_string(quad) +
                           " disagrees with closed form " + std::to_string(closed));
  return closed;
}

// int over the annulus of the spheres' intrinsic scalar curvature; the
// integrand (2/phi^2) * 4 pi phi^2 is evaluated literally, so the value being
// 8 pi (s - a) exercises the assembled quantities end to end.
inline double annulus_sphere_scalar_integral(const WarpedManifold& m, double a, double s,
                                             QuadTol tol = {}) {
  m.require_radius(a);
  m.require_radius(s);
  if (!(a < s)) throw std::invalid_argument("annulus_sphere_scalar_integral: requires a < s");
  const auto f = [&m](double t) {
    const Jet2 p = m.warp(t);
    return (2.0 / (p.v * p.v)) * 4.0 * pi * (p.v * p.v);
  };
  return integrate_adaptive(f, a, s, tol.rel, tol.abs).value;
}

}  // namespace polelab
