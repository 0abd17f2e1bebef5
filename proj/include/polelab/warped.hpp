#pragma once

#include <numbers>
#include <stdexcept>
#include <utility>

#include "polelab/profile.hpp"

namespace polelab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double omega3 = 4.0 * std::numbers::pi / 3.0;  // unit 3-ball volume

// g = dr^2 + phi(r)^2 g_{S^2}. Closed forms used throughout:
//   J = phi^2, J' = 2 phi phi', J'' = 2 phi'^2 + 2 phi phi''
//   lambda_1 = lambda_2 = phi'/phi
//   Rc(radial)     = -2 phi''/phi
//   Rc(tangential) = -phi''/phi + (1 - phi'^2)/phi^2
//   R              = -4 phi''/phi + 2 (1 - phi'^2)/phi^2
//   R(sphere)      = 2/phi^2
//   A = 4 pi phi^2, A' = 8 pi phi phi'
class WarpedManifold {
 public:
  explicit WarpedManifold(RadialProfile profile) : profile_(std::move(profile)) {
    if (!profile_.validation.passed)
      throw std::invalid_argument("WarpedManifold: profile failed pole validation");
  }

  // Escape hatch for negative-control experiments on invalid profiles.
  static WarpedManifold unchecked(RadialProfile profile) {
    return WarpedManifold(std::move(profile), unchecked_tag{});
  }

  const RadialProfile& profile() const { return profile_; }
  double t_max() const { return profile_.t_max; }

  void require_radius(double t) const {
    if (!(t > 0.0) || !(t <= profile_.t_max))
      throw std::domain_error("radius outside (0, t_max]");
  }

  // Unchecked evaluation; integrands may touch t = 0.
  Jet2 warp(double t) const { return eval_jet2(profile_.expr, t); }

  Jet2 warp_checked(double t) const {
    require_radius(t);
    return warp(t);
  }

 private:
  struct unchecked_tag {};
  WarpedManifold(RadialProfile profile, unchecked_tag) : profile_(std::move(profile)) {}
  RadialProfile profile_;
};

struct JacobianData {
  double J = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
};

inline JacobianData jacobian_data(const WarpedManifold& m, double t) {
  const Jet2 p = m.warp_checked(t);
  return {p.v * p.v, 2.0 * p.v * p.d1, 2.0 * (p.d1 * p.d1 + p.v * p.d2)};
}

struct PointQuantities {
  double t = 0.0;
  double J = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
  double lambda = 0.0;
  double ric_radial = 0.0;
  double ric_tangential = 0.0;
  double R = 0.0;
  double R_sphere = 0.0;
};

inline PointQuantities point_curvatures(const WarpedManifold& m, double t) {
  const Jet2 p = m.warp_checked(t);
  PointQuantities q;
  q.t = t;
  q.J = p.v * p.v;
  q.J1 = 2.0 * p.v * p.d1;
  q.J2 = 2.0 * (p.d1 * p.d1 + p.v * p.d2);
  q.lambda = p.d1 / p.v;
  q.ric_radial = -2.0 * p.d2 / p.v;
  const double k_tan = (1.0 - p.d1 * p.d1) / (p.v * p.v);
  q.ric_tangential = -p.d2 / p.v + k_tan;
  q.R = -4.0 * p.d2 / p.v + 2.0 * k_tan;
  q.R_sphere = 2.0 / (p.v * p.v);
  return q;
}

// R - (R_sphere + 2 Rc(radial) - 2 lambda^2); identically zero in exact
// arithmetic, so the returned value is pure rounding residue.
inline double gauss_codazzi_residual(const WarpedManifold& m, double t) {
  const PointQuantities q = point_curvatures(m, t);
  return q.R - (q.R_sphere + 2.0 * q.ric_radial - 2.0 * q.lambda * q.lambda);
}

struct SphereArea {
  double A = 0.0;
  double A1 = 0.0;
};

inline SphereArea sphere_area_and_derivative(const WarpedManifold& m, double t) {
  const Jet2 p = m.warp_checked(t);
  return {4.0 * pi * p.v * p.v, 8.0 * pi * p.v * p.d1};
}

}  // namespace polelab
