#pragma once

#include <span>

#include "polelab/comparison.hpp"

namespace polelab {

namespace detail {

inline void require_radii(const WarpedManifold& m, std::span<const double> r_sequence) {
  if (r_sequence.size() < 4)
    throw std::invalid_argument("experiment: needs at least 4 radii");
  double prev = 0.0;
  for (const double r : r_sequence) {
    if (!(r > prev)) throw std::invalid_argument("experiment: radii must be strictly increasing");
    m.require_radius(r);
    prev = r;
  }
}

}  // namespace detail

// Asymptotic volume ratio, estimated two ways:
//   sphere form  A(r) / (4 pi r^2)      (closed form)
//   volume form  Vol(B(r)) / (omega3 r^3)  (quadrature)
// The extrapolated limits must agree within their combined error estimates;
// the sphere form is the quoted value.
struct AvrEstimate {
  ConvergenceReport sphere_form;
  ConvergenceReport volume_form;
  double value() const { return sphere_form.limit; }
};

inline AvrEstimate estimate_avr(const WarpedManifold& m, std::span<const double> r_sequence,
                                QuadTol quad = {}) {
  detail::require_radii(m, r_sequence);
  std::vector<ConvergenceSample> sphere, volume;
  sphere.reserve(r_sequence.size());
  volume.reserve(r_sequence.size());
  for (const double r : r_sequence) {
    const Jet2 p = m.warp(r);
    const double ratio = p.v / r;
    sphere.push_back({r, ratio * ratio});
    volume.push_back({r, ball_volume(m, r, quad) / (omega3 * r * r * r)});
  }
  AvrEstimate est{extrapolate_report(std::move(sphere)), extrapolate_report(std::move(volume))};
  const double gap = std::abs(est.sphere_form.limit - est.volume_form.limit);
  const double allowed = est.sphere_form.error_estimate + est.volume_form.error_estimate +
                         1e-12 * (1.0 + std::abs(est.sphere_form.limit));
  if (!(gap <= allowed)) {
    std::ostringstream msg;
    msg << "estimate_avr: sphere-form limit " << est.sphere_form.limit
        << " and volume-form limit " << est.volume_form.limit
        << " disagree beyond combined error estimates " << allowed;
    throw diagnostic_error(msg.str());
  }
  return est;
}

struct LimitExperiment {
  ConvergenceReport report;
  double predicted = 0.0;
  bool verdict = false;
};

inline bool limit_verdict(double limit, double predicted, double rel = 0.01, double abs = 0.02) {
  return std::abs(limit - predicted) <= std::max(rel * std::abs(predicted), abs);
}

// lim (1/r) int_{B(r)} R against the prediction 8 pi (1 - V). Each sample is
// also checked against the annulus decomposition
//   int_{B(r)} R = int_{B(a)} R + 8 pi (r - a)
//                + int_{A(a,r)} Rc(radial) + int_{A(a,r)} (-J''/J)
// at 1e-8 relative, which exercises the Gauss-Codazzi split end to end.
inline LimitExperiment scalar_integral_experiment(const WarpedManifold& m,
                                                  std::span<const double> r_sequence,
                                                  QuadTol quad = {}, double a = 1.0,
                                                  const AvrEstimate* avr = nullptr) {
  detail::require_radii(m, r_sequence);
  const double ball_a = ball_scalar_integral(m, a, quad);
  std::vector<ConvergenceSample> samples;
  samples.reserve(r_sequence.size());
  for (const double r : r_sequence) {
    const double whole = ball_scalar_integral(m, r, quad);
    if (r > a) {
      const auto ricci = [&m](double t) {
        const Jet2 p = m.warp(t);
        return -8.0 * pi * p.d2 * p.v;
      };
      const double ricci_annulus = integrate_adaptive(ricci, a, r, quad.rel, quad.abs).value;
      const double decomposed = ball_a + 8.0 * pi * (r - a) + ricci_annulus +
                                annulus_neg_jpp_integral(m, a, r, quad);
      if (!(std::abs(whole - decomposed) <= 1e-8 * (1.0 + std::abs(whole)))) {
        std::ostringstream msg;
        msg << "scalar_integral_experiment: ball integral " << whole
            << " disagrees with annulus decomposition " << decomposed << " at r = " << r;
        throw diagnostic_error(msg.str());
      }
    }
    samples.push_back({r, whole / r});
  }
  LimitExperiment out;
  out.report = extrapolate_report(std::move(samples));
  const double v = avr ? avr->value() : estimate_avr(m, r_sequence, quad).value();
  out.predicted = 8.0 * pi * (1.0 - v);
  out.verdict = limit_verdict(out.report.limit, out.predicted);
  return out;
}

// lim A'(s)/s against the prediction 8 pi V.
inline LimitExperiment area_derivative_experiment(const WarpedManifold& m,
                                                  std::span<const double> r_sequence,
                                                  QuadTol quad = {},
                                                  const AvrEstimate* avr = nullptr) {
  detail::require_radii(m, r_sequence);
  std::vector<ConvergenceSample> samples;
  samples.reserve(r_sequence.size());
  for (const double r : r_sequence)
    samples.push_back({r, sphere_area_and_derivative(m, r).A1 / r});
  LimitExperiment out;
  out.report = extrapolate_report(std::move(samples));
  const double v = avr ? avr->value() : estimate_avr(m, r_sequence, quad).value();
  out.predicted = 8.0 * pi * v;
  out.verdict = limit_verdict(out.report.limit, out.predicted);
  return out;
}

// lim (1/r) int_{B(r)} Rc(radial) = 0; samples must also be nonnegative.
inline LimitExperiment radial_ricci_experiment(const WarpedManifold& m,
                                               std::span<const double> r_sequence,
                                               QuadTol quad = {}) {
  detail::require_radii(m, r_sequence);
  std::vector<ConvergenceSample> samples;
  samples.reserve(r_sequence.size());
  bool nonnegative = true;
  for (const double r : r_sequence) {
    const double value = ball_radial_ricci_integral(m, r, quad) / r;
    nonnegative = nonnegative && value >= -1e-10;
    samples.push_back({r, value});
  }
  LimitExperiment out;
  out.report = extrapolate_report(std::move(samples));
  out.predicted = 0.0;
  out.verdict = nonnegative && std::abs(out.report.limit) <= 0.02;
  return out;
}

// Pinching scan: at genuinely curved points the ratio is
// min(Rc eigenvalue) / R; where R t^2 <= 1e-10 the point is flat at scale and
// scores the maximal isotropic value 1/3. The dimensionless predicate keeps
// eps_star exactly invariant under the metric scaling g -> c^2 g.
struct PinchingReport {
  double eps_star = 1.0 / 3.0;
  double argmin_t = 0.0;
  double R_max = 0.0;
  bool flat = true;
};

inline PinchingReport pinching_infimum(const WarpedManifold& m, double t_max, int grid_size = 256) {
  if (grid_size < 64) throw std::invalid_argument("pinching_infimum: grid_size must be >= 64");
  m.require_radius(t_max);
  PinchingReport rep;
  rep.eps_star = std::numeric_limits<double>::infinity();
  for (const double t : geometric_grid(t_max * 1e-4, t_max, grid_size)) {
    const PointQuantities q = point_curvatures(m, t);
    rep.R_max = std::max(rep.R_max, q.R);
    double ratio;
    if (q.R * t * t <= 1e-10) {
      ratio = 1.0 / 3.0;
    } else {
      rep.flat = false;
      ratio = std::min(q.ric_radial, q.ric_tangential) / q.R;
    }
    if (ratio < rep.eps_star) {
      rep.eps_star = ratio;
      rep.argmin_t = t;
    }
  }
  return rep;
}

// Flat iff R vanishes and phi(t) = t on the scan grid.
inline bool flatness_test(const WarpedManifold& m, double t_max, int grid_size = 256) {
  m.require_radius(t_max);
  for (const double t : geometric_grid(t_max * 1e-4, t_max, grid_size)) {
    const PointQuantities q = point_curvatures(m, t);
    if (!(std::abs(q.R) <= 1e-10)) return false;
    const Jet2 p = m.warp(t);
    if (!(std::abs(p.v - t) <= 1e-8 * t)) return false;
  }
  return true;
}

}  // namespace polelab
