#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <vector>

#include "polelab/extrapolate.hpp"
#include "polelab/integrals.hpp"
#include "polelab/jacobi.hpp"

namespace polelab {

struct InequalityViolation {
  std::string inequality;
  std::vector<double> inputs;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct InequalityReport {
  std::string name;
  std::int64_t samples = 0;
  // min over samples of RHS - LHS, raw and scale-normalized
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_scaled_margin = std::numeric_limits<double>::infinity();
  double max_scaled_margin = -std::numeric_limits<double>::infinity();
  std::vector<InequalityViolation> violations;

  bool passed() const { return violations.empty(); }

  void add(const char* inequality, std::initializer_list<double> inputs, double lhs, double rhs,
           double scale, double tolerance) {
    ++samples;
    const double margin = rhs - lhs;
    const double scaled = margin / scale;
    worst_margin = std::min(worst_margin, margin);
    worst_scaled_margin = std::min(worst_scaled_margin, scaled);
    max_scaled_margin = std::max(max_scaled_margin, scaled);
    if (scaled < -tolerance) violations.push_back({inequality, inputs, lhs, rhs});
  }
};

// Theorem check: for s >= t > 0 on a pole manifold with Rc >= 0,
//   J(s)/J(t) <= (s/t)^2,  J'/J(t) <= 2/t,  J(t) <= t^2,
//   V(B(s))/V(B(t)) <= (s/t)^3,  V(B(t)) <= omega3 t^3.
inline InequalityReport check_bishop_gromov(const WarpedManifold& m,
                                            std::span<const std::pair<double, double>> pairs,
                                            double tolerance = 1e-9, QuadTol quad = {}) {
  if (pairs.empty()) throw std::invalid_argument("check_bishop_gromov: pairs must be nonempty");
  InequalityReport rep;
  rep.name = "bishop_gromov";

  std::map<double, double> volume;
  const auto vol = [&](double r) {
    const auto it = volume.find(r);
    if (it != volume.end()) return it->second;
    const double v = ball_volume(m, r, quad);
    volume.emplace(r, v);
    return v;
  };

  for (const auto& [t, s] : pairs) {
    if (!(s >= t && t > 0.0))
      throw std::invalid_argument("check_bishop_gromov: pairs need s >= t > 0");
    const PointQuantities qt = point_curvatures(m, t);
    const PointQuantities qs = point_curvatures(m, s);

    const double ratio2 = (s / t) * (s / t);
    rep.add("J(s)/J(t) <= (s/t)^2", {t, s}, qs.J / qt.J, ratio2,
            std::max(1.0, ratio2), tolerance);
    rep.add("J'/J <= 2/t", {t, s}, 2.0 * qt.lambda, 2.0 / t, std::max(1.0, 2.0 / t), tolerance);
    rep.add("J <= t^2", {t, s}, qt.J, t * t, std::max(1.0, t * t), tolerance);
    const double vt = vol(t), vs = vol(s);
    const double ratio3 = ratio2 * (s / t);
    rep.add("V(s)/V(t) <= (s/t)^3", {t, s}, vs / vt, ratio3, std::max(1.0, ratio3), tolerance);
    const double wt = omega3 * t * t * t;
    rep.add("V(t) <= omega3 t^3", {t, s}, vt, wt, std::max(1.0, wt), tolerance);
  }
  return rep;
}

// 0 <= J'/J <= 2/t, margins scaled by t so tolerance is absolute on t*margin.
inline InequalityReport check_slope_bound(const WarpedManifold& m, std::span<const double> grid,
                                          double tolerance = 1e-9) {
  InequalityReport rep;
  rep.name = "slope_bound";
  for (const double t : grid) {
    const double slope = 2.0 * point_curvatures(m, t).lambda;  // J'/J, Calabi trace form
    rep.add("J'/J >= 0", {t}, 0.0, slope, 1.0 / t, tolerance);
    rep.add("J'/J <= 2/t", {t}, slope, 2.0 / t, 1.0 / t, tolerance);
  }
  return rep;
}

// Same bounds along one Jacobi solution; grid points at or past a conjugate
// point are skipped (the bound is a statement about pole manifolds).
inline InequalityReport check_slope_bound(const JacobiSolution& sol, std::span<const double> grid,
                                          double tolerance = 1e-9) {
  InequalityReport rep;
  rep.name = "slope_bound:" + sol.field.label;
  for (const double t : grid) {
    if (t < sol.t.front() || t > sol.t.back()) continue;
    if (sol.conjugate_point && t >= *sol.conjugate_point) break;
    const double slope = shape_data(sol, t).J_over_J;
    rep.add("J'/J >= 0", {t}, 0.0, slope, 1.0 / t, tolerance);
    rep.add("J'/J <= 2/t", {t}, slope, 2.0 / t, 1.0 / t, tolerance);
  }
  return rep;
}

// Per-direction Jacobian comparisons for one solution.
inline InequalityReport check_jacobian_comparison(const JacobiSolution& sol,
                                                  std::span<const std::pair<double, double>> pairs,
                                                  double tolerance = 1e-8) {
  InequalityReport rep;
  rep.name = "jacobian_comparison:" + sol.field.label;
  for (const auto& [t, s] : pairs) {
    if (t < sol.t.front() || s > sol.t.back()) continue;
    if (sol.conjugate_point && s >= *sol.conjugate_point) continue;
    const double jt = jacobian_at(sol, t);
    const double js = jacobian_at(sol, s);
    const double ratio2 = (s / t) * (s / t);
    rep.add("J(s)/J(t) <= (s/t)^2", {t, s}, js / jt, ratio2, std::max(1.0, ratio2), tolerance);
    rep.add("J <= t^2", {t, s}, jt, t * t, std::max(1.0, t * t), tolerance);
  }
  return rep;
}

// Mean-value radii: A'(b_s) matches the difference quotient of A over
// [(1-eps)s, s], and A'(c_s) the one over [s, (1+eps)s].
struct MeanValueRadii {
  double s = 0.0;
  double eps = 0.0;
  double b_s = 0.0;
  double c_s = 0.0;
  double slope_b = 0.0;
  double slope_c = 0.0;
};

namespace detail {

// Smallest root of A'(x) = target in [lo, hi]: 64-interval scan for the first
// sign change, then bisection to width 1e-12 * s.
inline double smallest_slope_root(const WarpedManifold& m, double lo, double hi, double target,
                                  double s) {
  const auto g = [&](double x) { return sphere_area_and_derivative(m, x).A1 - target; };
  constexpr int scan = 64;
  double x_prev = lo;
  double g_prev = g(lo);
  for (int i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / scan;
    const double gx = g(x);
    // exact interior root; also the degenerate case where A' - target
    // vanishes identically at this precision (saturated profiles)
    if (gx == 0.0 && i < scan) return x;
    if ((g_prev < 0.0) != (gx < 0.0)) {
      double a = x_prev, b = x, ga = g_prev;
      while (b - a > 1e-12 * s) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if ((ga < 0.0) == (gm < 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    x_prev = x;
    g_prev = gx;
  }
  std::ostringstream msg;
  msg << "mean_value_radii: no sign change of A'(x) - " << target << " in [" << lo << ", " << hi
      << "]; sampled endpoints g(lo) = " << g(lo) << ", g(hi) = " << g(hi);
  throw diagnostic_error(msg.str());
}

}  // namespace detail

inline MeanValueRadii mean_value_radii(const WarpedManifold& m, double s, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("mean_value_radii: eps must lie in (0, 1)");
  if (!((1.0 + eps) * s <= m.t_max()))
    throw std::invalid_argument("mean_value_radii: (1+eps) s exceeds t_max");
  m.require_radius(s);

  MeanValueRadii out;
  out.s = s;
  out.eps = eps;
  const double area_lo = sphere_area_and_derivative(m, (1.0 - eps) * s).A;
  const double area_s = sphere_area_and_derivative(m, s).A;
  const double area_hi = sphere_area_and_derivative(m, (1.0 + eps) * s).A;
  out.slope_b = (area_s - area_lo) / (eps * s);
  out.slope_c = (area_hi - area_s) / (eps * s);
  out.b_s = detail::smallest_slope_root(m, (1.0 - eps) * s, s, out.slope_b, s);
  out.c_s = detail::smallest_slope_root(m, s, (1.0 + eps) * s, out.slope_c, s);
  return out;
}

// The annulus sequences (1/s) int_{A(a, c_s)} (-J''/J) and the b_s analogue,
// with extrapolated limits. For Rc >= 0 these converge to
// 4 pi V (-2 - eps) and 4 pi V (-2 + eps).
struct AnnulusLimitSequences {
  ConvergenceReport upper;  // c_s side
  ConvergenceReport lower;  // b_s side
};

inline AnnulusLimitSequences annulus_limit_sequences(const WarpedManifold& m, double a, double eps,
                                                     std::span<const double> s_sequence,
                                                     QuadTol quad = {}) {
  if (!(a > 0.0)) throw std::invalid_argument("annulus_limit_sequences: a must be positive");
  std::vector<ConvergenceSample> upper, lower;
  upper.reserve(s_sequence.size());
  lower.reserve(s_sequence.size());
  for (const double s : s_sequence) {
    if (!(a < (1.0 - eps) * s))
      throw std::invalid_argument("annulus_limit_sequences: requires a < (1-eps) s");
    const MeanValueRadii mv = mean_value_radii(m, s, eps);
    upper.push_back({s, annulus_neg_jpp_integral(m, a, mv.c_s, quad) / s});
    lower.push_back({s, annulus_neg_jpp_integral(m, a, mv.b_s, quad) / s});
  }
  return {extrapolate_report(std::move(upper)), extrapolate_report(std::move(lower))};
}

// Log-spaced (t, s = min(mult * t, hi)) comparison pairs.
inline std::vector<std::pair<double, double>> log_spaced_pairs(double lo, double hi, int n,
                                                               double mult = 3.0) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (const double t : geometric_grid(lo, hi, n)) pairs.emplace_back(t, std::min(mult * t, hi));
  return pairs;
}

}  // namespace polelab
