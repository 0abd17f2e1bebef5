#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polelab {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = true;  // false when the subdivision depth limit was hit
};

struct quadrature_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss 7 / Kronrod 15 on [-1, 1] (QUADPACK abscissae and weights).
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk_weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15_panel(F& f, double a, double b, double& k15, double& g7, std::int64_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto sample = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y))
      throw quadrature_error("non-finite integrand sample at t = " + std::to_string(x));
    ++evals;
    return y;
  };
  const double fc = sample(center);
  double acc_k = gk_weights[7] * fc;
  double acc_g = gauss_weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * gk_nodes[i];
    const double pair = sample(center - dx) + sample(center + dx);
    acc_k += gk_weights[i] * pair;
    if (i % 2 == 1) acc_g += gauss_weights[i / 2] * pair;
  }
  k15 = acc_k * half;
  g7 = acc_g * half;
}

}  // namespace detail

// Adaptive bisection with a 15-point rule and the embedded 7-point rule as
// error estimate. Each panel gets an error budget proportional to its width;
// panels are processed left to right and summed serially, so results are
// deterministic for a fixed integrand.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                              double abs_tol = 1e-12) {
  if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: requires a <= b");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("integrate_adaptive: tolerances must be positive");

  QuadResult out;
  if (a == b) return out;

  constexpr int max_depth = 60;
  const double width = b - a;

  double k15 = 0.0, g7 = 0.0;
  detail::gk15_panel(f, a, b, k15, g7, out.evaluations);
  const double scale = std::abs(k15);

  const auto process = [&](auto&& self, double lo, double hi, double pk, double pg,
                           int depth) -> void {
    const double err = std::abs(pk - pg);
    const double budget = std::max(abs_tol, rel_tol * scale) * ((hi - lo) / width);
    if (err <= budget || depth >= max_depth) {
      out.value += pk;
      out.error_estimate += err;
      if (depth >= max_depth && err > budget) out.converged = false;
      return;
    }
    const double mid = 0.5 * (lo + hi);
    double lk = 0.0, lg = 0.0, rk = 0.0, rg = 0.0;
    detail::gk15_panel(f, lo, mid, lk, lg, out.evaluations);
    detail::gk15_panel(f, mid, hi, rk, rg, out.evaluations);
    self(self, lo, mid, lk, lg, depth + 1);
    self(self, mid, hi, rk, rg, depth + 1);
  };
  process(process, a, b, k15, g7, 0);
  return out;
}

}  // namespace polelab
