#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polelab {

struct ConvergenceSample {
  double r = 0.0;
  double value = 0.0;
};

// A sampled sequence value(r_k) with an extrapolated limit from the model
// value(r) = limit + c/r, least-squares fitted over the tail half of the
// samples.
struct ConvergenceReport {
  std::vector<ConvergenceSample> samples;
  std::string model = "constant-plus-c-over-r";
  double limit = 0.0;
  double c = 0.0;
  double rms_residual = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

struct LineFit {
  double limit = 0.0;
  double c = 0.0;
  double rms = 0.0;
};

inline LineFit fit_const_plus_c_over_r(std::span<const ConvergenceSample> s) {
  const double n = static_cast<double>(s.size());
  double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (const auto& p : s) {
    const double x = 1.0 / p.r;
    sx += x;
    sxx += x * x;
    sy += p.value;
    sxy += x * p.value;
  }
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 1e-300 * n * (sxx + 1e-300)))
    throw std::invalid_argument("extrapolate_limit: degenerate design matrix");
  LineFit fit;
  fit.limit = (sxx * sy - sx * sxy) / det;
  fit.c = (n * sxy - sx * sy) / det;
  double ss = 0.0;
  for (const auto& p : s) {
    const double resid = fit.limit + fit.c / p.r - p.value;
    ss += resid * resid;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

inline void require_increasing_samples(std::span<const ConvergenceSample> samples) {
  if (samples.size() < 4)
    throw std::invalid_argument("extrapolate_limit: needs at least 4 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].r > samples[i - 1].r))
      throw std::invalid_argument("extrapolate_limit: radii must be strictly increasing");
}

}  // namespace detail

// The error estimate combines the tail-fit residual, the prediction error at
// the last sample, and the drift between the tail fit and the all-sample fit.
inline ConvergenceReport extrapolate_report(std::vector<ConvergenceSample> samples) {
  detail::require_increasing_samples(samples);
  const std::span<const ConvergenceSample> all(samples);
  const auto tail = all.subspan(samples.size() / 2);
  const auto fit_tail = detail::fit_const_plus_c_over_r(tail);
  const auto fit_all = detail::fit_const_plus_c_over_r(all);

  ConvergenceReport rep;
  rep.limit = fit_tail.limit;
  rep.c = fit_tail.c;
  rep.rms_residual = fit_tail.rms;
  const auto& last = samples.back();
  const double pred_err = std::abs(fit_tail.limit + fit_tail.c / last.r - last.value);
  const double drift = std::abs(fit_tail.limit - fit_all.limit);
  rep.error_estimate = std::max({fit_tail.rms, pred_err, drift});
  rep.samples = std::move(samples);
  return rep;
}

inline std::pair<double, double> extrapolate_limit(std::span<const ConvergenceSample> samples) {
  ConvergenceReport rep =
      extrapolate_report(std::vector<ConvergenceSample>(samples.begin(), samples.end()));
  return {rep.limit, rep.error_estimate};
}

}  // namespace polelab
