#pragma once

#include <chrono>
#include <map>
#include <optional>

#include <json.hpp>

#include "polelab/parallel.hpp"
#include "polelab/theorems.hpp"
#include "polelab/version.hpp"

namespace polelab {

using ordered_json = nlohmann::ordered_json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RSequenceSpec {
  double base = 10.0;
  double factor = 2.0;
  int count = 8;

  std::vector<double> radii() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    double r = base;
    for (int i = 0; i < count; ++i, r *= factor) out.push_back(r);
    return out;
  }
};

struct RiccatiConfig {
  std::string field = "aniso:1,0.5";
  double h = 1e-3;
  double t_max = 50.0;
  int n_directions = 8;
};

struct ExperimentConfig {
  std::string profile_spec = "builtin:euclidean";
  double r_max = 1536.0;  // validated domain bound for the profile
  RSequenceSpec r_sequence;
  double eps = 0.2;  // mean-value epsilon
  double quad_rel_tol = 1e-10;
  double quad_abs_tol = 1e-12;
  std::optional<RiccatiConfig> riccati;
  std::string output_json;     // empty: do not write
  std::string output_csv_dir;  // empty: do not write

  QuadTol quad() const { return {quad_rel_tol, quad_abs_tol}; }

  // Annulus radii: the maximal prefix of the r-sequence whose expanded radius
  // (1+eps)s stays inside the validated domain.
  std::vector<double> annulus_radii() const {
    std::vector<double> out;
    for (const double r : r_sequence.radii())
      if ((1.0 + eps) * r <= r_max) out.push_back(r);
    return out;
  }
};

inline void validate_config(const ExperimentConfig& c) {
  if (c.profile_spec.empty()) throw config_error("config: profile_spec must be nonempty");
  if (!(c.r_max > 0.0)) throw config_error("config: r_max must be positive");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw config_error("config: eps must lie in (0, 1)");
  if (!(c.quad_rel_tol > 0.0 && c.quad_abs_tol > 0.0))
    throw config_error("config: quadrature tolerances must be positive");
  if (c.r_sequence.count < 4) throw config_error("config: r_sequence needs at least 4 radii");
  if (!(c.r_sequence.base > 0.0 && c.r_sequence.factor > 1.0))
    throw config_error("config: r_sequence needs base > 0 and factor > 1");
  const auto radii = c.r_sequence.radii();
  if (!(radii.back() <= c.r_max)) throw config_error("config: r_sequence exceeds r_max");
  if (c.annulus_radii().size() < 4)
    throw config_error("config: fewer than 4 radii satisfy (1+eps) r <= r_max");
  if (c.riccati) {
    if (!(c.riccati->h > 0.0) || !(c.riccati->t_max >= 10.0 * c.riccati->h))
      throw config_error("config: riccati needs h > 0 and t_max >= 10h");
    if (c.riccati->n_directions < 1) throw config_error("config: riccati needs n_directions >= 1");
  }
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig c;
  const auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("profile", c.profile_spec);
  get("r_max", c.r_max);
  get("eps", c.eps);
  get("quad_rel_tol", c.quad_rel_tol);
  get("quad_abs_tol", c.quad_abs_tol);
  if (j.contains("r_sequence")) {
    const auto& r = j.at("r_sequence");
    if (r.contains("base")) c.r_sequence.base = r.at("base").get<double>();
    if (r.contains("factor")) c.r_sequence.factor = r.at("factor").get<double>();
    if (r.contains("count")) c.r_sequence.count = r.at("count").get<int>();
  }
  if (j.contains("riccati") && !j.at("riccati").is_null()) {
    RiccatiConfig rc;
    const auto& r = j.at("riccati");
    if (r.contains("field")) rc.field = r.at("field").get<std::string>();
    if (r.contains("h")) rc.h = r.at("h").get<double>();
    if (r.contains("t_max")) rc.t_max = r.at("t_max").get<double>();
    if (r.contains("n_directions")) rc.n_directions = r.at("n_directions").get<int>();
    c.riccati = rc;
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (o.contains("json")) c.output_json = o.at("json").get<std::string>();
    if (o.contains("csv_dir")) c.output_csv_dir = o.at("csv_dir").get<std::string>();
  }
  validate_config(c);
  return c;
}

inline ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["profile"] = c.profile_spec;
  j["r_max"] = c.r_max;
  j["r_sequence"] = {{"base", c.r_sequence.base},
                     {"factor", c.r_sequence.factor},
                     {"count", c.r_sequence.count}};
  j["eps"] = c.eps;
  j["quad_rel_tol"] = c.quad_rel_tol;
  j["quad_abs_tol"] = c.quad_abs_tol;
  if (c.riccati) {
    j["riccati"] = {{"field", c.riccati->field},
                    {"h", c.riccati->h},
                    {"t_max", c.riccati->t_max},
                    {"n_directions", c.riccati->n_directions}};
  } else {
    j["riccati"] = nullptr;
  }
  j["output"] = {{"json", c.output_json}, {"csv_dir", c.output_csv_dir}};
  return j;
}

struct RiccatiDirectionResult {
  int direction = 0;
  std::optional<double> conjugate_point;
  InequalityReport slope;
  InequalityReport jacobian;
  bool verdict = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  ValidationReport validation;
  bool validation_ok = false;

  std::optional<AvrEstimate> avr;
  std::optional<LimitExperiment> scalar_integral;
  std::optional<LimitExperiment> area_derivative;
  std::optional<LimitExperiment> radial_ricci;
  std::optional<AnnulusLimitSequences> annulus;
  double annulus_predicted_upper = 0.0;
  double annulus_predicted_lower = 0.0;
  bool annulus_verdict = false;
  std::optional<InequalityReport> bishop_gromov;
  std::optional<InequalityReport> slope_bound;
  std::optional<PinchingReport> pinching;
  std::optional<bool> flat;
  std::vector<RiccatiDirectionResult> riccati;

  std::vector<std::pair<std::string, bool>> verdicts;
  double elapsed_seconds = 0.0;
  std::string version{k_version};
  std::string determinism_hash;

  bool all_verdicts_pass() const {
    for (const auto& [name, ok] : verdicts)
      if (!ok) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

inline ordered_json to_json(const ConvergenceReport& r) {
  ordered_json samples = ordered_json::array();
  for (const auto& s : r.samples) samples.push_back({s.r, s.value});
  return {{"samples", samples}, {"model", r.model},      {"limit", r.limit},
          {"c", r.c},           {"rms_residual", r.rms_residual},
          {"error_estimate", r.error_estimate}};
}

inline ordered_json to_json(const InequalityReport& r) {
  ordered_json violations = ordered_json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"inequality", v.inequality},
                          {"inputs", v.inputs},
                          {"lhs", v.lhs},
                          {"rhs", v.rhs}});
  return {{"name", r.name},
          {"samples", r.samples},
          {"worst_margin", r.worst_margin},
          {"worst_scaled_margin", r.worst_scaled_margin},
          {"max_scaled_margin", r.max_scaled_margin},
          {"violations", violations},
          {"passed", r.passed()}};
}

inline ordered_json to_json(const ValidationReport& r) {
  ordered_json failures = ordered_json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"condition", f.condition}, {"t", f.t}, {"measured", f.measured}});
  return {{"passed", r.passed}, {"failures", failures}, {"grid", r.grid}};
}

inline ordered_json limit_to_json(const LimitExperiment& e) {
  return {{"report", to_json(e.report)}, {"predicted", e.predicted}, {"verdict", e.verdict}};
}

}  // namespace detail

inline ordered_json report_to_json(const ExperimentReport& rep, bool include_timing = true) {
  ordered_json j;
  j["version"] = rep.version;
  j["config"] = config_to_json(rep.config);
  j["validation"] = detail::to_json(rep.validation);
  ordered_json suites = ordered_json::object();
  if (rep.avr) {
    suites["avr"] = {{"sphere_form", detail::to_json(rep.avr->sphere_form)},
                     {"volume_form", detail::to_json(rep.avr->volume_form)},
                     {"value", rep.avr->value()}};
  }
  if (rep.scalar_integral) suites["scalar_integral"] = detail::limit_to_json(*rep.scalar_integral);
  if (rep.area_derivative) suites["area_derivative"] = detail::limit_to_json(*rep.area_derivative);
  if (rep.radial_ricci) suites["radial_ricci"] = detail::limit_to_json(*rep.radial_ricci);
  if (rep.annulus) {
    suites["annulus_limits"] = {{"upper", detail::to_json(rep.annulus->upper)},
                                {"predicted_upper", rep.annulus_predicted_upper},
                                {"lower", detail::to_json(rep.annulus->lower)},
                                {"predicted_lower", rep.annulus_predicted_lower},
                                {"verdict", rep.annulus_verdict}};
  }
  if (rep.bishop_gromov) suites["bishop_gromov"] = detail::to_json(*rep.bishop_gromov);
  if (rep.slope_bound) suites["slope_bound"] = detail::to_json(*rep.slope_bound);
  if (rep.pinching) {
    suites["pinching"] = {{"eps_star", rep.pinching->eps_star},
                          {"argmin_t", rep.pinching->argmin_t},
                          {"R_max", rep.pinching->R_max},
                          {"flat", rep.pinching->flat}};
  }
  if (rep.flat) suites["flatness"] = {{"flat", *rep.flat}};
  if (!rep.riccati.empty()) {
    ordered_json dirs = ordered_json::array();
    for (const auto& d : rep.riccati) {
      ordered_json e;
      e["direction"] = d.direction;
      if (d.conjugate_point)
        e["conjugate_point"] = *d.conjugate_point;
      else
        e["conjugate_point"] = nullptr;
      e["slope_bound"] = detail::to_json(d.slope);
      e["jacobian_comparison"] = detail::to_json(d.jacobian);
      e["verdict"] = d.verdict;
      dirs.push_back(std::move(e));
    }
    suites["riccati"] = std::move(dirs);
  }
  j["suites"] = std::move(suites);
  ordered_json verdicts = ordered_json::object();
  for (const auto& [name, ok] : rep.verdicts) verdicts[name] = ok;
  j["verdicts"] = std::move(verdicts);
  j["determinism_hash"] = rep.determinism_hash;
  if (include_timing) j["timing"] = {{"elapsed_seconds", rep.elapsed_seconds}};
  return j;
}

inline std::string emit_report_json(const ExperimentReport& rep, bool include_timing = true) {
  return report_to_json(rep, include_timing).dump(2) + "\n";
}

// One CSV per convergence sequence: header r,value,fit_residual; the residual
// is measured against that sequence's tail fit.
inline std::map<std::string, std::string> emit_report_csv(const ExperimentReport& rep) {
  std::map<std::string, std::string> files;
  const auto add = [&](const std::string& name, const ConvergenceReport& r) {
    std::string body = "r,value,fit_residual\n";
    for (const auto& s : r.samples) {
      const double resid = s.value - (r.limit + r.c / s.r);
      body += detail::format_double(s.r) + "," + detail::format_double(s.value) + "," +
              detail::format_double(resid) + "\n";
    }
    files[name + ".csv"] = std::move(body);
  };
  if (rep.avr) {
    add("avr_sphere", rep.avr->sphere_form);
    add("avr_volume", rep.avr->volume_form);
  }
  if (rep.scalar_integral) add("scalar_integral", rep.scalar_integral->report);
  if (rep.area_derivative) add("area_derivative", rep.area_derivative->report);
  if (rep.radial_ricci) add("radial_ricci", rep.radial_ricci->report);
  if (rep.annulus) {
    add("annulus_upper", rep.annulus->upper);
    add("annulus_lower", rep.annulus->lower);
  }
  return files;
}

// validate -> pointwise suites -> limit experiments -> optional Jacobi runs.
// Deterministic for a fixed config; the hash covers everything but timing.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto t_start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = config;

  RadialProfile profile;
  try {
    profile = parse_profile_spec(config.profile_spec, config.r_max);
  } catch (const parse_error& e) {
    rep.validation.passed = false;
    rep.validation.failures.push_back({std::string("parse: ") + e.what(), 0.0, 0.0});
    return rep;
  } catch (const std::invalid_argument& e) {
    rep.validation.passed = false;
    rep.validation.failures.push_back({std::string("profile: ") + e.what(), 0.0, 0.0});
    return rep;
  }
  rep.validation = profile.validation;
  rep.validation_ok = profile.validation.passed;
  if (!rep.validation_ok) return rep;

  const WarpedManifold m(std::move(profile));
  const QuadTol quad = config.quad();
  const std::vector<double> radii = config.r_sequence.radii();

  rep.avr = estimate_avr(m, radii, quad);
  rep.scalar_integral = scalar_integral_experiment(m, radii, quad, 1.0, &*rep.avr);
  rep.area_derivative = area_derivative_experiment(m, radii, quad, &*rep.avr);
  rep.radial_ricci = radial_ricci_experiment(m, radii, quad);

  const std::vector<double> annulus_radii = config.annulus_radii();
  rep.annulus = annulus_limit_sequences(m, 1.0, config.eps, annulus_radii, quad);
  const double v = rep.avr->value();
  rep.annulus_predicted_upper = 4.0 * pi * v * (-2.0 - config.eps);
  rep.annulus_predicted_lower = 4.0 * pi * v * (-2.0 + config.eps);
  rep.annulus_verdict =
      limit_verdict(rep.annulus->upper.limit, rep.annulus_predicted_upper, 0.02, 0.05) &&
      limit_verdict(rep.annulus->lower.limit, rep.annulus_predicted_lower, 0.02, 0.05);

  const auto pairs = log_spaced_pairs(0.1, config.r_max, 64);
  rep.bishop_gromov = check_bishop_gromov(m, pairs, 1e-9, quad);
  const auto slope_grid = geometric_grid(1e-2, config.r_max, 256);
  rep.slope_bound = check_slope_bound(m, slope_grid);
  rep.pinching = pinching_infimum(m, config.r_max, 512);
  rep.flat = flatness_test(m, config.r_max);

  if (config.riccati) {
    const RiccatiConfig& rc = *config.riccati;
    const RadialCurvatureField field = make_field(rc.field, rc.n_directions);
    rep.riccati.resize(static_cast<std::size_t>(rc.n_directions));
    const auto grid = geometric_grid(std::max(10.0 * rc.h, 1e-2), rc.t_max * 0.99, 128);
    const auto dir_pairs = log_spaced_pairs(std::max(10.0 * rc.h, 1e-2), rc.t_max * 0.99, 32);
    parallel_for(rc.n_directions, [&](int d) {
      const JacobiSolution sol = integrate_jacobi(field, d, rc.t_max, rc.h);
      RiccatiDirectionResult res;
      res.direction = d;
      res.conjugate_point = sol.conjugate_point;
      res.slope = check_slope_bound(sol, grid, 1e-8);
      res.jacobian = check_jacobian_comparison(sol, dir_pairs, 1e-8);
      // The slope and Jacobian bounds are theorems only under the pole
      // hypothesis: nonnegative radial trace and no conjugate point.
      const bool pole_like = field.nonneg_trace && !sol.conjugate_point;
      res.verdict = !pole_like || (res.slope.passed() && res.jacobian.passed());
      rep.riccati[static_cast<std::size_t>(d)] = std::move(res);
    });
  }

  rep.verdicts.emplace_back("scalar_integral", rep.scalar_integral->verdict);
  rep.verdicts.emplace_back("area_derivative", rep.area_derivative->verdict);
  rep.verdicts.emplace_back("radial_ricci", rep.radial_ricci->verdict);
  rep.verdicts.emplace_back("annulus_limits", rep.annulus_verdict);
  rep.verdicts.emplace_back("bishop_gromov", rep.bishop_gromov->passed());
  rep.verdicts.emplace_back("slope_bound", rep.slope_bound->passed());
  rep.verdicts.emplace_back("pinching", rep.pinching->flat || rep.pinching->eps_star <= 1e-3);
  rep.verdicts.emplace_back("flatness", *rep.flat == rep.pinching->flat);
  for (const auto& d : rep.riccati)
    rep.verdicts.emplace_back("riccati_direction_" + std::to_string(d.direction), d.verdict);

  rep.determinism_hash = detail::hex64(detail::fnv1a64(emit_report_json(rep, false)));
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// 0: all verdicts pass; 2: some verdict failed; 3: validation failed.
// Diagnostic (dual-path) faults throw and map to 4 at the CLI.
inline int report_exit_code(const ExperimentReport& rep) {
  if (!rep.validation_ok) return 3;
  return rep.all_verdicts_pass() ? 0 : 2;
}

}  // namespace polelab
