#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polelab/expr.hpp"

namespace polelab {

struct ValidationIssue {
  std::string condition;
  double t = 0.0;
  double measured = 0.0;
};

struct ValidationReport {
  bool passed = false;
  std::vector<ValidationIssue> failures;
  std::vector<double> grid;
};

// A validated warping function phi on (0, t_max]. The pole conditions are
// phi(0) = 0, phi'(0) = 1; nonnegative Ricci curvature of
// dr^2 + phi(r)^2 g_{S^2} is equivalent to
//   -phi'' >= 0   and   phi * phi'' <= 1 - phi'^2.
struct RadialProfile {
  ProfileExpr expr;
  double t_max = 0.0;
  ValidationReport validation;
};

inline std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n));
  const double ratio = hi / lo;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    g.push_back(i == n - 1 ? hi : lo * std::pow(ratio, x));
  }
  return g;
}

// Grid-based check of the pole and curvature-sign conditions. Pole values are
// probed at t = 1e-8 with tolerance 1e-6; the sign conditions get a rounding
// allowance 1e-10 * (1 + |terms|). Evaluation errors become failure entries.
inline ValidationReport validate_pole_profile(const ProfileExpr& expr, double t_max,
                                              int grid_size) {
  if (!(t_max > 0.0)) throw std::invalid_argument("validate_pole_profile: t_max must be positive");
  if (grid_size < 16) throw std::invalid_argument("validate_pole_profile: grid_size must be >= 16");

  ValidationReport rep;
  rep.grid = geometric_grid(t_max * 1e-6, t_max, grid_size);

  const auto record = [&](const char* condition, double t, double measured) {
    rep.failures.push_back({condition, t, measured});
  };

  const double t_pole = 1e-8;
  try {
    const Jet2 j = eval_jet2(expr, t_pole);
    if (!(std::abs(j.v) <= 1e-6)) record("pole value phi(0) = 0", t_pole, j.v);
    if (!(std::abs(j.d1 - 1.0) <= 1e-6)) record("pole slope phi'(0) = 1", t_pole, j.d1);
  } catch (const std::exception&) {
    record("pole evaluation", t_pole, std::nan(""));
  }

  for (const double t : rep.grid) {
    Jet2 j;
    try {
      j = eval_jet2(expr, t);
    } catch (const std::exception&) {
      record("evaluation", t, std::nan(""));
      continue;
    }
    if (!std::isfinite(j.v) || !std::isfinite(j.d1) || !std::isfinite(j.d2)) {
      record("finite evaluation", t, j.v);
      continue;
    }
    if (!(j.v > 0.0)) record("positivity phi > 0", t, j.v);
    const double tol_rad = 1e-10 * (1.0 + std::abs(j.d2));
    if (!(-j.d2 >= -tol_rad)) record("radial curvature -phi'' >= 0", t, -j.d2);
    const double lhs = j.v * j.d2;
    const double rhs = 1.0 - j.d1 * j.d1;
    const double tol_tan = 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs));
    if (!(lhs <= rhs + tol_tan)) record("tangential curvature phi*phi'' <= 1 - phi'^2", t, lhs - rhs);
  }

  rep.passed = rep.failures.empty();
  return rep;
}

inline RadialProfile make_radial_profile(ProfileExpr expr, double t_max, int grid_size = 256) {
  RadialProfile p;
  p.expr = std::move(expr);
  p.t_max = t_max;
  p.validation = validate_pole_profile(p.expr, t_max, grid_size);
  return p;
}

// Built-in family:
//   euclidean          phi = t
//   cone_tanh(a)       phi = a*t + (1-a)*tanh(t),  a in [0, 1]
//   cylinderizing      = cone_tanh(0)
//   paraboloidal       phi = log(1 + t)
inline RadialProfile builtin_profile(const std::string& name, const std::vector<double>& params,
                                     double t_max = 2000.0, int grid_size = 256) {
  const auto expect_params = [&](std::size_t n) {
    if (params.size() != n)
      throw std::invalid_argument("builtin profile '" + name + "' expects " +
                                  std::to_string(n) + " parameter(s)");
  };
  std::string src;
  if (name == "euclidean") {
    expect_params(0);
    src = "t";
  } else if (name == "cone_tanh") {
    expect_params(1);
    const double a = params[0];
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("cone_tanh parameter must lie in [0, 1]");
    src = detail::format_double(a) + "*t + " + detail::format_double(1.0 - a) + "*tanh(t)";
  } else if (name == "cylinderizing") {
    expect_params(0);
    return builtin_profile("cone_tanh", {0.0}, t_max, grid_size);
  } else if (name == "paraboloidal") {
    expect_params(0);
    src = "log(1 + t)";
  } else {
    throw std::invalid_argument("unknown builtin profile '" + name + "'");
  }
  return make_radial_profile(parse_profile(src), t_max, grid_size);
}

namespace detail {

// "name" or "name[p1,p2,...]" for a known builtin; empty optional otherwise.
inline bool try_parse_builtin_spec(const std::string& s, std::string& name,
                                   std::vector<double>& params) {
  std::size_t i = 0;
  while (i < s.size() && (ProfileParser::is_alpha(s[i]))) ++i;
  name = s.substr(0, i);
  static const char* known[] = {"euclidean", "cone_tanh", "cylinderizing", "paraboloidal"};
  bool is_known = false;
  for (const char* k : known) is_known = is_known || name == k;
  if (!is_known) return false;
  params.clear();
  if (i == s.size()) return true;
  if (s[i] != '[' || s.back() != ']') return false;
  std::string body = s.substr(i + 1, s.size() - i - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    try {
      params.push_back(std::stod(body.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      return false;
    }
    pos = comma + 1;
  }
  return true;
}

}  // namespace detail

// Accepts "builtin:name[params]", a bare builtin name, or DSL source.
inline RadialProfile parse_profile_spec(const std::string& spec, double t_max = 2000.0,
                                        int grid_size = 256) {
  std::string s = spec;
  const std::string prefix = "builtin:";
  const bool forced_builtin = s.rfind(prefix, 0) == 0;
  if (forced_builtin) s = s.substr(prefix.size());
  std::string name;
  std::vector<double> params;
  if (detail::try_parse_builtin_spec(s, name, params))
    return builtin_profile(name, params, t_max, grid_size);
  if (forced_builtin)
    throw std::invalid_argument("unknown builtin profile spec '" + spec + "'");
  return make_radial_profile(parse_profile(spec), t_max, grid_size);
}

}  // namespace polelab
