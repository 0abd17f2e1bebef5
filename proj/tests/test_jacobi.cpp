#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "polelab/jacobi.hpp"
#include "polelab/warped.hpp"

using namespace polelab;

TEST_CASE("Mat2 basics") {
  const Mat2 a{1.0, 2.0, 3.0, 4.0};
  REQUIRE(a.det() == -2.0);
  REQUIRE(a.trace() == 5.0);
  const Mat2 inv = a.inverse();
  const Mat2 id = a * inv;
  REQUIRE(std::abs(id.m00 - 1.0) <= 1e-15);
  REQUIRE(std::abs(id.m01) <= 1e-15);
  REQUIRE_THROWS_AS(Mat2{}.inverse(), std::domain_error);
}

TEST_CASE("flat field integrates to U = t I") {
  const auto sol = integrate_jacobi(constant_field(0.0), 0, 10.0, 1e-3);
  REQUIRE_FALSE(sol.conjugate_point.has_value());
  for (std::size_t k = 0; k < sol.t.size(); k += 1000) {
    const double t = sol.t[k];
    REQUIRE(std::abs(sol.U[k].m00 - t) <= 1e-10 * t);
    REQUIRE(std::abs(sol.U[k].m01) <= 1e-12);
    REQUIRE(std::abs(sol.J[k] - t * t) <= 1e-9 * t * t);
  }
  const auto d = shape_data(sol, 2.0);
  REQUIRE_THAT(d.lambda1, Catch::Matchers::WithinAbs(0.5, 1e-9));
  REQUIRE_THAT(d.lambda2, Catch::Matchers::WithinAbs(0.5, 1e-9));
  REQUIRE_THAT(d.J_over_J, Catch::Matchers::WithinAbs(1.0, 1e-9));
  REQUIRE(d.ric_radial == 0.0);
}

TEST_CASE("the Taylor seed matches U(t)/t -> I at the first grid point") {
  const auto sol = integrate_jacobi(aniso_field(1.0, 0.25), 1, 5.0, 1e-3);
  const Mat2 scaled = (1.0 / sol.t.front()) * sol.U.front();
  REQUIRE(std::abs(scaled.m00 - 1.0) <= 1e-6);
  REQUIRE(std::abs(scaled.m11 - 1.0) <= 1e-6);
  REQUIRE(std::abs(scaled.m01) <= 1e-12);
}

TEST_CASE("constant curvature: U = sin(t) I and a conjugate point at pi") {
  const auto sol = integrate_jacobi(constant_field(1.0), 0, 4.0, 1e-3);
  REQUIRE(sol.conjugate_point.has_value());
  REQUIRE(std::abs(*sol.conjugate_point - pi) <= 1e-6);

  const auto d = shape_data(sol, 1.0);
  const double cot1 = std::cos(1.0) / std::sin(1.0);  // 0.6420926159343306
  REQUIRE_THAT(d.lambda1, Catch::Matchers::WithinAbs(cot1, 1e-9));
  REQUIRE_THAT(d.lambda2, Catch::Matchers::WithinAbs(cot1, 1e-9));
  REQUIRE(d.ric_radial == 2.0);

  REQUIRE_THROWS_AS(shape_data(sol, 3.5), std::domain_error);
}

TEST_CASE("conjugate_point_scan") {
  SECTION("no zero for the flat field") {
    const auto sol = integrate_jacobi(constant_field(0.0), 0, 20.0, 1e-2);
    REQUIRE_FALSE(conjugate_point_scan(sol).has_value());
  }

  SECTION("negative curvature never develops one") {
    const auto sol = integrate_jacobi(constant_field(-1.0), 0, 10.0, 1e-2);
    REQUIRE_FALSE(sol.conjugate_point.has_value());
  }

  SECTION("isotropic cone field stays conjugate-point free to 1000") {
    const RadialProfile p = builtin_profile("cone_tanh", {0.3});
    const auto sol = integrate_jacobi(isotropic_field(p), 0, 1000.0, 1e-2);
    REQUIRE_FALSE(sol.conjugate_point.has_value());
  }
}

TEST_CASE("isotropic field reproduces the warped Jacobian") {
  // U = phi(t) I solves U'' + (-phi''/phi) U = 0 with the pole seed, so
  // det U must match phi^2.
  const RadialProfile prof = builtin_profile("cone_tanh", {0.5});
  const auto sol = integrate_jacobi(isotropic_field(prof), 0, 100.0, 1e-3);
  REQUIRE_FALSE(sol.conjugate_point.has_value());
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); k += 500) {
    if (sol.t[k] < 1.0) continue;
    const Jet2 p = eval_jet2(prof.expr, sol.t[k]);
    worst = std::max(worst, std::abs(sol.J[k] - p.v * p.v) / (p.v * p.v));
  }
  REQUIRE(worst <= 1e-6);

  const auto d = shape_data(sol, 1.0);
  REQUIRE(std::abs(d.lambda1 - 0.8060734856625415) <= 1e-6);
  REQUIRE(std::abs(d.lambda2 - 0.8060734856625415) <= 1e-6);
}

TEST_CASE("step halving measures fourth order convergence") {
  const auto error_at = [](double h) {
    const auto sol = integrate_jacobi(constant_field(1.0), 0, 2.0, h);
    const double t = sol.t.back();
    const Mat2 diff = sol.U.back() - Mat2::diagonal(std::sin(t), std::sin(t));
    return diff.max_abs();
  };
  const double e1 = error_at(0.05);
  const double e2 = error_at(0.025);
  const double order = std::log2(e1 / e2);
  CAPTURE(e1, e2, order);
  REQUIRE(order >= 3.7);
  REQUIRE(order <= 4.3);
}

TEST_CASE("Riccati trace identity along an anisotropic field") {
  // d/dt (trace S) = -(lambda1^2 + lambda2^2) - trace R
  const auto sol = integrate_jacobi(aniso_field(1.0, 0.25), 2, 60.0, 1e-3);
  const double h = 5e-3;
  for (const double t : {1.0, 2.0, 5.0, 10.0, 30.0}) {
    const auto d = shape_data(sol, t);
    const double fd =
        (shape_data(sol, t + h).J_over_J - shape_data(sol, t - h).J_over_J) / (2.0 * h);
    const double rhs = -(d.lambda1 * d.lambda1 + d.lambda2 * d.lambda2) - d.ric_radial;
    CAPTURE(t, fd, rhs);
    REQUIRE(std::abs(fd - rhs) <= 1e-4 * std::abs(rhs));
  }
}

TEST_CASE("field constructors and labels") {
  const auto iso = make_field("isotropic:cone_tanh[0.5]");
  REQUIRE(iso.label == "isotropic:cone_tanh[0.5]");
  REQUIRE(iso.nonneg_trace);

  const auto con = make_field("constant:-1");
  REQUIRE_FALSE(con.nonneg_trace);

  const auto ani = make_field("aniso:1,0.5", 8);
  REQUIRE(ani.n_directions == 8);
  // symmetric, direction-dependent, trace 2 k sech^2(t) >= 0
  for (int d = 0; d < 8; ++d) {
    for (const double t : {0.0, 0.5, 2.0, 10.0}) {
      const Mat2 r = ani.eval(t, d);
      REQUIRE(std::abs(r.m01 - r.m10) <= 1e-14);
      REQUIRE(r.trace() >= 0.0);
    }
  }
  const double k0 = ani.eval(0.0, 0).m00;  // theta = 0: k (1 + b)
  REQUIRE_THAT(k0, Catch::Matchers::WithinRel(1.5, 1e-12));

  REQUIRE_THROWS_AS(make_field("nolabel"), std::invalid_argument);
  REQUIRE_THROWS_AS(make_field("spin:1"), std::invalid_argument);
  REQUIRE_THROWS_AS(make_field("aniso:1"), std::invalid_argument);
}

TEST_CASE("integrate_jacobi argument guards") {
  const auto f = constant_field(0.0);
  REQUIRE_THROWS_AS(integrate_jacobi(f, 0, 10.0, -1e-3), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_jacobi(f, 0, 1e-3, 1e-3), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_jacobi(f, 9, 10.0, 1e-3), std::invalid_argument);
}
