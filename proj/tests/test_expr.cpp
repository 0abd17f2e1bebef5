#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "polelab/expr.hpp"

using namespace polelab;

TEST_CASE("parse recognizes the grammar") {
  SECTION("identity profile") {
    const ProfileExpr e = parse_profile("t");
    REQUIRE(e.root->kind == Expr::Kind::variable);
  }

  SECTION("cone profile structure") {
    const ProfileExpr e = parse_profile("0.5*t + 0.5*tanh(t)");
    REQUIRE(e.root->kind == Expr::Kind::binary);
    REQUIRE(e.root->op == BinaryOp::add);
    const auto& lhs = e.root->a;
    REQUIRE(lhs->op == BinaryOp::mul);
    REQUIRE(lhs->a->kind == Expr::Kind::constant);
    REQUIRE(lhs->a->value == 0.5);
    REQUIRE(lhs->b->kind == Expr::Kind::variable);
    const auto& rhs = e.root->b;
    REQUIRE(rhs->op == BinaryOp::mul);
    REQUIRE(rhs->b->kind == Expr::Kind::unary);
    REQUIRE(rhs->b->fn == UnaryFn::tanh);
  }

  SECTION("precedence and parentheses") {
    REQUIRE(parse_profile("1 + 2*t") == parse_profile("1 + (2*t)"));
    REQUIRE_FALSE(parse_profile("(1 + 2)*t") == parse_profile("1 + 2*t"));
    const ProfileExpr chained = parse_profile("t - 1 - 2");
    REQUIRE(chained.root->op == BinaryOp::sub);
    REQUIRE(chained.root->b->value == 2.0);  // left-assoc: (t - 1) - 2
  }

  SECTION("unary minus and pow") {
    const ProfileExpr e = parse_profile("-t^2");
    REQUIRE(e.root->kind == Expr::Kind::unary);
    REQUIRE(e.root->fn == UnaryFn::neg);
    REQUIRE(e.root->a->op == BinaryOp::pow);
    const ProfileExpr f = parse_profile("t^-2");
    REQUIRE(f.root->op == BinaryOp::pow);
    REQUIRE(f.root->b->value == -2.0);
  }
}

TEST_CASE("parse errors carry byte offsets") {
  SECTION("truncated input") {
    try {
      parse_profile("t +");
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.offset == 3);
    }
  }

  SECTION("unknown identifier") {
    try {
      parse_profile("2*sinh(t)");
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.offset == 2);
      REQUIRE(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
  }

  SECTION("non-constant pow exponent") {
    try {
      parse_profile("t^t");
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      REQUIRE(e.offset == 2);
      REQUIRE(std::string(e.what()).find("exponent") != std::string::npos);
    }
  }

  REQUIRE_THROWS_AS(parse_profile(""), parse_error);
  REQUIRE_THROWS_AS(parse_profile("t)"), parse_error);
  REQUIRE_THROWS_AS(parse_profile("(t"), parse_error);
}

TEST_CASE("eval_jet2 matches hand derivatives") {
  SECTION("polynomial") {
    const Jet2 j = eval_jet2(parse_profile("t*t"), 3.0);
    REQUIRE(j.v == 9.0);
    REQUIRE(j.d1 == 6.0);
    REQUIRE(j.d2 == 2.0);
  }

  SECTION("odd function at the origin") {
    const Jet2 j = eval_jet2(parse_profile("tanh(t)"), 0.0);
    REQUIRE(j.v == 0.0);
    REQUIRE(j.d1 == 1.0);
    REQUIRE(j.d2 == 0.0);
  }

  SECTION("cone profile at t = 1") {
    // phi = t/2 + tanh(t)/2 with tanh(1) = 0.7615941559557649,
    // sech^2(1) = 0.4199743416140265, tanh'' = -2 sech^2 tanh
    const Jet2 j = eval_jet2(parse_profile("0.5*t + 0.5*tanh(t)"), 1.0);
    REQUIRE_THAT(j.v, Catch::Matchers::WithinRel(0.8807970779778824, 1e-14));
    REQUIRE_THAT(j.d1, Catch::Matchers::WithinRel(0.7099871708070130, 1e-14));
    REQUIRE_THAT(j.d2, Catch::Matchers::WithinRel(-0.3198500042246123, 1e-14));
  }

  SECTION("domain errors") {
    REQUIRE_THROWS_AS(eval_jet2(parse_profile("log(t - 1)"), 0.5), std::domain_error);
    REQUIRE_THROWS_AS(eval_jet2(parse_profile("sqrt(0 - t)"), 2.0), std::domain_error);
    REQUIRE_THROWS_AS(eval_jet2(parse_profile("1/(t - 2)"), 2.0), std::domain_error);
  }

  SECTION("pow edge cases at the origin") {
    const Jet2 sq = eval_jet2(parse_profile("t^2"), 0.0);
    REQUIRE(sq.v == 0.0);
    REQUIRE(sq.d1 == 0.0);
    REQUIRE(sq.d2 == 2.0);
    const Jet2 lin = eval_jet2(parse_profile("t^1"), 0.0);
    REQUIRE(lin.d1 == 1.0);
    REQUIRE(lin.d2 == 0.0);
    const Jet2 one = eval_jet2(parse_profile("t^0"), 0.0);
    REQUIRE(one.v == 1.0);
  }
}

namespace {

// Random expression trees over the full grammar; constants stay nonnegative
// as they do in parsed trees.
ExprPtr random_tree(std::mt19937& rng, int depth) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> constant(0.5, 2.0);
  const double pick = unit(rng);
  if (depth <= 0 || pick < 0.2) {
    if (unit(rng) < 0.5) return make_constant(constant(rng));
    return make_variable();
  }
  if (pick < 0.55) {
    static const UnaryFn fns[] = {UnaryFn::neg, UnaryFn::exp,  UnaryFn::log,  UnaryFn::sqrt,
                                  UnaryFn::sin, UnaryFn::cos,  UnaryFn::tanh, UnaryFn::atan};
    return make_unary(fns[rng() % 8], random_tree(rng, depth - 1));
  }
  static const BinaryOp ops[] = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div};
  if (pick < 0.9)
    return make_binary(ops[rng() % 4], random_tree(rng, depth - 1), random_tree(rng, depth - 1));
  static const double exponents[] = {-2.0, -1.0, 0.5, 1.0, 2.0, 3.0};
  return make_pow(random_tree(rng, depth - 1), exponents[rng() % 6]);
}

}  // namespace

TEST_CASE("unparse then parse reproduces the tree") {
  std::mt19937 rng(20250811);
  for (int i = 0; i < 500; ++i) {
    const ProfileExpr e{random_tree(rng, 6)};
    const std::string src = unparse(e);
    CAPTURE(src);
    const ProfileExpr back = parse_profile(src);
    REQUIRE(back == e);
    REQUIRE(unparse(back) == src);
  }
}

TEST_CASE("jet derivatives agree with central differences") {
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> t_dist(0.1, 10.0);

  const auto value_at = [](const ProfileExpr& e, double t, double& out) {
    try {
      const Jet2 j = eval_jet2(e, t);
      out = j.v;
      return std::isfinite(j.v) && std::abs(j.v) <= 1e3;
    } catch (const std::exception&) {
      return false;
    }
  };

  // h for the first difference; the second difference uses a larger step to
  // keep the rounding term 4 eps |f| / h^2 well under tolerance.
  const double h1 = 1e-5;
  const double h2 = 1e-4;

  int accepted = 0;
  int attempts = 0;
  while (accepted < 1000 && ++attempts < 200000) {
    const ProfileExpr e{random_tree(rng, 6)};
    const double t = t_dist(rng);

    Jet2 j;
    try {
      j = eval_jet2(e, t);
    } catch (const std::exception&) {
      continue;
    }
    if (!std::isfinite(j.v) || !std::isfinite(j.d1) || !std::isfinite(j.d2)) continue;
    if (std::abs(j.v) > 30.0 || std::abs(j.d1) > 100.0 || std::abs(j.d2) > 100.0) continue;

    double fp1, fm1, fp2, fm2;
    if (!value_at(e, t + h1, fp1) || !value_at(e, t - h1, fm1) ||
        !value_at(e, t + h2, fp2) || !value_at(e, t - h2, fm2))
      continue;

    ++accepted;
    const double d1_fd = (fp1 - fm1) / (2.0 * h1);
    const double d2_fd = (fp2 - 2.0 * j.v + fm2) / (h2 * h2);
    CAPTURE(unparse(e), t, j.d1, d1_fd, j.d2, d2_fd);
    REQUIRE(std::abs(j.d1 - d1_fd) <= 1e-6 * (1.0 + std::abs(j.d1)));
    REQUIRE(std::abs(j.d2 - d2_fd) <= 1e-4 * (1.0 + std::abs(j.d2)));
  }
  REQUIRE(accepted == 1000);
}
