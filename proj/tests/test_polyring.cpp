#include <doctest.h>

#include <random>

#include "loopsynth/errors.hpp"
#include "loopsynth/polynomial.hpp"
#include "test_support.hpp"

using namespace loopsynth;
using loopsynth::testing::P;
using loopsynth::testing::ctx_of;

namespace {

// Evaluates `expected` and g(F(pt)) at random points; agreement at many
// points certifies a frozen composition value independently of compose().
bool agrees_with_composition(const Polynomial& expected, const Polynomial& g,
                             const std::vector<Polynomial>& F, std::mt19937_64& rng, int points = 50) {
  for (int k = 0; k < points; ++k) {
    auto pt = loopsynth::testing::random_point(rng, expected.context()->size());
    std::vector<Rational> image;
    for (const auto& f : F) image.push_back(evaluate(f, pt));
    if (evaluate(expected, pt) != evaluate(g, image)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("Rational parsing keeps fractions reduced") {
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(parse_rational("-7") == -7);
  CHECK(parse_rational(" 0/5 ") == 0);
  CHECK(parse_rational("-6/4").get_den() == 2);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("1/-2"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}

TEST_CASE("VarContext validation") {
  CHECK_THROWS_AS(VarContext::of_program({"x", "x"}), Error);
  auto ctx = ctx_of({"x1", "x2"});
  auto ext = ctx->with({{"y1", VarBlock::Coefficient}, {"z", VarBlock::Guard}});
  CHECK(ext->size() == 4);
  CHECK(ctx->embeds_into(*ext));
  CHECK_FALSE(ext->embeds_into(*ctx));
  CHECK(ext->fresh_name("z") == "z_");
  CHECK_THROWS_AS(ext->with({{"x3", VarBlock::Program}}), Error);
  CHECK_THROWS_AS(ctx->require_index("x9"), UnknownVariable);
}

TEST_CASE("add") {
  auto ctx = ctx_of({"x1", "x2"});
  CHECK((P("x1", ctx) + P("-x1", ctx)).is_zero());
  CHECK(P("x1^2-x2^2+x1*x2", ctx) + Polynomial(ctx) == P("x1^2-x2^2+x1*x2", ctx));
  CHECK(P("2*x1-3*x2", ctx) + P("x1+x2", ctx) == P("3*x1-2*x2", ctx));

  std::mt19937_64 rng(7);
  auto lhs = P("2*x1-3*x2", ctx) + P("x1+x2", ctx);
  for (int k = 0; k < 20; ++k) {
    auto pt = loopsynth::testing::random_point(rng, 2);
    CHECK(evaluate(lhs, pt) == 3 * pt[0] - 2 * pt[1]);
  }

  auto other = ctx_of({"x1", "x3"});
  CHECK_THROWS_AS(P("x1", ctx) + P("x1", other), ContextMismatch);
}

TEST_CASE("mul") {
  auto ctx = ctx_of({"x1", "x2"});
  CHECK((P("x1", ctx) * Polynomial(ctx)).is_zero());
  CHECK(P("x1+x2", ctx) * P("x1-x2", ctx) == P("x1^2-x2^2", ctx));

  auto xz = VarContext::make({{"x1", VarBlock::Program}, {"x2", VarBlock::Program}, {"z", VarBlock::Guard}});
  CHECK(P("z", xz) * P("x2^2-x1", xz) == P("z*x2^2 - z*x1", xz));
  CHECK_THROWS_AS(P("x1", ctx) * P("x1", xz), ContextMismatch);
}

TEST_CASE("compose reproduces the worked invariant-set example") {
  auto ctx = ctx_of({"x1", "x2"});
  const auto g = P("x1^2 - x2^2 + x1*x2", ctx);
  const std::vector<Polynomial> F = {P("2*x1 - 3*x2", ctx), P("x1 + x2", ctx)};
  std::mt19937_64 rng(11);

  const auto g1 = compose(g, F);
  const auto expected1 = P("5*x1^2 - 15*x1*x2 + 5*x2^2", ctx);
  CHECK(agrees_with_composition(expected1, g, F, rng));
  CHECK(g1 == expected1);

  const auto g2 = compose(g1, F);
  const auto expected2 = P("-5*x1^2 - 35*x1*x2 + 95*x2^2", ctx);
  CHECK(agrees_with_composition(expected2, g1, F, rng));
  CHECK(g2 == expected2);

  const std::vector<Polynomial> id = {P("x1", ctx), P("x2", ctx)};
  CHECK(compose(g, id) == g);

  CHECK_THROWS_AS(compose(g, std::vector<Polynomial>{P("x1", ctx)}), ArityMismatch);
}

TEST_CASE("substitute and evaluate") {
  auto ctx = VarContext::make({{"x1", VarBlock::Program}, {"x2", VarBlock::Program}, {"z", VarBlock::Guard}});
  const auto zg = P("z*(x2^2 - x1)", ctx);
  CHECK(substitute(zg, {{"x1", 1}, {"x2", 1}, {"z", 1}}).is_zero());
  CHECK(substitute(P("x1^2", ctx), {{"x1", 3}}) == Polynomial::constant(ctx, 9));
  CHECK(substitute(P("x1*x2 + z", ctx), {{"x1", Rational(1, 2)}}) == P("1/2*x2 + z", ctx));
  CHECK_THROWS_AS(substitute(zg, {{"w", 1}}), UnknownVariable);

  auto x = ctx_of({"x1", "x2"});
  CHECK(evaluate(P("x2^2 - x1", x), Bindings{{"x1", 1}, {"x2", 1}}) == 0);
  CHECK(evaluate(P("x1^2 - x2^2 + x1*x2", x), Bindings{{"x1", 2}, {"x2", 1}}) == 5);
  CHECK_THROWS_AS(evaluate(P("x1", x), Bindings{{"x1", 1}}), MissingBinding);

  auto y = ctx_of({"y1", "y2", "y3", "y4", "y5"});
  const std::vector<Rational> root = {-3, 3, 1, -1, 0};
  CHECK(evaluate(P("(y3+y4)^2 - y1 - y2", y), root) == 0);
}

TEST_CASE("extend_context") {
  auto x = ctx_of({"x1", "x2", "x3"});
  auto xyz = x->with({{"y1", VarBlock::Coefficient}, {"z", VarBlock::Guard}});
  const auto g = P("x2^2 - x1", x);
  const auto eg = extend_context(g, xyz);
  CHECK(eg == P("x2^2 - x1", xyz));
  CHECK(extend_context(Polynomial(x), xyz).is_zero());
  CHECK(P("z", xyz) * eg == extend_context(g, xyz) * P("z", xyz));
  CHECK_THROWS_AS(extend_context(eg, x), ContextMismatch);
  CHECK(restrict_context(eg, x) == g);
}

TEST_CASE("text round trip and normalization") {
  auto ctx = ctx_of({"x1", "x2"});
  const auto p = P("x1^2 - x2^2 + x1*x2 - 3/2*x2 + 7", ctx);
  CHECK(to_string(p) == "x1^2 + x1*x2 - x2^2 - 3/2*x2 + 7");
  CHECK(P(to_string(p), ctx) == p);
  CHECK(to_string(Polynomial(ctx)) == "0");
  CHECK(to_string(P("-x1", ctx)) == "-x1");
  CHECK(primitive_part(P("-1/2*x1 + 3/4", ctx)) == P("2*x1 - 3", ctx));
  CHECK(associates(P("2*x1 - 4", ctx), P("-x1/3 + 2/3", ctx)));
  CHECK_FALSE(associates(P("x1", ctx), P("x1 + 1", ctx)));
  CHECK_THROWS_AS(P("x1 +", ctx), ParseError);
  CHECK_THROWS_AS(P("x9", ctx), ParseError);
  CHECK_THROWS_AS(P("x1 / x2", ctx), ParseError);
  // Leading zeros are decimal, not octal.
  CHECK(P("010*x1 + 09", ctx) == P("10*x1 + 9", ctx));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto q = loopsynth::testing::random_polynomial(rng, ctx);
    CHECK(P(to_string(q), ctx) == q);
  }
}

TEST_CASE("ring axioms on random polynomials") {
  auto ctx = ctx_of({"a", "b", "c"});
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    auto p = loopsynth::testing::random_polynomial(rng, ctx);
    auto q = loopsynth::testing::random_polynomial(rng, ctx);
    auto r = loopsynth::testing::random_polynomial(rng, ctx);
    REQUIRE((p + q) + r == p + (q + r));
    REQUIRE((p * q) * r == p * (q * r));
    REQUIRE(p + q == q + p);
    REQUIRE(p * q == q * p);
    REQUIRE(p * (q + r) == p * q + p * r);
    REQUIRE((p + (-p)).terms().empty());
    auto pt = loopsynth::testing::random_point(rng, 3);
    REQUIRE(evaluate(p * q, pt) == evaluate(p, pt) * evaluate(q, pt));
  }
}

TEST_CASE("composition is an evaluation homomorphism") {
  auto ctx = ctx_of({"a", "b", "c"});
  std::mt19937_64 rng(99);
  for (int k = 0; k < 500; ++k) {
    auto g = loopsynth::testing::random_polynomial(rng, ctx, 4, 3);
    std::vector<Polynomial> F;
    for (int i = 0; i < 3; ++i) F.push_back(loopsynth::testing::random_polynomial(rng, ctx, 3, 2));
    auto pt = loopsynth::testing::random_point(rng, 3);
    std::vector<Rational> image;
    for (const auto& f : F) image.push_back(evaluate(f, pt));
    REQUIRE(evaluate(compose(g, F), pt) == evaluate(g, image));
  }
}
