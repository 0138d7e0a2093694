#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocpcert/problem.hpp"
#include "support.hpp"

using namespace ocpcert;
using testing_support::Gen;

namespace {
Poly x(int n, int i) { return Poly::variable(n, i); }
}

TEST_CASE("graded lex puts lower degree first, then earlier variables") {
  GradedLex lt;
  CHECK(lt({0, 0}, {1, 0}));
  CHECK(lt({1, 0}, {0, 1}));
  CHECK(lt({0, 2}, {1, 1}) == false);
  CHECK(lt({2, 0}, {1, 1}));
  CHECK_FALSE(lt({1, 1}, {1, 1}));
}

TEST_CASE("monomial text round trip") {
  const auto names = state_variable_names(3);
  CHECK(format_monomial({0, 0, 0}, names) == "1");
  CHECK(format_monomial({2, 0, 1}, names) == "x1^2*x3");
  CHECK(parse_monomial("x1^2*x3", names) == Exponents{2, 0, 1});
  CHECK(parse_monomial(" x2 * x2 ", names) == Exponents{0, 2, 0});
  CHECK(parse_monomial("1", names) == Exponents{0, 0, 0});
  const auto ends = endpoint_variable_names(2);
  CHECK(ends == std::vector<std::string>{"x0_1", "x0_2", "xT_1", "xT_2"});
  CHECK(parse_monomial("xT_2", ends) == Exponents{0, 0, 0, 1});
}

TEST_CASE("malformed monomials are rejected") {
  const auto names = state_variable_names(2);
  CHECK_THROWS_AS(parse_monomial("x3", names), ParseError);
  CHECK_THROWS_AS(parse_monomial("x1^", names), ParseError);
  CHECK_THROWS_AS(parse_monomial("x1^0", names), ParseError);
  CHECK_THROWS_AS(parse_monomial("x1 x2", names), ParseError);
  CHECK_THROWS_AS(parse_monomial("x1*", names), ParseError);
}

TEST_CASE("arithmetic and exact derivatives") {
  const Poly p = x(2, 0) * x(2, 0) * x(2, 1) + 3.0 * x(2, 1) - Poly::constant(2, 2.0);
  Vec pt(2);
  pt << 2.0, -1.0;
  CHECK(p(pt) == doctest::Approx(-4.0 - 3.0 - 2.0));
  CHECK(p.degree() == 3);
  CHECK(p.derivative(0)(pt) == doctest::Approx(2 * 2.0 * -1.0));
  CHECK(p.derivative(1)(pt) == doctest::Approx(4.0 + 3.0));
  CHECK((p - p).is_zero());
  CHECK(p.derivative(0).derivative(0).derivative(0).is_zero());
}

TEST_CASE("dimension mismatches throw") {
  CHECK_THROWS_AS(x(2, 0) + x(3, 0), DimensionError);
  Poly p(2);
  CHECK_THROWS_AS(p.add_term({1, 0, 0}, 1.0), DimensionError);
  CHECK_THROWS_AS(p.add_term({-1, 0}, 1.0), DimensionError);
  CHECK_THROWS_AS(x(2, 0)(Vec::Zero(3)), DimensionError);
  CHECK_THROWS_AS(PolyMap(2, {x(3, 0)}), DimensionError);
  CHECK_THROWS_AS(lie_bracket(make_map(2, {x(2, 0), x(2, 1)}), make_map(2, {x(2, 0)})), DimensionError);
}

TEST_CASE("REG1 bracket [f1, f0] = (0, -1)") {
  const Instance in = registry_get("REG1", 4);
  const Vec b = lie_bracket(in.spec.f1, in.spec.f0)(Vec::Zero(2));
  CHECK(b(0) == 0.0);
  CHECK(b(1) == -1.0);
  // cached brackets agree with the direct computation
  CHECK(in.spec.bracket10() == lie_bracket(in.spec.f1, in.spec.f0));
  CHECK(in.spec.bracket01() == lie_bracket(in.spec.f0, in.spec.f1));
}

TEST_CASE("bracket of a field with itself vanishes") {
  Gen g(7);
  for (int r = 0; r < 5; ++r) {
    const VectorField X = g.field(3, 3);
    const VectorField B = lie_bracket(X, X);
    for (int t = 0; t < 10; ++t) CHECK(B(g.vec(3)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("bracket is bilinear at random points") {
  Gen g(8);
  for (int r = 0; r < 10; ++r) {
    const int n = g.integer(2, 4);
    const VectorField X = g.field(n, 2), Y = g.field(n, 2), Z = g.field(n, 2);
    const double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
    const VectorField lhs = lie_bracket(a * X + b * Z, Y);
    const VectorField rhs = a * lie_bracket(X, Y) + b * lie_bracket(Z, Y);
    for (int t = 0; t < 10; ++t) {
      const Vec p = g.vec(n);
      CHECK((lhs(p) - rhs(p)).cwiseAbs().maxCoeff() <= 1e-12 * (1 + rhs(p).cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("weighted Hessian is symmetric and matches component Hessians") {
  Gen g(9);
  const VectorField F = g.field(3, 3);
  const Vec w = g.vec(3), p = g.vec(3);
  const Mat H = F.weighted_hessian(w, p);
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Mat ref = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) ref(j, k) += w(i) * F[i].derivative(j).derivative(k)(p);
  CHECK((H - ref).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(F.weighted_hessian(Vec::Zero(2), p), DimensionError);
}
