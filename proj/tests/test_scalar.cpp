#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "supermech/scalar.hpp"

using namespace supermech;

namespace {

ScalarExpr P(const std::string& s) { return parse_scalar(s); }

// random polynomial expression in x, y with small rational coefficients
ScalarExpr random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-4, 4), ex(0, 3), den(1, 3);
  ScalarExpr e;
  for (int t = 0; t < 4; t++) {
    ScalarExpr term = ScalarExpr::rational(Rational(coeff(rng), den(rng)));
    term = term * P("x").pow(ex(rng)) * P("y").pow(ex(rng));
    e = e + term;
  }
  return e;
}

}  // namespace

TEST_CASE("normal form basics") {
  CHECK(P("1+1") == P("2"));
  CHECK(P("2*x - x - x").is_zero());
  CHECK(P("x*y - y*x").is_zero());
  CHECK(P("(x+y)^2") == P("x^2 + 2*x*y + y^2"));
  CHECK(P("1/2 + 1/3") == P("5/6"));
  CHECK(P("x/x") == P("1"));
  CHECK((P("x^2 - 1") / P("x - 1")) == P("x + 1"));
  CHECK(P("3 - 3").is_zero());
  CHECK_FALSE(P("sin(x)^2 + cos(x)^2 - 1").is_zero());  // sound, not complete
}

TEST_CASE("rational function reduction") {
  ScalarExpr a = P("(x^2 + 2*x*y + y^2)") / P("(x + y)");
  CHECK(a == P("x + y"));
  ScalarExpr b = P("1") / P("x + 1") + P("1") / P("x - 1");
  CHECK(b == P("2*x") / P("x^2 - 1"));
  // denominator normalization is monic, so equal values are equal normal forms
  ScalarExpr c = P("y") / P("2*x");
  ScalarExpr d = P("3*y") / P("6*x");
  CHECK(c == d);
}

TEST_CASE("parser errors carry positions") {
  CHECK_THROWS_AS(P("x + "), ParseError);
  CHECK_THROWS_AS(P("foo(x)"), ParseError);
  CHECK_THROWS_AS(P("x ^ y"), ParseError);
  CHECK_THROWS_AS(P("x $ y"), ParseError);
  try {
    parse_scalar("1 + @", 7, 1);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 7);
    CHECK(e.col == 5);
  }
}

TEST_CASE("print/parse round trip") {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 50; i++) {
    ScalarExpr e = random_poly(rng);
    ScalarExpr back = parse_scalar(e.str());
    CHECK(back == e);
  }
  ScalarExpr t = P("sin(x^2 + 1)*exp(y) - 2/3*cos(x)^2");
  CHECK(parse_scalar(t.str()) == t);
  ScalarExpr r = P("(x + y)/(x - y)");
  CHECK(parse_scalar(r.str()) == r);
}

TEST_CASE("derivative rules") {
  CHECK(P("x^3").derivative("x") == P("3*x^2"));
  CHECK(P("x*y").derivative("y") == P("x"));
  CHECK(P("sin(x)").derivative("x") == P("cos(x)"));
  CHECK(P("cos(x)").derivative("x") == -P("sin(x)"));
  CHECK(P("exp(2*x)").derivative("x") == P("2*exp(2*x)"));
  CHECK(P("sin(x*y)").derivative("y") == P("x*cos(x*y)"));
  // quotient rule
  ScalarExpr q = P("x") / P("x + 1");
  CHECK(q.derivative("x") == P("1") / P("x^2 + 2*x + 1"));
  // derivative commutes for independent variables
  ScalarExpr f = P("x^2*y + sin(x)*y^2");
  CHECK(f.derivative("x").derivative("y") == f.derivative("y").derivative("x"));
}

TEST_CASE("substitution") {
  std::map<std::string, ScalarExpr> sub{{"x", P("u + v")}};
  CHECK(P("x^2").substitute(sub) == P("u^2 + 2*u*v + v^2"));
  CHECK(P("sin(x)").substitute(sub) == P("sin(u + v)"));
  std::map<std::string, ScalarExpr> zero{{"x", P("0")}};
  CHECK(P("sin(x)").substitute(zero).is_zero());
  CHECK(P("cos(x)").substitute(zero) == P("1"));
  CHECK(P("exp(x)").substitute(zero) == P("1"));
  CHECK_THROWS_AS(P("1/x").substitute(zero), MathError);
}

TEST_CASE("numeric evaluation agrees with symbolic operations") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  for (int i = 0; i < 200; i++) {
    ScalarExpr a = random_poly(rng), b = random_poly(rng);
    std::map<std::string, double> at{{"x", pt(rng)}, {"y", pt(rng)}};
    double lhs = (a * b + a).eval(at);
    double rhs = a.eval(at) * b.eval(at) + a.eval(at);
    CHECK(std::abs(lhs - rhs) < 1e-9 * (1 + std::abs(rhs)));
    ScalarExpr d = (a * b).derivative("x");
    double want = a.derivative("x").eval(at) * b.eval(at) + a.eval(at) * b.derivative("x").eval(at);
    CHECK(std::abs(d.eval(at) - want) < 1e-9 * (1 + std::abs(want)));
  }
}

TEST_CASE("gcd keeps results reduced") {
  // multivariate cancellation
  ScalarExpr e = (P("x^2 - y^2") * P("x + 1")) / (P("x + y") * P("x + 1"));
  CHECK(e == P("x - y"));
  ScalarExpr f = P("x^2*y + x*y^2") / P("x*y");
  CHECK(f == P("x + y"));
  // gcd across atoms
  ScalarExpr g = P("sin(x)^2*y") / P("sin(x)");
  CHECK(g == P("sin(x)*y"));
}

TEST_CASE("matrix rank and inverse") {
  auto E = [](const char* s) { return P(s); };
  std::vector<std::vector<ScalarExpr>> m{{E("1"), E("x")}, {E("x"), E("x^2")}};
  CHECK(scalar_matrix_rank(m) == 1);
  std::vector<std::vector<ScalarExpr>> id2{{E("1"), E("0")}, {E("0"), E("1")}};
  CHECK(scalar_matrix_rank(id2) == 2);
  std::vector<std::vector<ScalarExpr>> a{{E("1"), E("x")}, {E("0"), E("2")}};
  auto inv = scalar_matrix_invert(a);
  // a * inv = identity
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      ScalarExpr s;
      for (int k = 0; k < 2; k++) s = s + a[i][k] * inv[k][j];
      CHECK(s == (i == j ? E("1") : E("0")));
    }
  std::vector<std::vector<ScalarExpr>> sing{{E("x"), E("x")}, {E("x"), E("x")}};
  CHECK_THROWS_AS(scalar_matrix_invert(sing), MathError);
  // rank of a 3x3 with polynomial entries
  std::vector<std::vector<ScalarExpr>> r3{
      {E("x"), E("y"), E("x + y")},
      {E("1"), E("0"), E("1")},
      {E("0"), E("1"), E("1")}};
  CHECK(scalar_matrix_rank(r3) == 2);
}
