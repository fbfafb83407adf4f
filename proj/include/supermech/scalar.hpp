#pragma once

// Exact scalar arithmetic for the coefficient layer: multivariate rational
// functions over arbitrary-precision rationals, extended with opaque
// transcendental atoms sin/cos/exp whose arguments are again scalar
// expressions.  Everything is kept in a canonical normal form
// (gcd-reduced numerator/denominator, monic denominator), so structural
// equality of normal forms is the equality test and is_zero is just a check
// for an empty numerator.  Identities that relate different atoms
// (sin^2 + cos^2 = 1 and friends) are deliberately not folded.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace supermech {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScalarExpr;

// An indeterminate of the polynomial layer: a named variable, or one of the
// transcendental atoms applied to a normalized argument.  Atoms compare by
// kind plus the canonical printed form of their argument; the printed form of
// a normal form is unique, so this gives a stable total order.
struct Symbol {
  enum Kind { Var = 0, Sin = 1, Cos = 2, Exp = 3 };
  int kind = Var;
  std::string key;                        // variable name, or printed argument
  std::shared_ptr<const ScalarExpr> arg;  // null iff kind == Var

  static Symbol var(const std::string& name);
  static Symbol fn(int kind, const ScalarExpr& argument);

  bool operator<(const Symbol& o) const {
    if (kind != o.kind) return kind < o.kind;
    return key < o.key;
  }
  bool operator==(const Symbol& o) const { return kind == o.kind && key == o.key; }
  std::string str() const;  // "x" or "sin(...)"
};

// exponent map, each exponent > 0; the empty map is the constant monomial
using Monomial = std::map<Symbol, int>;
// monomial -> nonzero coefficient
using Poly = std::map<Monomial, Rational>;

struct ScalarExpr {
  Poly num;
  Poly den;  // nonzero, coprime with num, leading coefficient 1

  ScalarExpr();  // zero
  static ScalarExpr integer(long v);
  static ScalarExpr rational(const Rational& v);
  static ScalarExpr variable(const std::string& name);
  static ScalarExpr apply_fn(int kind, const ScalarExpr& argument);

  bool is_zero() const { return num.empty(); }
  bool is_one() const;
  bool is_rational_constant() const;
  Rational rational_value() const;  // requires is_rational_constant()

  ScalarExpr operator+(const ScalarExpr& o) const;
  ScalarExpr operator-(const ScalarExpr& o) const;
  ScalarExpr operator*(const ScalarExpr& o) const;
  ScalarExpr operator/(const ScalarExpr& o) const;  // throws MathError on zero divisor
  ScalarExpr operator-() const;
  bool operator==(const ScalarExpr& o) const { return num == o.num && den == o.den; }
  bool operator!=(const ScalarExpr& o) const { return !(*this == o); }

  ScalarExpr pow(long e) const;
  ScalarExpr derivative(const std::string& var) const;
  ScalarExpr substitute(const std::map<std::string, ScalarExpr>& values) const;
  double eval(const std::map<std::string, double>& values) const;

  // every plain variable name occurring anywhere, including inside atom arguments
  void collect_variables(std::vector<std::string>& out) const;
  bool depends_on(const std::string& var) const;

  std::string str() const;
};

// canonical printing used both by str() and by atom identity
std::string poly_str(const Poly& p);

// Parse the expression grammar: infix + - * / with the usual precedence,
// unary minus, ^ with an integer exponent, sin/cos/exp application, integer
// literals, identifiers.  line0/col0 give the position of the first character
// of `text` in the enclosing file so errors point at the right place.
ScalarExpr parse_scalar(const std::string& text, int line0 = 1, int col0 = 1);

// The same parser surfaced as a raw syntax tree, for callers that interpret
// identifiers themselves (the superfunction layer needs odd generators).
struct ExprNode {
  enum Tag { Number, Ident, Unary, Binary, Call } tag;
  Rational number;                // Number
  std::string name;               // Ident, Call (sin/cos/exp)
  char op = 0;                    // Binary: + - * / ^, Unary: -
  std::vector<ExprNode> kids;
  long exponent = 0;              // Binary ^: validated integer exponent
  int line = 0, col = 0;
};
ExprNode parse_expr_tree(const std::string& text, int line0 = 1, int col0 = 1);

// rank of a matrix of scalar expressions, by fraction-free elimination
int scalar_matrix_rank(std::vector<std::vector<ScalarExpr>> m);

// invert a square matrix of scalar expressions; throws MathError if singular
std::vector<std::vector<ScalarExpr>> scalar_matrix_invert(
    std::vector<std::vector<ScalarExpr>> m);

}  // namespace supermech
