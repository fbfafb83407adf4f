#include "supermech/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace supermech {
namespace {

const Rational kOne{1};

Poly poly_one() {
  Poly p;
  p[Monomial{}] = kOne;
  return p;
}

bool poly_is_one(const Poly& p) {
  return p.size() == 1 && p.begin()->first.empty() && p.begin()->second == kOne;
}

bool poly_is_constant(const Poly& p) {
  return p.empty() || (p.size() == 1 && p.begin()->first.empty());
}

void poly_add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = p.find(m);
  if (it == p.end()) {
    p.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b) poly_add_term(r, m, c);
  return r;
}

Poly poly_neg(const Poly& a) {
  Poly r;
  for (const auto& [m, c] : a) r.emplace(m, -c);
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (const auto& [s, e] : b) r[s] += e;
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) poly_add_term(r, mono_mul(ma, mb), ca * cb);
  return r;
}

Poly poly_scale(const Poly& a, const Rational& c) {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, k] : a) r.emplace(m, k * c);
  return r;
}

// Lexicographic monomial order: the smallest symbol is the most significant
// position; at the first symbol where the exponents differ, the larger
// exponent wins.  This is a proper monomial order (compatible with
// multiplication), which the division algorithm below relies on.
bool mono_lex_less(const Monomial& a, const Monomial& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ia == a.end()) return true;   // a has exponent 0 at b's symbol
    if (ib == b.end()) return false;
    if (ia->first < ib->first) return false;  // a has the smaller symbol with exp > 0
    if (ib->first < ia->first) return true;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia;
    ++ib;
  }
  return false;
}

Poly::const_iterator poly_leading(const Poly& p) {
  auto best = p.begin();
  for (auto it = std::next(p.begin()); it != p.end(); ++it)
    if (mono_lex_less(best->first, it->first)) best = it;
  return best;
}

// m / d, or false if d does not divide m
bool mono_divide(const Monomial& m, const Monomial& d, Monomial& out) {
  out = m;
  for (const auto& [s, e] : d) {
    auto it = out.find(s);
    if (it == out.end() || it->second < e) return false;
    it->second -= e;
    if (it->second == 0) out.erase(it);
  }
  return true;
}

bool poly_divide_exact(const Poly& a, const Poly& b, Poly& quotient) {
  if (b.empty()) throw MathError("polynomial division by zero");
  Poly rem = a;
  Poly q;
  auto lb = poly_leading(b);
  while (!rem.empty()) {
    auto lr = poly_leading(rem);
    Monomial tm;
    if (!mono_divide(lr->first, lb->first, tm)) return false;
    Rational tc = lr->second / lb->second;
    Poly t;
    t.emplace(tm, tc);
    q = poly_add(q, t);
    rem = poly_sub(rem, poly_mul(t, b));
  }
  quotient = std::move(q);
  return true;
}

Poly poly_divide_exact_or_throw(const Poly& a, const Poly& b) {
  Poly q;
  if (!poly_divide_exact(a, b, q)) throw MathError("inexact polynomial division");
  return q;
}

// ---- multivariate gcd by primitive pseudo-remainder sequences ----

int degree_in(const Poly& p, const Symbol& s) {
  int d = 0;
  for (const auto& [m, c] : p) {
    auto it = m.find(s);
    if (it != m.end()) d = std::max(d, it->second);
  }
  return d;
}

// coefficients of p viewed as a univariate polynomial in s
std::map<int, Poly> univariate_view(const Poly& p, const Symbol& s) {
  std::map<int, Poly> r;
  for (const auto& [m, c] : p) {
    Monomial rest = m;
    int k = 0;
    auto it = rest.find(s);
    if (it != rest.end()) {
      k = it->second;
      rest.erase(it);
    }
    poly_add_term(r[k], rest, c);
  }
  for (auto it = r.begin(); it != r.end();)
    it = it->second.empty() ? r.erase(it) : std::next(it);
  return r;
}

Poly from_univariate(const std::map<int, Poly>& u, const Symbol& s) {
  Poly r;
  for (const auto& [k, coeff] : u)
    for (const auto& [m, c] : coeff) {
      Monomial mm = m;
      if (k > 0) mm[s] = k;
      poly_add_term(r, mm, c);
    }
  return r;
}

Poly poly_gcd(const Poly& a, const Poly& b);

Poly make_monic(const Poly& p) {
  if (p.empty()) return p;
  return poly_scale(p, kOne / poly_leading(p)->second);
}

Poly content_wrt(const Poly& p, const Symbol& s) {
  Poly g;
  for (const auto& [k, coeff] : univariate_view(p, s)) g = poly_gcd(g, coeff);
  return g;
}

// pseudo remainder of u by v, univariately in s
Poly prem(const Poly& u, const Poly& v, const Symbol& s) {
  auto uv = univariate_view(v, s);
  int dv = uv.rbegin()->first;
  const Poly lcv = uv.rbegin()->second;
  Poly r = u;
  while (true) {
    if (r.empty()) return r;
    auto ur = univariate_view(r, s);
    int dr = ur.rbegin()->first;
    if (dr < dv) return r;
    const Poly lcr = ur.rbegin()->second;
    // r := lcv * r - lcr * s^(dr-dv) * v
    Poly shift;
    Monomial sm;
    if (dr - dv > 0) sm[s] = dr - dv;
    shift.emplace(sm, kOne);
    r = poly_sub(poly_mul(lcv, r), poly_mul(poly_mul(lcr, shift), v));
  }
}

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.empty()) return make_monic(b);
  if (b.empty()) return make_monic(a);
  if (poly_is_constant(a) || poly_is_constant(b)) return poly_one();
  // pick the smallest symbol occurring in both, if any
  std::set<Symbol> sa, sb;
  for (const auto& [m, c] : a)
    for (const auto& [s, e] : m) sa.insert(s);
  for (const auto& [m, c] : b)
    for (const auto& [s, e] : m) sb.insert(s);
  const Symbol* shared = nullptr;
  for (const auto& s : sa)
    if (sb.count(s)) {
      shared = &s;
      break;
    }
  if (!shared) return poly_one();
  const Symbol s = *shared;
  Poly ca = content_wrt(a, s);
  Poly cb = content_wrt(b, s);
  Poly u = poly_divide_exact_or_throw(a, ca);
  Poly v = poly_divide_exact_or_throw(b, cb);
  Poly cg = poly_gcd(ca, cb);
  if (degree_in(u, s) < degree_in(v, s)) std::swap(u, v);
  while (!v.empty()) {
    Poly r = prem(u, v, s);
    u = std::move(v);
    if (r.empty()) {
      v = Poly{};
    } else {
      Poly rc = content_wrt(r, s);
      v = poly_divide_exact_or_throw(r, rc);
    }
  }
  // u is the primitive gcd candidate; it divides both primitives by
  // construction of the PRS, but trim a possible content anyway
  Poly uc = content_wrt(u, s);
  u = poly_divide_exact_or_throw(u, uc);
  return make_monic(poly_mul(cg, u));
}

std::string rational_str(const Rational& r) { return r.str(); }

}  // namespace

// ---- Symbol ----

Symbol Symbol::var(const std::string& name) {
  Symbol s;
  s.kind = Var;
  s.key = name;
  return s;
}

Symbol Symbol::fn(int kind, const ScalarExpr& argument) {
  Symbol s;
  s.kind = kind;
  auto boxed = std::make_shared<ScalarExpr>(argument);
  s.key = boxed->str();
  s.arg = std::move(boxed);
  return s;
}

std::string Symbol::str() const {
  switch (kind) {
    case Var:
      return key;
    case Sin:
      return "sin(" + key + ")";
    case Cos:
      return "cos(" + key + ")";
    case Exp:
      return "exp(" + key + ")";
  }
  throw MathError("corrupt symbol");
}

// ---- ScalarExpr construction and normal form ----

ScalarExpr::ScalarExpr() : den(poly_one()) {}

ScalarExpr ScalarExpr::integer(long v) {
  ScalarExpr e;
  if (v != 0) e.num.emplace(Monomial{}, Rational(v));
  return e;
}

ScalarExpr ScalarExpr::rational(const Rational& v) {
  ScalarExpr e;
  if (v != 0) e.num.emplace(Monomial{}, v);
  return e;
}

ScalarExpr ScalarExpr::variable(const std::string& name) {
  ScalarExpr e;
  Monomial m;
  m[Symbol::var(name)] = 1;
  e.num.emplace(std::move(m), kOne);
  return e;
}

ScalarExpr ScalarExpr::apply_fn(int kind, const ScalarExpr& argument) {
  if (argument.is_zero()) {
    switch (kind) {
      case Symbol::Sin:
        return ScalarExpr();  // sin(0) = 0
      case Symbol::Cos:
      case Symbol::Exp:
        return ScalarExpr::integer(1);
      default:
        break;
    }
  }
  ScalarExpr e;
  Monomial m;
  m[Symbol::fn(kind, argument)] = 1;
  e.num.emplace(std::move(m), kOne);
  return e;
}

bool ScalarExpr::is_one() const {
  return poly_is_one(num) && poly_is_one(den);
}

bool ScalarExpr::is_rational_constant() const {
  return poly_is_constant(num) && poly_is_one(den);
}

Rational ScalarExpr::rational_value() const {
  if (!is_rational_constant()) throw MathError("not a rational constant");
  if (num.empty()) return Rational(0);
  return num.begin()->second;
}

namespace {

ScalarExpr make_normal(Poly num, Poly den) {
  if (den.empty()) throw MathError("division by zero");
  ScalarExpr r;
  if (num.empty()) {
    r.num = Poly{};
    r.den = poly_one();
    return r;
  }
  if (!poly_is_one(den)) {
    Poly g = poly_gcd(num, den);
    if (!poly_is_one(g)) {
      num = poly_divide_exact_or_throw(num, g);
      den = poly_divide_exact_or_throw(den, g);
    }
    Rational lc = poly_leading(den)->second;
    if (lc != 1) {
      num = poly_scale(num, kOne / lc);
      den = poly_scale(den, kOne / lc);
    }
  }
  r.num = std::move(num);
  r.den = std::move(den);
  return r;
}

}  // namespace

ScalarExpr ScalarExpr::operator+(const ScalarExpr& o) const {
  if (poly_is_one(den) && poly_is_one(o.den)) {
    ScalarExpr r;
    r.num = poly_add(num, o.num);
    return r;
  }
  return make_normal(poly_add(poly_mul(num, o.den), poly_mul(o.num, den)),
                     poly_mul(den, o.den));
}

ScalarExpr ScalarExpr::operator-() const {
  ScalarExpr r;
  r.num = poly_neg(num);
  r.den = den;
  return r;
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const { return *this + (-o); }

ScalarExpr ScalarExpr::operator*(const ScalarExpr& o) const {
  if (poly_is_one(den) && poly_is_one(o.den)) {
    ScalarExpr r;
    r.num = poly_mul(num, o.num);
    return r;
  }
  return make_normal(poly_mul(num, o.num), poly_mul(den, o.den));
}

ScalarExpr ScalarExpr::operator/(const ScalarExpr& o) const {
  if (o.is_zero()) throw MathError("division by zero");
  return make_normal(poly_mul(num, o.den), poly_mul(den, o.num));
}

ScalarExpr ScalarExpr::pow(long e) const {
  if (e == 0) {
    if (is_zero()) throw MathError("0^0 is undefined");
    return ScalarExpr::integer(1);
  }
  bool inv = e < 0;
  unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  ScalarExpr acc = ScalarExpr::integer(1);
  ScalarExpr base = *this;
  while (k) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  if (inv) return ScalarExpr::integer(1) / acc;
  return acc;
}

// ---- derivative ----

namespace {

ScalarExpr mono_to_expr(const Monomial& m) {
  ScalarExpr r = ScalarExpr::integer(1);
  for (const auto& [s, e] : m) {
    ScalarExpr se;
    Monomial mm;
    mm[s] = 1;
    se.num.emplace(std::move(mm), kOne);
    r = r * se.pow(e);
  }
  return r;
}

ScalarExpr symbol_derivative(const Symbol& s, const std::string& var) {
  if (s.kind == Symbol::Var)
    return s.key == var ? ScalarExpr::integer(1) : ScalarExpr();
  ScalarExpr darg = s.arg->derivative(var);
  if (darg.is_zero()) return ScalarExpr();
  switch (s.kind) {
    case Symbol::Sin:
      return ScalarExpr::apply_fn(Symbol::Cos, *s.arg) * darg;
    case Symbol::Cos:
      return -(ScalarExpr::apply_fn(Symbol::Sin, *s.arg) * darg);
    case Symbol::Exp:
      return ScalarExpr::apply_fn(Symbol::Exp, *s.arg) * darg;
  }
  throw MathError("corrupt symbol");
}

ScalarExpr poly_derivative(const Poly& p, const std::string& var) {
  ScalarExpr sum;
  for (const auto& [m, c] : p) {
    for (const auto& [s, e] : m) {
      ScalarExpr ds = symbol_derivative(s, var);
      if (ds.is_zero()) continue;
      Monomial rest = m;
      if (e == 1)
        rest.erase(s);
      else
        rest[s] = e - 1;
      sum = sum + ScalarExpr::rational(c * e) * mono_to_expr(rest) * ds;
    }
  }
  return sum;
}

}  // namespace

ScalarExpr ScalarExpr::derivative(const std::string& var) const {
  ScalarExpr dn = poly_derivative(num, var);
  if (poly_is_one(den)) return dn;
  ScalarExpr dd = poly_derivative(den, var);
  ScalarExpr n, d;
  n.num = num;
  d.num = den;
  // (n/d)' = (n' d - n d') / d^2
  return (dn * d - n * dd) / (d * d);
}

// ---- substitution and evaluation ----

namespace {

ScalarExpr poly_substitute(const Poly& p, const std::map<std::string, ScalarExpr>& values) {
  ScalarExpr sum;
  for (const auto& [m, c] : p) {
    ScalarExpr term = ScalarExpr::rational(c);
    for (const auto& [s, e] : m) {
      ScalarExpr base;
      if (s.kind == Symbol::Var) {
        auto it = values.find(s.key);
        base = it != values.end() ? it->second : ScalarExpr::variable(s.key);
      } else {
        base = ScalarExpr::apply_fn(s.kind, s.arg->substitute(values));
      }
      term = term * base.pow(e);
    }
    sum = sum + term;
  }
  return sum;
}

double poly_eval(const Poly& p, const std::map<std::string, double>& values) {
  double sum = 0;
  for (const auto& [m, c] : p) {
    double term = c.convert_to<double>();
    for (const auto& [s, e] : m) {
      double base;
      if (s.kind == Symbol::Var) {
        auto it = values.find(s.key);
        if (it == values.end()) throw MathError("unbound variable " + s.key);
        base = it->second;
      } else {
        double a = s.arg->eval(values);
        base = s.kind == Symbol::Sin ? std::sin(a) : s.kind == Symbol::Cos ? std::cos(a) : std::exp(a);
      }
      term *= std::pow(base, e);
    }
    sum += term;
  }
  return sum;
}

}  // namespace

ScalarExpr ScalarExpr::substitute(const std::map<std::string, ScalarExpr>& values) const {
  ScalarExpr n = poly_substitute(num, values);
  if (poly_is_one(den)) return n;
  ScalarExpr d = poly_substitute(den, values);
  return n / d;
}

double ScalarExpr::eval(const std::map<std::string, double>& values) const {
  double n = poly_eval(num, values);
  if (poly_is_one(den)) return n;
  double d = poly_eval(den, values);
  if (d == 0) throw MathError("division by zero in numeric evaluation");
  return n / d;
}

namespace {

void collect_from_poly(const Poly& p, std::set<std::string>& out) {
  for (const auto& [m, c] : p)
    for (const auto& [s, e] : m) {
      if (s.kind == Symbol::Var) {
        out.insert(s.key);
      } else {
        std::vector<std::string> inner;
        s.arg->collect_variables(inner);
        out.insert(inner.begin(), inner.end());
      }
    }
}

}  // namespace

void ScalarExpr::collect_variables(std::vector<std::string>& out) const {
  std::set<std::string> vars(out.begin(), out.end());
  collect_from_poly(num, vars);
  collect_from_poly(den, vars);
  out.assign(vars.begin(), vars.end());
}

bool ScalarExpr::depends_on(const std::string& var) const {
  std::vector<std::string> vars;
  collect_variables(vars);
  return std::find(vars.begin(), vars.end(), var) != vars.end();
}

// ---- printing ----

namespace {

std::string mono_str(const Monomial& m) {
  std::string out;
  for (const auto& [s, e] : m) {
    if (!out.empty()) out += "*";
    out += s.str();
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

}  // namespace

std::string poly_str(const Poly& p) {
  if (p.empty()) return "0";
  std::vector<Poly::const_iterator> terms;
  for (auto it = p.begin(); it != p.end(); ++it) terms.push_back(it);
  std::sort(terms.begin(), terms.end(), [](auto a, auto b) {
    return mono_lex_less(b->first, a->first);  // descending
  });
  std::string out;
  bool first = true;
  for (auto it : terms) {
    Rational c = it->second;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    std::string ms = mono_str(it->first);
    if (ms.empty()) {
      out += rational_str(c);
    } else if (c == 1) {
      out += ms;
    } else {
      out += rational_str(c) + "*" + ms;
    }
  }
  return out;
}

std::string ScalarExpr::str() const {
  if (num.empty()) return "0";
  if (poly_is_one(den)) return poly_str(num);
  return "(" + poly_str(num) + ")/(" + poly_str(den) + ")";
}

// ---- parser ----

namespace {

struct Token {
  enum Type { Number, Ident, Op, End } type;
  std::string text;
  Rational value;
  int line, col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line, col;

  Lexer(const std::string& s, int line0, int col0) : src(s), line(line0), col(col0) {}

  void advance() {
    if (src[pos] == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    pos++;
  }

  Token next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) advance();
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size()) {
      t.type = Token::End;
      return t;
    }
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        digits += src[pos];
        advance();
      }
      t.type = Token::Number;
      t.text = digits;
      t.value = Rational(BigInt(digits));
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        name += src[pos];
        advance();
      }
      t.type = Token::Ident;
      t.text = name;
      return t;
    }
    if (std::string("+-*/^()").find(c) != std::string::npos) {
      t.type = Token::Op;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
};

struct Parser {
  Lexer lex;
  Token cur;

  Parser(const std::string& s, int line0, int col0) : lex(s, line0, col0) { cur = lex.next(); }

  void bump() { cur = lex.next(); }

  bool at_op(const char* s) const { return cur.type == Token::Op && cur.text == s; }

  void expect_op(const char* s) {
    if (!at_op(s))
      throw ParseError(std::string("expected '") + s + "'", cur.line, cur.col);
    bump();
  }

  ExprNode parse_expression() {
    ExprNode left = parse_term();
    while (at_op("+") || at_op("-")) {
      char op = cur.text[0];
      int l = cur.line, c = cur.col;
      bump();
      ExprNode right = parse_term();
      ExprNode node;
      node.tag = ExprNode::Binary;
      node.op = op;
      node.line = l;
      node.col = c;
      node.kids = {std::move(left), std::move(right)};
      left = std::move(node);
    }
    return left;
  }

  ExprNode parse_term() {
    ExprNode left = parse_unary();
    while (at_op("*") || at_op("/")) {
      char op = cur.text[0];
      int l = cur.line, c = cur.col;
      bump();
      ExprNode right = parse_unary();
      ExprNode node;
      node.tag = ExprNode::Binary;
      node.op = op;
      node.line = l;
      node.col = c;
      node.kids = {std::move(left), std::move(right)};
      left = std::move(node);
    }
    return left;
  }

  ExprNode parse_unary() {
    if (at_op("-")) {
      int l = cur.line, c = cur.col;
      bump();
      ExprNode node;
      node.tag = ExprNode::Unary;
      node.op = '-';
      node.line = l;
      node.col = c;
      node.kids.push_back(parse_unary());
      return node;
    }
    return parse_power();
  }

  ExprNode parse_power() {
    ExprNode base = parse_primary();
    while (at_op("^")) {
      int l = cur.line, c = cur.col;
      bump();
      bool neg = false;
      if (at_op("-")) {
        neg = true;
        bump();
      }
      if (cur.type != Token::Number)
        throw ParseError("exponent must be an integer literal", cur.line, cur.col);
      if (cur.text.size() > 4)
        throw ParseError("exponent out of range", cur.line, cur.col);
      long e = std::stol(cur.text);
      bump();
      ExprNode node;
      node.tag = ExprNode::Binary;
      node.op = '^';
      node.line = l;
      node.col = c;
      node.exponent = neg ? -e : e;
      node.kids.push_back(std::move(base));
      base = std::move(node);
    }
    return base;
  }

  ExprNode parse_primary() {
    if (cur.type == Token::Number) {
      ExprNode node;
      node.tag = ExprNode::Number;
      node.number = cur.value;
      node.line = cur.line;
      node.col = cur.col;
      bump();
      return node;
    }
    if (cur.type == Token::Ident) {
      std::string name = cur.text;
      int l = cur.line, c = cur.col;
      bump();
      if (at_op("(")) {
        if (name != "sin" && name != "cos" && name != "exp")
          throw ParseError("unknown function '" + name + "'", l, c);
        bump();
        ExprNode arg = parse_expression();
        expect_op(")");
        ExprNode node;
        node.tag = ExprNode::Call;
        node.name = name;
        node.line = l;
        node.col = c;
        node.kids.push_back(std::move(arg));
        return node;
      }
      ExprNode node;
      node.tag = ExprNode::Ident;
      node.name = name;
      node.line = l;
      node.col = c;
      return node;
    }
    if (at_op("(")) {
      bump();
      ExprNode inner = parse_expression();
      expect_op(")");
      return inner;
    }
    throw ParseError("expected expression", cur.line, cur.col);
  }
};

ScalarExpr build_scalar(const ExprNode& n) {
  switch (n.tag) {
    case ExprNode::Number:
      return ScalarExpr::rational(n.number);
    case ExprNode::Ident:
      return ScalarExpr::variable(n.name);
    case ExprNode::Unary:
      return -build_scalar(n.kids[0]);
    case ExprNode::Binary: {
      if (n.op == '^') return build_scalar(n.kids[0]).pow(n.exponent);
      ScalarExpr a = build_scalar(n.kids[0]);
      ScalarExpr b = build_scalar(n.kids[1]);
      switch (n.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          if (b.is_zero()) throw ParseError("division by zero", n.line, n.col);
          return a / b;
      }
      throw MathError("corrupt syntax tree");
    }
    case ExprNode::Call: {
      ScalarExpr a = build_scalar(n.kids[0]);
      int kind = n.name == "sin" ? Symbol::Sin : n.name == "cos" ? Symbol::Cos : Symbol::Exp;
      return ScalarExpr::apply_fn(kind, a);
    }
  }
  throw MathError("corrupt syntax tree");
}

}  // namespace

ExprNode parse_expr_tree(const std::string& text, int line0, int col0) {
  Parser p(text, line0, col0);
  ExprNode root = p.parse_expression();
  if (p.cur.type != Token::End)
    throw ParseError("unexpected trailing input", p.cur.line, p.cur.col);
  return root;
}

ScalarExpr parse_scalar(const std::string& text, int line0, int col0) {
  return build_scalar(parse_expr_tree(text, line0, col0));
}

// ---- matrix helpers ----

int scalar_matrix_rank(std::vector<std::vector<ScalarExpr>> m) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  // clear denominators row by row; multiplying a row by a nonzero scalar
  // leaves the rank alone
  std::vector<std::vector<Poly>> a(rows, std::vector<Poly>(cols));
  for (size_t i = 0; i < rows; i++) {
    Poly common = poly_one();
    for (size_t j = 0; j < cols; j++) common = poly_mul(common, m[i][j].den);
    for (size_t j = 0; j < cols; j++) {
      Poly rest;
      if (!poly_divide_exact(common, m[i][j].den, rest))
        throw MathError("internal rank error");
      a[i][j] = poly_mul(m[i][j].num, rest);
    }
  }
  size_t rank = 0;
  Poly prev = poly_one();
  for (size_t col = 0; col < cols && rank < rows; col++) {
    size_t piv = rank;
    while (piv < rows && a[piv][col].empty()) piv++;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (size_t i = rank + 1; i < rows; i++) {
      for (size_t j = col + 1; j < cols; j++) {
        Poly t = poly_sub(poly_mul(a[rank][col], a[i][j]), poly_mul(a[i][col], a[rank][j]));
        Poly q;
        if (poly_divide_exact(t, prev, q))
          a[i][j] = std::move(q);
        else
          a[i][j] = std::move(t);  // growth fallback, still exact
      }
      a[i][col] = Poly{};
    }
    prev = a[rank][col];
    rank++;
  }
  return static_cast<int>(rank);
}

std::vector<std::vector<ScalarExpr>> scalar_matrix_invert(
    std::vector<std::vector<ScalarExpr>> m) {
  size_t n = m.size();
  std::vector<std::vector<ScalarExpr>> inv(n, std::vector<ScalarExpr>(n));
  for (size_t i = 0; i < n; i++) {
    if (m[i].size() != n) throw MathError("matrix is not square");
    inv[i][i] = ScalarExpr::integer(1);
  }
  for (size_t col = 0; col < n; col++) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) piv++;
    if (piv == n) throw MathError("matrix is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    ScalarExpr p = m[col][col];
    for (size_t j = 0; j < n; j++) {
      m[col][j] = m[col][j] / p;
      inv[col][j] = inv[col][j] / p;
    }
    for (size_t i = 0; i < n; i++) {
      if (i == col || m[i][col].is_zero()) continue;
      ScalarExpr f = m[i][col];
      for (size_t j = 0; j < n; j++) {
        m[i][j] = m[i][j] - f * m[col][j];
        inv[i][j] = inv[i][j] - f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace supermech
