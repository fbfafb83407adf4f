#include "supermech/superfunction.hpp"

#include <algorithm>
#include <sstream>

namespace supermech {

int role_parity(Role r) {
  switch (r) {
    case Role::Position:
    case Role::Velocity:
    case Role::PiOddVelocity:
    case Role::Momentum:
    case Role::PiOddMomentum:
      return 0;
    case Role::OddPosition:
    case Role::OddVelocity:
    case Role::PiVelocity:
    case Role::OddMomentum:
    case Role::PiMomentum:
      return 1;
  }
  throw MathError("corrupt role");
}

void CoordinateSystem::finalize() {
  index.clear();
  odd_positions.clear();
  odd_id.clear();
  for (size_t i = 0; i < coords.size(); i++) {
    if (index.count(coords[i].name))
      throw MathError("duplicate coordinate name " + coords[i].name);
    index[coords[i].name] = static_cast<int>(i);
    if (role_parity(coords[i].role) == 1) {
      odd_id[coords[i].name] = static_cast<int>(odd_positions.size());
      odd_positions.push_back(static_cast<int>(i));
    }
  }
}

int CoordinateSystem::position(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw MathError("unknown coordinate " + name);
  return it->second;
}

int CoordinateSystem::parity_of(const std::string& name) const {
  return role_parity(coords[position(name)].role);
}

std::string CoordinateSystem::str() const {
  std::ostringstream os;
  os << kind << "(" << m << "," << n << ")[";
  for (size_t i = 0; i < coords.size(); i++) {
    if (i) os << ",";
    os << coords[i].name;
  }
  os << "]";
  return os.str();
}

// ---- SuperFunction ----

void SuperFunction::check_compatible(const SuperFunction& o) const {
  if (!cs_ || !o.cs_) throw MathError("superfunction without a chart");
  if (cs_ != o.cs_ && !(*cs_ == *o.cs_))
    throw MathError("chart mismatch: " + cs_->str() + " vs " + o.cs_->str());
}

void SuperFunction::add_term(const OddMono& m, const ScalarExpr& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

SuperFunction SuperFunction::from_scalar(ChartPtr cs, const ScalarExpr& c) {
  SuperFunction f(cs);
  if (!c.is_zero()) {
    std::vector<std::string> vars;
    c.collect_variables(vars);
    for (const auto& v : vars)
      if (cs->odd_id.count(v))
        throw MathError("odd coordinate " + v + " used as a scalar variable");
    f.terms_.emplace(OddMono{}, c);
  }
  return f;
}

SuperFunction SuperFunction::from_rational(ChartPtr cs, const Rational& r) {
  return from_scalar(std::move(cs), ScalarExpr::rational(r));
}

SuperFunction SuperFunction::coordinate(ChartPtr cs, const std::string& name) {
  int pos = cs->position(name);
  if (role_parity(cs->coords[pos].role) == 0)
    return from_scalar(std::move(cs), ScalarExpr::variable(name));
  SuperFunction f(cs);
  f.terms_.emplace(OddMono{cs->odd_id.at(name)}, ScalarExpr::integer(1));
  return f;
}

SuperFunction SuperFunction::operator+(const SuperFunction& o) const {
  check_compatible(o);
  SuperFunction r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

SuperFunction SuperFunction::operator-() const {
  SuperFunction r(cs_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

SuperFunction SuperFunction::operator-(const SuperFunction& o) const { return *this + (-o); }

namespace {

// sign of merging sorted odd monomials a and b; 0 when they share a generator
int merge_sign(const OddMono& a, const OddMono& b, OddMono& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  int inversions = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] moves past the remaining a-elements
      inversions += static_cast<int>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

SuperFunction SuperFunction::operator*(const SuperFunction& o) const {
  check_compatible(o);
  SuperFunction r(cs_);
  OddMono merged;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      int s = merge_sign(ma, mb, merged);
      if (s == 0) continue;
      ScalarExpr c = ca * cb;
      r.add_term(merged, s > 0 ? c : -c);
    }
  return r;
}

bool SuperFunction::operator==(const SuperFunction& o) const {
  check_compatible(o);
  return terms_ == o.terms_;
}

SuperFunction SuperFunction::scale(const ScalarExpr& c) const {
  SuperFunction r(cs_);
  for (const auto& [m, k] : terms_) r.add_term(m, k * c);
  return r;
}

SuperFunction SuperFunction::pow(long e) const {
  if (e < 0) return invert().pow(-e);
  SuperFunction acc = from_rational(cs_, Rational(1));
  for (long k = 0; k < e; k++) acc = acc * *this;
  return acc;
}

std::optional<int> SuperFunction::parity() const {
  std::optional<int> p;
  for (const auto& [m, c] : terms_) {
    int tp = static_cast<int>(m.size()) % 2;
    if (!p) {
      p = tp;
    } else if (*p != tp) {
      return std::nullopt;
    }
  }
  return p ? p : std::optional<int>(0);
}

SuperFunction SuperFunction::parity_part(int p) const {
  SuperFunction r(cs_);
  for (const auto& [m, c] : terms_)
    if (static_cast<int>(m.size()) % 2 == p) r.terms_.emplace(m, c);
  return r;
}

ScalarExpr SuperFunction::body() const {
  auto it = terms_.find(OddMono{});
  return it == terms_.end() ? ScalarExpr() : it->second;
}

SuperFunction SuperFunction::soul() const {
  SuperFunction r = *this;
  r.terms_.erase(OddMono{});
  return r;
}

SuperFunction SuperFunction::invert() const {
  ScalarExpr b = body();
  if (b.is_zero()) throw MathError("superfunction is not invertible: zero body");
  ScalarExpr binv = ScalarExpr::integer(1) / b;
  SuperFunction s = soul().scale(binv);
  SuperFunction acc = from_scalar(cs_, ScalarExpr::integer(1));
  SuperFunction p = acc;
  int sign = 1;
  for (int k = 1; k <= cs_->odd_count(); k++) {
    p = p * s;
    if (p.is_zero()) break;
    sign = -sign;
    acc = sign > 0 ? acc + p : acc - p;
  }
  return acc.scale(binv);
}

SuperFunction SuperFunction::left_derivative(const std::string& coord) const {
  int pos = cs_->position(coord);
  SuperFunction r(cs_);
  if (role_parity(cs_->coords[pos].role) == 0) {
    for (const auto& [m, c] : terms_) r.add_term(m, c.derivative(coord));
    return r;
  }
  int id = cs_->odd_id.at(coord);
  for (const auto& [m, c] : terms_) {
    auto it = std::find(m.begin(), m.end(), id);
    if (it == m.end()) continue;
    int before = static_cast<int>(it - m.begin());
    OddMono rest;
    rest.reserve(m.size() - 1);
    rest.insert(rest.end(), m.begin(), it);
    rest.insert(rest.end(), std::next(it), m.end());
    r.add_term(rest, before % 2 == 0 ? c : -c);
  }
  return r;
}

double SuperFunction::eval_body(const std::map<std::string, double>& at) const {
  return body().eval(at);
}

ScalarExpr SuperFunction::coefficient(const OddMono& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? ScalarExpr() : it->second;
}

void SuperFunction::set_coefficient(const OddMono& m, const ScalarExpr& c) {
  terms_.erase(m);
  add_term(m, c);
}

std::string SuperFunction::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    std::string mono;
    for (int id : m) {
      if (!mono.empty()) mono += "*";
      mono += cs_->odd_name(id);
    }
    std::string cs = c.str();
    std::string piece;
    if (mono.empty()) {
      piece = cs;
    } else if (cs == "1") {
      piece = mono;
    } else if (cs == "-1") {
      piece = "-" + mono;
    } else if (c.num.size() == 1 && c.den.size() == 1 && c.den.begin()->first.empty() &&
               c.den.begin()->second == 1) {
      piece = cs + "*" + mono;  // single monomial coefficient needs no parens
    } else {
      piece = "(" + cs + ")*" + mono;
    }
    if (out.empty()) {
      out = piece;
    } else if (piece.size() && piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

// ---- scalar evaluation in the superfunction ring ----

namespace {

SuperFunction eval_poly_over(
    const Poly& p, const ChartPtr& cs,
    const std::function<std::optional<SuperFunction>(const std::string&)>& lookup) {
  SuperFunction acc(cs);
  for (const auto& [m, c] : p) {
    SuperFunction term = SuperFunction::from_rational(cs, c);
    for (const auto& [s, e] : m) {
      SuperFunction base(cs);
      if (s.kind == Symbol::Var) {
        auto v = lookup(s.key);
        base = v ? *v : SuperFunction::from_scalar(cs, ScalarExpr::variable(s.key));
      } else {
        SuperFunction arg = eval_scalar_over(*s.arg, cs, lookup);
        if (!arg.soul().is_zero())
          throw MathError("transcendental function of a soul-containing argument");
        base = SuperFunction::from_scalar(cs, ScalarExpr::apply_fn(s.kind, arg.body()));
      }
      term = term * base.pow(e);
    }
    acc = acc + term;
  }
  return acc;
}

}  // namespace

SuperFunction eval_scalar_over(
    const ScalarExpr& e, ChartPtr cs,
    const std::function<std::optional<SuperFunction>(const std::string&)>& lookup) {
  SuperFunction n = eval_poly_over(e.num, cs, lookup);
  bool den_one = e.den.size() == 1 && e.den.begin()->first.empty() && e.den.begin()->second == 1;
  if (den_one) return n;
  SuperFunction d = eval_poly_over(e.den, cs, lookup);
  return n * d.invert();
}

SuperFunction build_superfunction(ChartPtr cs, const ExprNode& node) {
  switch (node.tag) {
    case ExprNode::Number:
      return SuperFunction::from_rational(cs, node.number);
    case ExprNode::Ident:
      if (cs->has(node.name)) return SuperFunction::coordinate(cs, node.name);
      return SuperFunction::from_scalar(cs, ScalarExpr::variable(node.name));
    case ExprNode::Unary:
      return -build_superfunction(cs, node.kids[0]);
    case ExprNode::Binary: {
      if (node.op == '^') {
        SuperFunction b = build_superfunction(cs, node.kids[0]);
        try {
          return b.pow(node.exponent);
        } catch (const MathError& e) {
          throw ParseError(e.what(), node.line, node.col);
        }
      }
      SuperFunction a = build_superfunction(cs, node.kids[0]);
      SuperFunction b = build_superfunction(cs, node.kids[1]);
      switch (node.op) {
        case '+':
          return a + b;
        case '-':
          return a - b;
        case '*':
          return a * b;
        case '/':
          try {
            return a * b.invert();
          } catch (const MathError& e) {
            throw ParseError(e.what(), node.line, node.col);
          }
      }
      throw MathError("corrupt syntax tree");
    }
    case ExprNode::Call: {
      SuperFunction a = build_superfunction(cs, node.kids[0]);
      if (!a.soul().is_zero())
        throw ParseError("transcendental function of a soul-containing argument", node.line,
                         node.col);
      int kind = node.name == "sin" ? Symbol::Sin : node.name == "cos" ? Symbol::Cos : Symbol::Exp;
      return SuperFunction::from_scalar(cs, ScalarExpr::apply_fn(kind, a.body()));
    }
  }
  throw MathError("corrupt syntax tree");
}

SuperFunction parse_superfunction(ChartPtr cs, const std::string& text, int line0, int col0) {
  return build_superfunction(std::move(cs), parse_expr_tree(text, line0, col0));
}

// ---- GradedMatrix ----

GradedMatrix::GradedMatrix(ChartPtr cs, int rows, int cols)
    : cs_(std::move(cs)), rows_(rows), cols_(cols) {
  e_.assign(rows_, std::vector<SuperFunction>(cols_, SuperFunction(cs_)));
}

GradedMatrix GradedMatrix::identity(ChartPtr cs, int nn) {
  GradedMatrix m(cs, nn, nn);
  for (int i = 0; i < nn; i++)
    m.e_[i][i] = SuperFunction::from_scalar(cs, ScalarExpr::integer(1));
  return m;
}

GradedMatrix GradedMatrix::operator*(const GradedMatrix& o) const {
  if (cols_ != o.rows_) throw MathError("matrix shape mismatch");
  GradedMatrix r(cs_, rows_, o.cols_);
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < o.cols_; j++) {
      SuperFunction s(cs_);
      for (int k = 0; k < cols_; k++) s = s + e_[i][k] * o.e_[k][j];
      r.e_[i][j] = std::move(s);
    }
  return r;
}

GradedMatrix GradedMatrix::operator+(const GradedMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw MathError("matrix shape mismatch");
  GradedMatrix r(cs_, rows_, cols_);
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) r.e_[i][j] = e_[i][j] + o.e_[i][j];
  return r;
}

GradedMatrix GradedMatrix::operator-(const GradedMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw MathError("matrix shape mismatch");
  GradedMatrix r(cs_, rows_, cols_);
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) r.e_[i][j] = e_[i][j] - o.e_[i][j];
  return r;
}

bool GradedMatrix::operator==(const GradedMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++)
      if (e_[i][j] != o.e_[i][j]) return false;
  return true;
}

std::vector<std::vector<ScalarExpr>> GradedMatrix::body_matrix() const {
  std::vector<std::vector<ScalarExpr>> b(rows_, std::vector<ScalarExpr>(cols_));
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) b[i][j] = e_[i][j].body();
  return b;
}

int GradedMatrix::body_rank() const { return scalar_matrix_rank(body_matrix()); }

GradedMatrix GradedMatrix::invert() const {
  if (rows_ != cols_) throw MathError("matrix is not square");
  auto binv_scalar = scalar_matrix_invert(body_matrix());
  GradedMatrix binv(cs_, rows_, rows_);
  GradedMatrix nsoul(cs_, rows_, rows_);
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < rows_; j++) {
      binv.e_[i][j] = SuperFunction::from_scalar(cs_, binv_scalar[i][j]);
      nsoul.e_[i][j] = e_[i][j].soul();
    }
  GradedMatrix m = binv * nsoul;
  GradedMatrix acc = identity(cs_, rows_);
  GradedMatrix p = acc;
  int sign = 1;
  for (int k = 1; k <= cs_->odd_count(); k++) {
    p = p * m;
    sign = -sign;
    acc = sign > 0 ? acc + p : acc - p;
  }
  return acc * binv;
}

std::string GradedMatrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; i++) {
    os << "[";
    for (int j = 0; j < cols_; j++) {
      if (j) os << ", ";
      os << e_[i][j].str();
    }
    os << "]";
    if (i + 1 < rows_) os << "\n";
  }
  return os.str();
}

}  // namespace supermech
