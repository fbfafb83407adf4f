#pragma once

// Functions on a coordinate superdomain: finite sums  sum_I c_I(x) * g_I
// where x runs over the even coordinates, g_I is a sorted product of odd
// generator coordinates and c_I is a scalar expression.  Odd generators
// anticommute among themselves and commute with everything even; the sign
// bookkeeping lives in mul/left_derivative.  Coefficients are always stored
// to the left of their generator monomial.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "supermech/scalar.hpp"

namespace supermech {

enum class Role {
  Position,       // q, even
  OddPosition,    // th, odd
  Velocity,       // v, even
  OddVelocity,    // z, odd
  PiVelocity,     // pv, odd
  PiOddVelocity,  // pz, even
  Momentum,       // p, even
  OddMomentum,    // eta, odd
  PiMomentum,     // pp, odd
  PiOddMomentum,  // peta, even
};

int role_parity(Role r);

struct Coordinate {
  std::string name;
  Role role;
  bool operator==(const Coordinate& o) const { return name == o.name && role == o.role; }
};

struct CoordinateSystem {
  std::string kind;  // base | tangent | tangent-super | cotangent | cotangent-super | odd-momentum-sector
  int m = 0;         // even position count
  int n = 0;         // odd position count
  std::vector<Coordinate> coords;  // chart order; differentials sort by this order

  std::map<std::string, int> index;  // name -> position in coords
  std::vector<int> odd_positions;    // positions of odd coordinates, chart order
  std::map<std::string, int> odd_id; // odd coordinate name -> dense odd id

  void finalize();
  bool has(const std::string& name) const { return index.count(name) != 0; }
  int position(const std::string& name) const;
  int parity_of(const std::string& name) const;
  int odd_count() const { return static_cast<int>(odd_positions.size()); }
  const std::string& odd_name(int id) const { return coords[odd_positions[id]].name; }
  bool operator==(const CoordinateSystem& o) const {
    return kind == o.kind && m == o.m && n == o.n && coords == o.coords;
  }
  std::string str() const;  // "tangent-super(1,2)[q1,v1,...]"
};

using ChartPtr = std::shared_ptr<const CoordinateSystem>;

// sorted ascending odd ids; ordered by (length, lex) for stable printing
using OddMono = std::vector<int>;
struct OddMonoLess {
  bool operator()(const OddMono& a, const OddMono& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class SuperFunction {
 public:
  SuperFunction() = default;
  explicit SuperFunction(ChartPtr cs) : cs_(std::move(cs)) {}

  static SuperFunction from_scalar(ChartPtr cs, const ScalarExpr& c);
  static SuperFunction from_rational(ChartPtr cs, const Rational& r);
  // any coordinate by name: even becomes a scalar variable, odd a generator
  static SuperFunction coordinate(ChartPtr cs, const std::string& name);

  const ChartPtr& chart() const { return cs_; }
  bool is_zero() const { return terms_.empty(); }

  SuperFunction operator+(const SuperFunction& o) const;
  SuperFunction operator-(const SuperFunction& o) const;
  SuperFunction operator*(const SuperFunction& o) const;
  SuperFunction operator-() const;
  bool operator==(const SuperFunction& o) const;
  bool operator!=(const SuperFunction& o) const { return !(*this == o); }

  SuperFunction scale(const ScalarExpr& c) const;
  SuperFunction pow(long e) const;

  // 0 even, 1 odd, nullopt for a mixed-parity sum (zero counts as even)
  std::optional<int> parity() const;
  SuperFunction parity_part(int p) const;

  ScalarExpr body() const;
  SuperFunction soul() const;
  SuperFunction invert() const;  // throws MathError when the body vanishes

  SuperFunction left_derivative(const std::string& coord) const;

  // evaluate the body at a numeric even-coordinate point (odd part dropped)
  double eval_body(const std::map<std::string, double>& at) const;

  const std::map<OddMono, ScalarExpr, OddMonoLess>& terms() const { return terms_; }
  ScalarExpr coefficient(const OddMono& m) const;
  void set_coefficient(const OddMono& m, const ScalarExpr& c);

  std::string str() const;

 private:
  ChartPtr cs_;
  std::map<OddMono, ScalarExpr, OddMonoLess> terms_;
  void add_term(const OddMono& m, const ScalarExpr& c);
  void check_compatible(const SuperFunction& o) const;
};

// Evaluate a scalar expression in the superfunction ring: every variable is
// replaced through `lookup` (return an empty optional to keep it as a scalar
// parameter).  Transcendental atoms require soul-free arguments.
SuperFunction eval_scalar_over(
    const ScalarExpr& e, ChartPtr cs,
    const std::function<std::optional<SuperFunction>(const std::string&)>& lookup);

// Build a superfunction from a parsed expression tree; identifiers that name
// chart coordinates become coordinates, everything else stays a parameter.
SuperFunction build_superfunction(ChartPtr cs, const ExprNode& node);
SuperFunction parse_superfunction(ChartPtr cs, const std::string& text, int line0 = 1,
                                  int col0 = 1);

class GradedMatrix {
 public:
  GradedMatrix() = default;
  GradedMatrix(ChartPtr cs, int rows, int cols);
  static GradedMatrix identity(ChartPtr cs, int nn);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  SuperFunction& at(int i, int j) { return e_[i][j]; }
  const SuperFunction& at(int i, int j) const { return e_[i][j]; }

  GradedMatrix operator*(const GradedMatrix& o) const;
  GradedMatrix operator+(const GradedMatrix& o) const;
  GradedMatrix operator-(const GradedMatrix& o) const;
  bool operator==(const GradedMatrix& o) const;

  std::vector<std::vector<ScalarExpr>> body_matrix() const;
  int body_rank() const;

  // inverse through the body/soul split: with A = B + N, B the body part,
  // A^-1 = (I + B^-1 N)^-1 B^-1 and the Neumann series for the first factor
  // terminates at the odd dimension of the chart.  Throws MathError when the
  // body matrix is singular.
  GradedMatrix invert() const;

  std::string str() const;

 private:
  ChartPtr cs_;
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<SuperFunction>> e_;
};

}  // namespace supermech
