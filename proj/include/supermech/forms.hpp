#pragma once

// Bigraded exterior calculus.  A k-form is a sum of terms c * dx_1^...^dx_k
// with the coefficient on the left and the differentials sorted by chart
// position.  Every differential carries bidegree (1, |x|); the sign rules
// below follow from that:
//   adjacent swap dx^dy -> dy^dx costs (-1)^(1 + |x||y|), so a repeated even
//     differential dies while dth^dth survives with multiplicity;
//   moving a coefficient c through dx costs (-1)^(|c||x|);
//   df = sum_x (-1)^|x| dx * (df/dx), which makes i_Z(df) = Z(f) for every
//     field Z with the pairing i_X(dq) = X^q, i_X(dth) = -X^th.

#include "supermech/fields.hpp"

namespace supermech {

// coordinate positions, ascending; repetition allowed for odd coordinates
using DiffMono = std::vector<int>;

struct GradedForm {
  ChartPtr cs_;
  int degree_ = 0;
  std::map<DiffMono, SuperFunction> terms_;

  GradedForm() = default;
  GradedForm(ChartPtr cs, int degree) : cs_(std::move(cs)), degree_(degree) {}
  static GradedForm from_function(const SuperFunction& f);
  static GradedForm differential(const ChartPtr& cs, const std::string& name);

  const ChartPtr& chart() const { return cs_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }

  SuperFunction coefficient(const DiffMono& d) const;
  // normalizes the monomial (sort + sign, drop repeated even differentials)
  void add_term(DiffMono d, const SuperFunction& c);

  GradedForm operator+(const GradedForm& o) const;
  GradedForm operator-(const GradedForm& o) const;
  GradedForm operator-() const;
  GradedForm scale(const SuperFunction& c) const;  // left multiplication
  bool operator==(const GradedForm& o) const;
  bool operator!=(const GradedForm& o) const { return !(*this == o); }

  // |coefficient| + number of odd differentials, when homogeneous
  std::optional<int> grassmann_parity() const;

  std::string str() const;
};

GradedForm wedge(const GradedForm& a, const GradedForm& b);
GradedForm exterior_derivative(const GradedForm& a);
// df as a 1-form
GradedForm differential_of(const SuperFunction& f);
GradedForm interior_product(const SuperVectorField& X, const GradedForm& a);
// omega(X1, ..., Xk), contracting X1 first
SuperFunction evaluate_form(const GradedForm& a, const std::vector<SuperVectorField>& Xs);

// Same term structure over the differentials of the target chart, with the
// coefficients over the source.  The dual pairing matches the plain one:
// dqhat(d/dqhat) = 1, dthhat(d/dthhat) = -1.
struct FormAlongMorphism {
  SuperMorphism phi_;
  int degree_ = 0;
  std::map<DiffMono, SuperFunction> terms_;

  FormAlongMorphism() = default;
  FormAlongMorphism(SuperMorphism phi, int degree)
      : phi_(std::move(phi)), degree_(degree) {}

  const SuperMorphism& morphism() const { return phi_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  SuperFunction coefficient(const DiffMono& d) const;
  void add_term(DiffMono d, const SuperFunction& c);

  bool operator==(const FormAlongMorphism& o) const;
  bool operator!=(const FormAlongMorphism& o) const { return !(*this == o); }
  std::string str() const;
};

// coefficients pulled back through phi, differentials unchanged
FormAlongMorphism restrict_form(const GradedForm& omega, const SuperMorphism& phi);

// the along-form with the same coefficients, for a form over the source of a
// bundle projection whose differentials only touch base coordinates
FormAlongMorphism semibasic_inverse(const GradedForm& omega, const SuperMorphism& projection);

// substitute each d(xhat) by (-1)^|x| d(phi^*(x)) and multiply out
GradedForm sharp(const FormAlongMorphism& omega);

// sharp(restrict): functorial, commutes with d
GradedForm pullback_form(const SuperMorphism& phi, const GradedForm& omega);

// degree-1 pairing omega(X) for a field along the same morphism
SuperFunction pairing_along(const FormAlongMorphism& omega, const FieldAlongMorphism& X);

// The section of the super phase bundle attached to a 1-form on the base:
// base coordinates go to themselves, momenta to the parity parts of the
// matching coefficient (p and pp split the dq coefficient, eta and peta the
// dth one).  Pulling the canonical one-form back along it recovers the form.
SuperMorphism section_of_one_form(const GradedForm& omega);

// p dq + eta dth on the plain cotangent chart; (p + pp) dq + (eta + peta) dth
// on the super one; pp dq + peta dth on the odd momentum sector
GradedForm liouville_form(const ChartPtr& cs);
GradedForm canonical_two_form(const ChartPtr& cs);  // -d of the above

// M[i][j] = omega(d/dx_i, d/dx_j) in chart order, for a 2-form
GradedMatrix form_matrix(const GradedForm& omega);

}  // namespace supermech
