#pragma once

// Lagrangian side of the engine: Cartan forms, energy, regularity analysis
// and the dynamics field, all over a tangent or super tangent chart.

#include "supermech/forms.hpp"

namespace supermech {

// transpose action of the vertical endomorphism on 1-forms:
// (s_transpose a)(Y) = a(S(Y)), reconstructed through the dual pairing
GradedForm s_transpose(const GradedForm& a);

struct RegularityReport {
  std::string parity_case;         // "even" | "odd"
  std::string hessian_order;       // operator order used for the blocks
  std::optional<GradedMatrix> vv;  // even case: velocity-velocity block
  std::optional<GradedMatrix> zz;  // even case: odd-odd block
  std::optional<GradedMatrix> zv;  // odd case: odd-velocity block
  bool blocks_invertible = false;
  int omega_body_rank = 0;
  int omega_full_rank = 0;  // rank needed for a nondegenerate two-form
  bool criteria_agree = false;
  bool regular = false;
  std::vector<std::string> reasons;  // empty when regular
  std::string str() const;
};

class LagrangianSystem {
 public:
  // chart kind must be tangent or tangent-super; the function homogeneous
  LagrangianSystem(ChartPtr cs, SuperFunction lagrangian);

  const ChartPtr& chart() const { return cs_; }
  const SuperFunction& lagrangian() const { return L_; }
  int parity() const { return parity_; }

  const GradedForm& cartan_one_form() const { return theta_; }
  const GradedForm& cartan_two_form() const { return omega_; }
  const SuperFunction& energy() const { return energy_; }
  // Delta applied to the lagrangian (the action function)
  const SuperFunction& action() const { return action_; }

  const RegularityReport& regularity() const;

  // unique even field with i_Gamma omega = d energy; plain tangent chart
  // only, needs a regular lagrangian.  The solution is verified before it is
  // returned: zero residual, even parity, the second-order property and the
  // action identity all checked symbolically.
  const SuperVectorField& dynamics() const;

  // equations of motion as (coordinate + "'", right hand side) in chart order
  std::vector<std::pair<std::string, SuperFunction>> euler_lagrange() const;

 private:
  ChartPtr cs_;
  SuperFunction L_;
  int parity_ = 0;
  GradedForm theta_, omega_;
  SuperFunction action_, energy_;
  mutable std::optional<RegularityReport> reg_;
  mutable std::optional<SuperVectorField> gamma_;
};

}  // namespace supermech
