#pragma once

// Derivations of the function ring: fields on a single chart, fields along a
// morphism, the total time derivative, vertical lifts, the vertical
// endomorphism and the Liouville field.  A component always stands to the
// left of the derivative it multiplies.

#include <optional>

#include "supermech/charts.hpp"

namespace supermech {

struct SuperVectorField {
  ChartPtr cs_;
  // coordinate name -> component; missing entries are zero
  std::map<std::string, SuperFunction> comps_;

  SuperVectorField() = default;
  explicit SuperVectorField(ChartPtr cs) : cs_(std::move(cs)) {}
  static SuperVectorField coordinate_field(const ChartPtr& cs, const std::string& name);

  const ChartPtr& chart() const { return cs_; }
  SuperFunction component(const std::string& name) const;
  void set_component(const std::string& name, const SuperFunction& f);

  SuperFunction apply(const SuperFunction& f) const;

  // 0 even, 1 odd, nullopt for mixed; the zero field counts as even
  std::optional<int> parity() const;
  SuperVectorField parity_part(int p) const;

  SuperVectorField operator+(const SuperVectorField& o) const;
  SuperVectorField operator-(const SuperVectorField& o) const;
  SuperVectorField operator-() const;
  SuperVectorField scale(const SuperFunction& c) const;

  bool is_zero() const;
  bool operator==(const SuperVectorField& o) const;
  bool operator!=(const SuperVectorField& o) const { return !(*this == o); }
  std::string str() const;
};

// X along phi: N -> M.  Components are functions over N, one per M
// coordinate; X(f) = sum comp * phi^*(df/dcoord) and the Leibniz rule holds
// relative to phi^*.
struct FieldAlongMorphism {
  SuperMorphism phi_;
  std::map<std::string, SuperFunction> comps_;

  FieldAlongMorphism() = default;
  explicit FieldAlongMorphism(SuperMorphism phi) : phi_(std::move(phi)) {}

  const SuperMorphism& morphism() const { return phi_; }
  SuperFunction component(const std::string& target_coord) const;
  void set_component(const std::string& target_coord, const SuperFunction& f);

  SuperFunction apply(const SuperFunction& f_over_target) const;

  std::optional<int> parity() const;
  FieldAlongMorphism parity_part(int p) const;
  FieldAlongMorphism operator+(const FieldAlongMorphism& o) const;
  FieldAlongMorphism operator-(const FieldAlongMorphism& o) const;

  bool is_zero() const;
  bool operator==(const FieldAlongMorphism& o) const;
  bool operator!=(const FieldAlongMorphism& o) const { return !(*this == o); }
  std::string str() const;
};

// hat X = phi^* after X: pull every component of a field on M back to N
FieldAlongMorphism hat_restrict(const SuperVectorField& X, const SuperMorphism& phi);

// T phi(Y) = Y after phi^*: push a field on N to a field along phi
FieldAlongMorphism push_along(const SuperVectorField& Y, const SuperMorphism& phi);

// does phi drop the fiber coordinates of its source and keep the rest fixed
bool is_canonical_projection(const SuperMorphism& phi);

enum class ProjectStatus { Projectable, NotProjectable, Undecided };
struct Projection {
  ProjectStatus status = ProjectStatus::Undecided;
  std::optional<SuperVectorField> field;  // set when Projectable
};

// Decide whether T phi(Y) comes from a field on the target.  Only canonical
// projections are decided (component independence from the fiber
// coordinates); any other morphism reports Undecided.
Projection project_field(const SuperVectorField& Y, const SuperMorphism& phi);

// The canonical field along the bundle projection of a tangent-type chart:
// on the plain chart T(qhat) = v, T(thhat) = z; on the super chart the pi
// partner is added, T(qhat) = v + pv, T(thhat) = z + pz.
FieldAlongMorphism total_time_derivative(const ChartPtr& big);

// f^V = sum (dF/dq) v + sum (dF/dth) z with F the lift of f to the chart;
// on the super chart the weights are (v + pv) and (z + pz).  The derivative
// factor stays left of the fiber weight.
SuperFunction vertical_lift_function(const SuperFunction& f_on_base, const ChartPtr& big);

// Component copy into the fiber slots: q-components feed v (and pv on the
// super chart), th-components feed z (and pz).  Non-homogeneous input is
// lifted per parity part and summed; the lift map is the same for both
// parities, so this equals the direct copy.
SuperVectorField vertical_lift_field(const SuperVectorField& X_on_base, const ChartPtr& big);
SuperVectorField vertical_lift_field(const FieldAlongMorphism& X_along_projection);

// S(Y): push Y down along the bundle projection, then lift vertically
SuperVectorField vertical_endomorphism(const SuperVectorField& Y);

// Liouville field: the vertical lift of the total time derivative
SuperVectorField liouville_field(const ChartPtr& big);

// A field along phi: N -> M (M a base chart) as a morphism N -> ST(M) over
// phi.  Fiber assignments split each component by parity:
//   v  <- even part of the q component     pv <- odd part
//   z  <- odd part of the th component     pz <- even part
SuperMorphism section_from_field(const FieldAlongMorphism& X);

// inverse tables; the section must land in a tangent-super chart
FieldAlongMorphism field_from_section(const SuperMorphism& sec);

}  // namespace supermech
