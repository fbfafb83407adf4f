#include "supermech/fields.hpp"

#include <sstream>

namespace supermech {

namespace {

bool same_chart(const ChartPtr& a, const ChartPtr& b) { return a == b || *a == *b; }

std::vector<std::string> names_with_role(const ChartPtr& cs, Role role) {
  std::vector<std::string> out;
  for (const auto& c : cs->coords)
    if (c.role == role) out.push_back(c.name);
  return out;
}

void require_tangent_kind(const ChartPtr& big, const char* who) {
  if (big->kind != "tangent" && big->kind != "tangent-super")
    throw MathError(std::string(who) + " needs a tangent or tangent-super chart, got " +
                    big->kind);
}

std::string comps_str(const ChartPtr& cs,
                      const std::map<std::string, SuperFunction>& comps) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : cs->coords) {
    auto it = comps.find(c.name);
    if (it == comps.end() || it->second.is_zero()) continue;
    if (!first) os << " + ";
    os << "(" << it->second.str() << ") d/d" << c.name;
    first = false;
  }
  return first ? "0" : os.str();
}

}  // namespace

// ---- SuperVectorField ----

SuperVectorField SuperVectorField::coordinate_field(const ChartPtr& cs,
                                                    const std::string& name) {
  SuperVectorField X(cs);
  X.set_component(name, SuperFunction::from_rational(cs, 1));
  return X;
}

SuperFunction SuperVectorField::component(const std::string& name) const {
  if (!cs_->has(name))
    throw MathError("no coordinate " + name + " in chart " + cs_->str());
  auto it = comps_.find(name);
  return it == comps_.end() ? SuperFunction(cs_) : it->second;
}

void SuperVectorField::set_component(const std::string& name, const SuperFunction& f) {
  if (!cs_->has(name))
    throw MathError("no coordinate " + name + " in chart " + cs_->str());
  if (!same_chart(f.chart(), cs_))
    throw MathError("component for " + name + " is not over " + cs_->str());
  if (f.is_zero())
    comps_.erase(name);
  else
    comps_[name] = f;
}

SuperFunction SuperVectorField::apply(const SuperFunction& f) const {
  if (!same_chart(f.chart(), cs_))
    throw MathError("field on " + cs_->str() + " applied to a function on " +
                    f.chart()->str());
  SuperFunction acc(cs_);
  for (const auto& [name, comp] : comps_) acc = acc + comp * f.left_derivative(name);
  return acc;
}

std::optional<int> SuperVectorField::parity() const {
  std::optional<int> found;
  for (const auto& [name, comp] : comps_) {
    if (comp.is_zero()) continue;
    auto p = comp.parity();
    if (!p) return std::nullopt;
    int field_parity = (*p + cs_->parity_of(name)) % 2;
    if (found && *found != field_parity) return std::nullopt;
    found = field_parity;
  }
  return found ? found : std::optional<int>(0);
}

SuperVectorField SuperVectorField::parity_part(int p) const {
  SuperVectorField r(cs_);
  for (const auto& [name, comp] : comps_)
    r.set_component(name, comp.parity_part((p + cs_->parity_of(name)) % 2));
  return r;
}

SuperVectorField SuperVectorField::operator+(const SuperVectorField& o) const {
  if (!same_chart(cs_, o.cs_)) throw MathError("field sum across different charts");
  SuperVectorField r = *this;
  for (const auto& [name, comp] : o.comps_) r.set_component(name, r.component(name) + comp);
  return r;
}

SuperVectorField SuperVectorField::operator-(const SuperVectorField& o) const {
  return *this + (-o);
}

SuperVectorField SuperVectorField::operator-() const {
  SuperVectorField r(cs_);
  for (const auto& [name, comp] : comps_) r.set_component(name, -comp);
  return r;
}

SuperVectorField SuperVectorField::scale(const SuperFunction& c) const {
  SuperVectorField r(cs_);
  for (const auto& [name, comp] : comps_) r.set_component(name, c * comp);
  return r;
}

bool SuperVectorField::is_zero() const {
  for (const auto& [name, comp] : comps_)
    if (!comp.is_zero()) return false;
  return true;
}

bool SuperVectorField::operator==(const SuperVectorField& o) const {
  if (!same_chart(cs_, o.cs_)) throw MathError("field comparison across different charts");
  for (const auto& [name, comp] : comps_)
    if (comp != o.component(name)) return false;
  for (const auto& [name, comp] : o.comps_)
    if (comp != component(name)) return false;
  return true;
}

std::string SuperVectorField::str() const { return comps_str(cs_, comps_); }

// ---- FieldAlongMorphism ----

SuperFunction FieldAlongMorphism::component(const std::string& target_coord) const {
  if (!phi_.target->has(target_coord))
    throw MathError("no coordinate " + target_coord + " in chart " + phi_.target->str());
  auto it = comps_.find(target_coord);
  return it == comps_.end() ? SuperFunction(phi_.source) : it->second;
}

void FieldAlongMorphism::set_component(const std::string& target_coord,
                                       const SuperFunction& f) {
  if (!phi_.target->has(target_coord))
    throw MathError("no coordinate " + target_coord + " in chart " + phi_.target->str());
  if (!same_chart(f.chart(), phi_.source))
    throw MathError("component for " + target_coord + " is not over the source chart");
  if (f.is_zero())
    comps_.erase(target_coord);
  else
    comps_[target_coord] = f;
}

SuperFunction FieldAlongMorphism::apply(const SuperFunction& f_over_target) const {
  SuperFunction acc(phi_.source);
  for (const auto& [name, comp] : comps_)
    acc = acc + comp * phi_.pullback(f_over_target.left_derivative(name));
  if (comps_.empty()) {
    // still validate the argument chart
    phi_.pullback(f_over_target);
  }
  return acc;
}

std::optional<int> FieldAlongMorphism::parity() const {
  std::optional<int> found;
  for (const auto& [name, comp] : comps_) {
    if (comp.is_zero()) continue;
    auto p = comp.parity();
    if (!p) return std::nullopt;
    int field_parity = (*p + phi_.target->parity_of(name)) % 2;
    if (found && *found != field_parity) return std::nullopt;
    found = field_parity;
  }
  return found ? found : std::optional<int>(0);
}

FieldAlongMorphism FieldAlongMorphism::parity_part(int p) const {
  FieldAlongMorphism r(phi_);
  for (const auto& [name, comp] : comps_)
    r.set_component(name, comp.parity_part((p + phi_.target->parity_of(name)) % 2));
  return r;
}

FieldAlongMorphism FieldAlongMorphism::operator+(const FieldAlongMorphism& o) const {
  if (!same_chart(phi_.source, o.phi_.source) || !same_chart(phi_.target, o.phi_.target))
    throw MathError("field sum across different morphisms");
  FieldAlongMorphism r = *this;
  for (const auto& [name, comp] : o.comps_) r.set_component(name, r.component(name) + comp);
  return r;
}

FieldAlongMorphism FieldAlongMorphism::operator-(const FieldAlongMorphism& o) const {
  FieldAlongMorphism neg = o;
  for (auto& [name, comp] : neg.comps_) comp = -comp;
  return *this + neg;
}

bool FieldAlongMorphism::is_zero() const {
  for (const auto& [name, comp] : comps_)
    if (!comp.is_zero()) return false;
  return true;
}

bool FieldAlongMorphism::operator==(const FieldAlongMorphism& o) const {
  if (!same_chart(phi_.source, o.phi_.source) || !same_chart(phi_.target, o.phi_.target))
    throw MathError("field comparison across different morphisms");
  for (const auto& c : phi_.target->coords)
    if (phi_.assignment(c.name) != o.phi_.assignment(c.name)) return false;
  for (const auto& [name, comp] : comps_)
    if (comp != o.component(name)) return false;
  for (const auto& [name, comp] : o.comps_)
    if (comp != component(name)) return false;
  return true;
}

std::string FieldAlongMorphism::str() const { return comps_str(phi_.target, comps_); }

// ---- restriction / projection ----

FieldAlongMorphism hat_restrict(const SuperVectorField& X, const SuperMorphism& phi) {
  if (!same_chart(X.chart(), phi.target))
    throw MathError("hat_restrict: field lives on " + X.chart()->str() + ", morphism maps into " +
                    phi.target->str());
  FieldAlongMorphism r(phi);
  for (const auto& [name, comp] : X.comps_) r.set_component(name, phi.pullback(comp));
  return r;
}

FieldAlongMorphism push_along(const SuperVectorField& Y, const SuperMorphism& phi) {
  if (!same_chart(Y.chart(), phi.source))
    throw MathError("push_along: field lives on " + Y.chart()->str() + ", morphism starts at " +
                    phi.source->str());
  FieldAlongMorphism r(phi);
  for (const auto& c : phi.target->coords)
    r.set_component(c.name, Y.apply(phi.assignment(c.name)));
  return r;
}

bool is_canonical_projection(const SuperMorphism& phi) {
  if (phi.target->kind != "base") return false;
  if (!(*phi.target == *base_of(phi.source))) return false;
  for (const auto& c : phi.target->coords)
    if (phi.assignment(c.name) != SuperFunction::coordinate(phi.source, c.name)) return false;
  return true;
}

namespace {

// does f involve a coordinate of `from` that `to` does not have
bool uses_dropped_coordinate(const SuperFunction& f, const ChartPtr& from,
                             const ChartPtr& to) {
  for (const auto& [mono, coeff] : f.terms()) {
    for (int id : mono)
      if (!to->has(from->odd_name(id))) return true;
    std::vector<std::string> vars;
    coeff.collect_variables(vars);
    for (const auto& v : vars)
      if (from->has(v) && !to->has(v)) return true;
  }
  return false;
}

}  // namespace

Projection project_field(const SuperVectorField& Y, const SuperMorphism& phi) {
  Projection out;
  if (!is_canonical_projection(phi)) return out;  // Undecided
  FieldAlongMorphism along = push_along(Y, phi);
  for (const auto& c : phi.target->coords)
    if (uses_dropped_coordinate(along.component(c.name), phi.source, phi.target)) {
      out.status = ProjectStatus::NotProjectable;
      return out;
    }
  SuperVectorField X(phi.target);
  for (const auto& c : phi.target->coords)
    X.set_component(c.name, embed(along.component(c.name), phi.target));
  out.status = ProjectStatus::Projectable;
  out.field = X;
  return out;
}

// ---- total time derivative and vertical lifts ----

FieldAlongMorphism total_time_derivative(const ChartPtr& big) {
  require_tangent_kind(big, "total_time_derivative");
  bool super = big->kind == "tangent-super";
  FieldAlongMorphism T(canonical_projection(big));
  auto evens = names_with_role(big, Role::Position);
  auto odds = names_with_role(big, Role::OddPosition);
  for (size_t i = 0; i < evens.size(); i++) {
    SuperFunction w = SuperFunction::coordinate(big, "v" + std::to_string(i + 1));
    if (super) w = w + SuperFunction::coordinate(big, "pv" + std::to_string(i + 1));
    T.set_component(evens[i], w);
  }
  for (size_t a = 0; a < odds.size(); a++) {
    SuperFunction w = SuperFunction::coordinate(big, "z" + std::to_string(a + 1));
    if (super) w = w + SuperFunction::coordinate(big, "pz" + std::to_string(a + 1));
    T.set_component(odds[a], w);
  }
  return T;
}

SuperFunction vertical_lift_function(const SuperFunction& f_on_base, const ChartPtr& big) {
  require_tangent_kind(big, "vertical_lift_function");
  if (!same_chart(f_on_base.chart(), base_of(big)))
    throw MathError("vertical_lift_function: function is not over the base of " + big->str());
  bool super = big->kind == "tangent-super";
  SuperFunction F = embed(f_on_base, big);
  auto evens = names_with_role(big, Role::Position);
  auto odds = names_with_role(big, Role::OddPosition);
  SuperFunction acc(big);
  for (size_t i = 0; i < evens.size(); i++) {
    SuperFunction w = SuperFunction::coordinate(big, "v" + std::to_string(i + 1));
    if (super) w = w + SuperFunction::coordinate(big, "pv" + std::to_string(i + 1));
    acc = acc + F.left_derivative(evens[i]) * w;
  }
  for (size_t a = 0; a < odds.size(); a++) {
    SuperFunction w = SuperFunction::coordinate(big, "z" + std::to_string(a + 1));
    if (super) w = w + SuperFunction::coordinate(big, "pz" + std::to_string(a + 1));
    acc = acc + F.left_derivative(odds[a]) * w;
  }
  return acc;
}

namespace {

// shared slot copy: the q component feeds v (and pv), the th component feeds
// z (and pz); `fetch` supplies the component already over the big chart
SuperVectorField lift_into_fibers(
    const ChartPtr& big, const std::function<SuperFunction(const std::string&)>& fetch) {
  bool super = big->kind == "tangent-super";
  SuperVectorField r(big);
  auto evens = names_with_role(big, Role::Position);
  auto odds = names_with_role(big, Role::OddPosition);
  for (size_t i = 0; i < evens.size(); i++) {
    SuperFunction c = fetch(evens[i]);
    r.set_component("v" + std::to_string(i + 1), c);
    if (super) r.set_component("pv" + std::to_string(i + 1), c);
  }
  for (size_t a = 0; a < odds.size(); a++) {
    SuperFunction c = fetch(odds[a]);
    r.set_component("z" + std::to_string(a + 1), c);
    if (super) r.set_component("pz" + std::to_string(a + 1), c);
  }
  return r;
}

}  // namespace

SuperVectorField vertical_lift_field(const SuperVectorField& X_on_base, const ChartPtr& big) {
  require_tangent_kind(big, "vertical_lift_field");
  if (!same_chart(X_on_base.chart(), base_of(big)))
    throw MathError("vertical_lift_field: field is not over the base of " + big->str());
  // non-homogeneous fields lift as the sum of the lifts of their parity
  // parts; the slot copy below is linear and parity-independent, so doing it
  // in one pass is the same thing
  return lift_into_fibers(
      big, [&](const std::string& nm) { return embed(X_on_base.component(nm), big); });
}

SuperVectorField vertical_lift_field(const FieldAlongMorphism& X_along_projection) {
  const SuperMorphism& phi = X_along_projection.morphism();
  if (!is_canonical_projection(phi))
    throw MathError("vertical_lift_field: field must be along a bundle projection");
  require_tangent_kind(phi.source, "vertical_lift_field");
  return lift_into_fibers(
      phi.source, [&](const std::string& nm) { return X_along_projection.component(nm); });
}

SuperVectorField vertical_endomorphism(const SuperVectorField& Y) {
  require_tangent_kind(Y.chart(), "vertical_endomorphism");
  return vertical_lift_field(push_along(Y, canonical_projection(Y.chart())));
}

SuperVectorField liouville_field(const ChartPtr& big) {
  return vertical_lift_field(total_time_derivative(big));
}

// ---- field <-> section tables ----

SuperMorphism section_from_field(const FieldAlongMorphism& X) {
  const SuperMorphism& phi = X.morphism();
  if (phi.target->kind != "base")
    throw MathError("section_from_field: target must be a base chart");
  auto evens = names_with_role(phi.target, Role::Position);
  auto odds = names_with_role(phi.target, Role::OddPosition);
  ChartPtr stm = make_chart("tangent-super", evens, odds);
  SuperMorphism sec;
  sec.source = phi.source;
  sec.target = stm;
  for (const auto& c : phi.target->coords) sec.pb[c.name] = phi.assignment(c.name);
  for (size_t i = 0; i < evens.size(); i++) {
    SuperFunction c = X.component(evens[i]);
    sec.pb["v" + std::to_string(i + 1)] = c.parity_part(0);
    sec.pb["pv" + std::to_string(i + 1)] = c.parity_part(1);
  }
  for (size_t a = 0; a < odds.size(); a++) {
    SuperFunction c = X.component(odds[a]);
    sec.pb["z" + std::to_string(a + 1)] = c.parity_part(1);
    sec.pb["pz" + std::to_string(a + 1)] = c.parity_part(0);
  }
  sec.validate();
  return sec;
}

FieldAlongMorphism field_from_section(const SuperMorphism& sec) {
  if (sec.target->kind != "tangent-super")
    throw MathError("field_from_section: section must land in a tangent-super chart");
  FieldAlongMorphism X(compose(canonical_projection(sec.target), sec));
  auto evens = names_with_role(sec.target, Role::Position);
  auto odds = names_with_role(sec.target, Role::OddPosition);
  for (size_t i = 0; i < evens.size(); i++)
    X.set_component(evens[i], sec.assignment("v" + std::to_string(i + 1)) +
                                  sec.assignment("pv" + std::to_string(i + 1)));
  for (size_t a = 0; a < odds.size(); a++)
    X.set_component(odds[a], sec.assignment("z" + std::to_string(a + 1)) +
                                 sec.assignment("pz" + std::to_string(a + 1)));
  return X;
}

}  // namespace supermech
