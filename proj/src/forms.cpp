#include "supermech/forms.hpp"

#include <sstream>

#include "supermech/charts.hpp"

namespace supermech {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw MathError(what);
}

int coord_parity(const CoordinateSystem& cs, int pos) {
  return role_parity(cs.coords[pos].role);
}

// insertion sort with the adjacent-swap sign (-1)^(1 + |x||y|); a repeated
// even differential kills the term
bool normalize_mono(const CoordinateSystem& cs, DiffMono& d, int& sign) {
  sign = 1;
  for (size_t i = 1; i < d.size(); i++) {
    size_t j = i;
    while (j > 0 && d[j] < d[j - 1]) {
      if (!(coord_parity(cs, d[j]) && coord_parity(cs, d[j - 1]))) sign = -sign;
      std::swap(d[j], d[j - 1]);
      j--;
    }
  }
  for (size_t i = 0; i + 1 < d.size(); i++)
    if (d[i] == d[i + 1] && coord_parity(cs, d[i]) == 0) return false;
  return true;
}

void add_normalized(std::map<DiffMono, SuperFunction>& terms, const CoordinateSystem& cs,
                    DiffMono d, const SuperFunction& c) {
  if (c.is_zero()) return;
  int sign = 1;
  if (!normalize_mono(cs, d, sign)) return;
  SuperFunction add = sign < 0 ? -c : c;
  auto it = terms.find(d);
  if (it == terms.end()) {
    terms.emplace(std::move(d), std::move(add));
    return;
  }
  it->second = it->second + add;
  if (it->second.is_zero()) terms.erase(it);
}

std::string render_terms(const CoordinateSystem& cs,
                         const std::map<DiffMono, SuperFunction>& terms) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [d, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    for (int pos : d) os << " d" << cs.coords[pos].name;
  }
  return os.str();
}

}  // namespace

GradedForm GradedForm::from_function(const SuperFunction& f) {
  GradedForm out(f.chart(), 0);
  out.add_term({}, f);
  return out;
}

GradedForm GradedForm::differential(const ChartPtr& cs, const std::string& name) {
  GradedForm out(cs, 1);
  out.add_term({cs->position(name)}, SuperFunction::from_rational(cs, 1));
  return out;
}

SuperFunction GradedForm::coefficient(const DiffMono& d) const {
  auto it = terms_.find(d);
  if (it != terms_.end()) return it->second;
  return SuperFunction(cs_);
}

void GradedForm::add_term(DiffMono d, const SuperFunction& c) {
  require(static_cast<int>(d.size()) == degree_, "form term has the wrong degree");
  add_normalized(terms_, *cs_, std::move(d), c);
}

GradedForm GradedForm::operator+(const GradedForm& o) const {
  require(*cs_ == *o.cs_ && degree_ == o.degree_, "form sum needs matching chart and degree");
  GradedForm out = *this;
  for (const auto& [d, c] : o.terms_) add_normalized(out.terms_, *cs_, d, c);
  return out;
}

GradedForm GradedForm::operator-(const GradedForm& o) const { return *this + (-o); }

GradedForm GradedForm::operator-() const {
  GradedForm out(cs_, degree_);
  for (const auto& [d, c] : terms_) out.terms_.emplace(d, -c);
  return out;
}

GradedForm GradedForm::scale(const SuperFunction& c) const {
  GradedForm out(cs_, degree_);
  for (const auto& [d, t] : terms_) add_normalized(out.terms_, *cs_, d, c * t);
  return out;
}

bool GradedForm::operator==(const GradedForm& o) const {
  return *cs_ == *o.cs_ && degree_ == o.degree_ && terms_ == o.terms_;
}

std::optional<int> GradedForm::grassmann_parity() const {
  std::optional<int> total;
  for (const auto& [d, c] : terms_) {
    auto pc = c.parity();
    if (!pc) return std::nullopt;
    int w = *pc;
    for (int pos : d) w += coord_parity(*cs_, pos);
    w %= 2;
    if (total && *total != w) return std::nullopt;
    total = w;
  }
  return total ? total : std::optional<int>(0);
}

std::string GradedForm::str() const { return render_terms(*cs_, terms_); }

GradedForm wedge(const GradedForm& a, const GradedForm& b) {
  require(*a.cs_ == *b.cs_, "wedge needs matching charts");
  const CoordinateSystem& cs = *a.cs_;
  GradedForm out(a.cs_, a.degree_ + b.degree_);
  for (const auto& [da, ca] : a.terms_) {
    int wa = 0;
    for (int pos : da) wa += coord_parity(cs, pos);
    for (const auto& [db, cb] : b.terms_) {
      for (int pc = 0; pc <= 1; pc++) {
        SuperFunction cbp = cb.parity_part(pc);
        if (cbp.is_zero()) continue;
        SuperFunction coeff = ca * cbp;
        if ((pc * wa) % 2) coeff = -coeff;
        DiffMono mono = da;
        mono.insert(mono.end(), db.begin(), db.end());
        add_normalized(out.terms_, cs, std::move(mono), coeff);
      }
    }
  }
  return out;
}

GradedForm exterior_derivative(const GradedForm& a) {
  const CoordinateSystem& cs = *a.cs_;
  GradedForm out(a.cs_, a.degree_ + 1);
  for (const auto& [d, c] : a.terms_) {
    for (int pos = 0; pos < static_cast<int>(cs.coords.size()); pos++) {
      SuperFunction cx = c.left_derivative(cs.coords[pos].name);
      if (cx.is_zero()) continue;
      int xpar = coord_parity(cs, pos);
      for (int p = 0; p <= 1; p++) {
        SuperFunction part = cx.parity_part(p);
        if (part.is_zero()) continue;
        // (-1)^|x| from the definition of d, then (-1)^(p|x|) to move the
        // derivative to the left of dx
        if (xpar && p == 0) part = -part;
        DiffMono mono;
        mono.reserve(d.size() + 1);
        mono.push_back(pos);
        mono.insert(mono.end(), d.begin(), d.end());
        add_normalized(out.terms_, cs, std::move(mono), part);
      }
    }
  }
  return out;
}

GradedForm differential_of(const SuperFunction& f) {
  return exterior_derivative(GradedForm::from_function(f));
}

GradedForm interior_product(const SuperVectorField& X, const GradedForm& a) {
  require(*X.chart() == *a.cs_, "contraction needs matching charts");
  const CoordinateSystem& cs = *a.cs_;
  if (a.degree_ == 0) return GradedForm(a.cs_, 0);
  GradedForm out(a.cs_, a.degree_ - 1);
  for (int px = 0; px <= 1; px++) {
    SuperVectorField Xp = X.parity_part(px);
    if (Xp.is_zero()) continue;
    for (const auto& [mono, c] : a.terms_) {
      for (int pc = 0; pc <= 1; pc++) {
        SuperFunction cp = c.parity_part(pc);
        if (cp.is_zero()) continue;
        int base_sign = (pc * px) % 2 ? -1 : 1;
        int acc = 0;  // parity of the differentials passed so far
        for (size_t j = 0; j < mono.size(); j++) {
          int xpar = coord_parity(cs, mono[j]);
          SuperFunction comp = Xp.component(cs.coords[mono[j]].name);
          if (!comp.is_zero()) {
            int s = (j % 2) ? -base_sign : base_sign;
            if (xpar && (acc % 2)) s = -s;
            if (xpar) s = -s;  // i_X(dth) = -X^th
            SuperFunction coeff = cp * comp;
            if (s < 0) coeff = -coeff;
            DiffMono rest;
            rest.reserve(mono.size() - 1);
            for (size_t l = 0; l < mono.size(); l++)
              if (l != j) rest.push_back(mono[l]);
            add_normalized(out.terms_, cs, std::move(rest), coeff);
          }
          acc += xpar;
        }
      }
    }
  }
  return out;
}

SuperFunction evaluate_form(const GradedForm& a, const std::vector<SuperVectorField>& Xs) {
  require(static_cast<int>(Xs.size()) == a.degree_, "evaluation needs one field per degree");
  GradedForm acc = a;
  for (const auto& X : Xs) acc = interior_product(X, acc);
  return acc.coefficient({});
}

SuperFunction FormAlongMorphism::coefficient(const DiffMono& d) const {
  auto it = terms_.find(d);
  if (it != terms_.end()) return it->second;
  return SuperFunction(phi_.source);
}

void FormAlongMorphism::add_term(DiffMono d, const SuperFunction& c) {
  require(static_cast<int>(d.size()) == degree_, "form term has the wrong degree");
  add_normalized(terms_, *phi_.target, std::move(d), c);
}

bool FormAlongMorphism::operator==(const FormAlongMorphism& o) const {
  return *phi_.source == *o.phi_.source && *phi_.target == *o.phi_.target &&
         degree_ == o.degree_ && terms_ == o.terms_;
}

std::string FormAlongMorphism::str() const { return render_terms(*phi_.target, terms_); }

FormAlongMorphism restrict_form(const GradedForm& omega, const SuperMorphism& phi) {
  require(*omega.chart() == *phi.target, "form restriction needs the form over the target");
  FormAlongMorphism out(phi, omega.degree());
  for (const auto& [d, c] : omega.terms_) out.add_term(d, phi.pullback(c));
  return out;
}

FormAlongMorphism semibasic_inverse(const GradedForm& omega, const SuperMorphism& projection) {
  require(is_canonical_projection(projection), "semibasic inverse needs a bundle projection");
  require(*omega.chart() == *projection.source, "semibasic inverse needs a form over the total chart");
  const CoordinateSystem& src = *projection.source;
  const CoordinateSystem& tgt = *projection.target;
  FormAlongMorphism out(projection, omega.degree());
  for (const auto& [d, c] : omega.terms_) {
    DiffMono mapped;
    mapped.reserve(d.size());
    for (int pos : d) {
      const std::string& name = src.coords[pos].name;
      require(tgt.has(name), "form has a fiber differential, not semibasic");
      mapped.push_back(tgt.position(name));
    }
    out.add_term(std::move(mapped), c);
  }
  return out;
}

GradedForm sharp(const FormAlongMorphism& omega) {
  const SuperMorphism& phi = omega.phi_;
  const CoordinateSystem& tgt = *phi.target;
  GradedForm out(phi.source, omega.degree_);
  for (const auto& [d, c] : omega.terms_) {
    GradedForm acc = GradedForm::from_function(c);
    for (int pos : d) {
      GradedForm dg = differential_of(phi.assignment(tgt.coords[pos].name));
      if (coord_parity(tgt, pos)) dg = -dg;
      acc = wedge(acc, dg);
    }
    out = out + acc;
  }
  return out;
}

GradedForm pullback_form(const SuperMorphism& phi, const GradedForm& omega) {
  return sharp(restrict_form(omega, phi));
}

SuperFunction pairing_along(const FormAlongMorphism& omega, const FieldAlongMorphism& X) {
  require(omega.degree_ == 1, "pairing is defined for one-forms");
  const SuperMorphism& phi = omega.phi_;
  require(*phi.source == *X.morphism().source && *phi.target == *X.morphism().target,
          "pairing needs a field along the same morphism");
  const CoordinateSystem& tgt = *phi.target;
  SuperFunction out(phi.source);
  for (int px = 0; px <= 1; px++) {
    FieldAlongMorphism Xp = X.parity_part(px);
    if (Xp.is_zero()) continue;
    for (const auto& [d, c] : omega.terms_) {
      int xpar = coord_parity(tgt, d[0]);
      SuperFunction comp = Xp.component(tgt.coords[d[0]].name);
      if (comp.is_zero()) continue;
      for (int pc = 0; pc <= 1; pc++) {
        SuperFunction cp = c.parity_part(pc);
        if (cp.is_zero()) continue;
        SuperFunction t = cp * comp;
        if (((pc * px) + xpar) % 2) t = -t;
        out = out + t;
      }
    }
  }
  return out;
}

SuperMorphism section_of_one_form(const GradedForm& omega) {
  const ChartPtr& base = omega.chart();
  require(base->kind == "base" && omega.degree() == 1,
          "section construction needs a one-form over a base chart");
  std::vector<std::string> even_names, odd_names;
  for (const auto& co : base->coords) {
    if (co.role == Role::Position) even_names.push_back(co.name);
    if (co.role == Role::OddPosition) odd_names.push_back(co.name);
  }
  ChartPtr target = make_chart("cotangent-super", even_names, odd_names);
  SuperMorphism sec;
  sec.source = base;
  sec.target = target;
  for (const auto& name : even_names)
    sec.pb.emplace(name, SuperFunction::coordinate(base, name));
  for (const auto& name : odd_names)
    sec.pb.emplace(name, SuperFunction::coordinate(base, name));
  for (size_t i = 0; i < even_names.size(); i++) {
    SuperFunction a = omega.coefficient({base->position(even_names[i])});
    std::string num = std::to_string(i + 1);
    sec.pb.emplace("p" + num, a.parity_part(0));
    sec.pb.emplace("pp" + num, a.parity_part(1));
  }
  for (size_t alpha = 0; alpha < odd_names.size(); alpha++) {
    SuperFunction b = omega.coefficient({base->position(odd_names[alpha])});
    std::string num = std::to_string(alpha + 1);
    sec.pb.emplace("eta" + num, b.parity_part(1));
    sec.pb.emplace("peta" + num, b.parity_part(0));
  }
  sec.validate();
  return sec;
}

GradedForm liouville_form(const ChartPtr& cs) {
  std::vector<int> qpos, thpos, ppos, etapos, pppos, petapos;
  for (int i = 0; i < static_cast<int>(cs->coords.size()); i++) {
    switch (cs->coords[i].role) {
      case Role::Position: qpos.push_back(i); break;
      case Role::OddPosition: thpos.push_back(i); break;
      case Role::Momentum: ppos.push_back(i); break;
      case Role::OddMomentum: etapos.push_back(i); break;
      case Role::PiMomentum: pppos.push_back(i); break;
      case Role::PiOddMomentum: petapos.push_back(i); break;
      default: break;
    }
  }
  auto coord = [&](int pos) { return SuperFunction::coordinate(cs, cs->coords[pos].name); };
  GradedForm out(cs, 1);
  if (cs->kind == "cotangent") {
    for (size_t i = 0; i < qpos.size(); i++) out.add_term({qpos[i]}, coord(ppos[i]));
    for (size_t a = 0; a < thpos.size(); a++) out.add_term({thpos[a]}, coord(etapos[a]));
  } else if (cs->kind == "cotangent-super") {
    for (size_t i = 0; i < qpos.size(); i++)
      out.add_term({qpos[i]}, coord(ppos[i]) + coord(pppos[i]));
    for (size_t a = 0; a < thpos.size(); a++)
      out.add_term({thpos[a]}, coord(etapos[a]) + coord(petapos[a]));
  } else if (cs->kind == "odd-momentum-sector") {
    for (size_t i = 0; i < qpos.size(); i++) out.add_term({qpos[i]}, coord(pppos[i]));
    for (size_t a = 0; a < thpos.size(); a++) out.add_term({thpos[a]}, coord(petapos[a]));
  } else {
    throw MathError("chart kind '" + cs->kind + "' carries no canonical one-form");
  }
  return out;
}

GradedForm canonical_two_form(const ChartPtr& cs) {
  return -exterior_derivative(liouville_form(cs));
}

GradedMatrix form_matrix(const GradedForm& omega) {
  require(omega.degree() == 2, "coefficient matrix is defined for two-forms");
  const ChartPtr& cs = omega.chart();
  int dim = static_cast<int>(cs->coords.size());
  GradedMatrix M(cs, dim, dim);
  std::vector<SuperVectorField> frame;
  frame.reserve(dim);
  for (int i = 0; i < dim; i++)
    frame.push_back(SuperVectorField::coordinate_field(cs, cs->coords[i].name));
  for (int i = 0; i < dim; i++) {
    GradedForm once = interior_product(frame[i], omega);
    for (int j = 0; j < dim; j++)
      M.at(i, j) = interior_product(frame[j], once).coefficient({});
  }
  return M;
}

}  // namespace supermech
