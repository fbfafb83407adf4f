#include "supermech/mechanics.hpp"

#include <sstream>

#include "supermech/charts.hpp"

namespace supermech {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw MathError(what);
}

bool is_tangent_kind(const std::string& kind) {
  return kind == "tangent" || kind == "tangent-super";
}

std::vector<std::string> names_of(const CoordinateSystem& cs, Role r) {
  std::vector<std::string> out;
  for (const auto& c : cs.coords)
    if (c.role == r) out.push_back(c.name);
  return out;
}

// second left derivatives, rightmost operator applied first:
// W[i][j] = d/d a_i (d/d b_j L)
GradedMatrix hessian_block(const ChartPtr& cs, const SuperFunction& L,
                           const std::vector<std::string>& a, const std::vector<std::string>& b) {
  GradedMatrix W(cs, static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (size_t j = 0; j < b.size(); j++) {
    SuperFunction inner = L.left_derivative(b[j]);
    for (size_t i = 0; i < a.size(); i++)
      W.at(static_cast<int>(i), static_cast<int>(j)) = inner.left_derivative(a[i]);
  }
  return W;
}

bool body_invertible(const GradedMatrix& W) { return W.body_rank() == W.rows(); }

}  // namespace

GradedForm s_transpose(const GradedForm& a) {
  require(a.degree() == 1, "transpose of the vertical endomorphism acts on one-forms");
  const ChartPtr& cs = a.chart();
  require(is_tangent_kind(cs->kind), "vertical endomorphism lives on a tangent chart");
  GradedForm out(cs, 1);
  for (int pos = 0; pos < static_cast<int>(cs->coords.size()); pos++) {
    const auto& co = cs->coords[pos];
    auto Sx = vertical_endomorphism(SuperVectorField::coordinate_field(cs, co.name));
    if (Sx.is_zero()) continue;
    SuperFunction e = evaluate_form(a, {Sx});
    if (role_parity(co.role) == 0) {
      out.add_term({pos}, e);
      continue;
    }
    // odd slot: undo the pairing sign per parity part of the coefficient
    for (int pe = 0; pe <= 1; pe++) {
      SuperFunction part = e.parity_part(pe);
      if (part.is_zero()) continue;
      if (pe == 0) part = -part;
      out.add_term({pos}, part);
    }
  }
  return out;
}

LagrangianSystem::LagrangianSystem(ChartPtr cs, SuperFunction lagrangian)
    : cs_(std::move(cs)), L_(std::move(lagrangian)) {
  require(is_tangent_kind(cs_->kind), "lagrangian must live on a tangent chart");
  require(*L_.chart() == *cs_, "lagrangian is over a different chart");
  auto p = L_.parity();
  require(p.has_value(), "lagrangian must be homogeneous");
  parity_ = *p;
  theta_ = s_transpose(differential_of(L_));
  omega_ = -exterior_derivative(theta_);
  action_ = liouville_field(cs_).apply(L_);
  energy_ = action_ - L_;
}

const RegularityReport& LagrangianSystem::regularity() const {
  if (reg_) return *reg_;
  RegularityReport r;
  r.parity_case = parity_ == 0 ? "even" : "odd";
  r.hessian_order = "d/dx_i (d/dx_j L)";
  auto M = form_matrix(omega_);
  r.omega_body_rank = M.body_rank();
  r.omega_full_rank = M.rows();

  auto vnames = names_of(*cs_, Role::Velocity);
  auto znames = names_of(*cs_, Role::OddVelocity);

  if (cs_->kind == "tangent-super") {
    // the two-form of any lagrangian is degenerate here; nothing to invert
    r.blocks_invertible = false;
    r.criteria_agree = r.omega_body_rank < r.omega_full_rank;
    r.regular = false;
    std::ostringstream os;
    os << "two-form body rank " << r.omega_body_rank << " of " << r.omega_full_rank
       << " on the super tangent chart";
    r.reasons.push_back(os.str());
    reg_ = std::move(r);
    return *reg_;
  }

  if (parity_ == 0) {
    r.vv = hessian_block(cs_, L_, vnames, vnames);
    r.zz = hessian_block(cs_, L_, znames, znames);
    bool vok = body_invertible(*r.vv);
    bool zok = body_invertible(*r.zz);
    r.blocks_invertible = vok && zok;
    if (!vok) {
      std::ostringstream os;
      os << "velocity-velocity block body rank " << r.vv->body_rank() << " of " << r.vv->rows();
      r.reasons.push_back(os.str());
    }
    if (!zok) {
      std::ostringstream os;
      os << "odd-odd block body rank " << r.zz->body_rank() << " of " << r.zz->rows();
      r.reasons.push_back(os.str());
    }
  } else {
    if (cs_->m != cs_->n) {
      std::ostringstream os;
      os << "odd lagrangian needs matching dimensions, got m=" << cs_->m << " n=" << cs_->n;
      r.reasons.push_back(os.str());
      r.blocks_invertible = false;
    } else {
      r.zv = hessian_block(cs_, L_, znames, vnames);
      r.blocks_invertible = body_invertible(*r.zv);
      if (!r.blocks_invertible) {
        std::ostringstream os;
        os << "odd-velocity block body rank " << r.zv->body_rank() << " of " << r.zv->rows();
        r.reasons.push_back(os.str());
      }
    }
  }
  bool rank_full = r.omega_body_rank == r.omega_full_rank;
  r.criteria_agree = r.blocks_invertible == rank_full;
  r.regular = r.blocks_invertible;
  if (!r.regular && r.reasons.empty()) r.reasons.push_back("hessian blocks not invertible");
  reg_ = std::move(r);
  return *reg_;
}

const SuperVectorField& LagrangianSystem::dynamics() const {
  if (gamma_) return *gamma_;
  require(cs_->kind == "tangent", "dynamics is solved on the plain tangent chart");
  const auto& reg = regularity();
  if (!reg.regular) {
    std::string msg = "degenerate lagrangian:";
    for (const auto& why : reg.reasons) msg += " " + why + ";";
    throw MathError(msg);
  }

  const CoordinateSystem& cs = *cs_;
  int dim = static_cast<int>(cs.coords.size());
  // For an even field the contraction of a stored term c du^dw reads
  //   i_Gamma(c du^dw) = (-1)^|u| c Gamma^u dw - (-1)^{|w||u|+|w|} c Gamma^w du
  // which is a left-linear system A * components = coefficients of dE.
  GradedMatrix A(cs_, dim, dim);
  for (const auto& [mono, c] : omega_.terms_) {
    int u = mono[0], w = mono[1];
    int pu = role_parity(cs.coords[u].role), pw = role_parity(cs.coords[w].role);
    SuperFunction cu = pu ? -c : c;
    A.at(w, u) = A.at(w, u) + cu;
    SuperFunction cw = (pw * pu + pw) % 2 ? c : -c;
    A.at(u, w) = A.at(u, w) + cw;
  }
  GradedForm dE = differential_of(energy_);
  GradedMatrix b(cs_, dim, 1);
  for (int x = 0; x < dim; x++) b.at(x, 0) = dE.coefficient({x});

  GradedMatrix sol = A.invert() * b;
  SuperVectorField G(cs_);
  for (int u = 0; u < dim; u++) G.set_component(cs.coords[u].name, sol.at(u, 0));

  if (interior_product(G, omega_) != dE)
    throw MathError("dynamics solve left a nonzero residual, treating the lagrangian as degenerate");
  if (!(G.parity() && *G.parity() == 0))
    throw MathError("dynamics field came out with odd components");
  if (vertical_endomorphism(G) != liouville_field(cs_))
    throw MathError("dynamics field is not second order");
  if (interior_product(G, theta_).coefficient({}) != action_)
    throw MathError("dynamics field fails the action identity");
  gamma_ = std::move(G);
  return *gamma_;
}

std::vector<std::pair<std::string, SuperFunction>> LagrangianSystem::euler_lagrange() const {
  const SuperVectorField& G = dynamics();
  std::vector<std::pair<std::string, SuperFunction>> out;
  for (const auto& co : cs_->coords) out.emplace_back(co.name + "'", G.component(co.name));
  return out;
}

std::string RegularityReport::str() const {
  std::ostringstream os;
  os << "parity case: " << parity_case << "\n";
  os << "hessian order: " << hessian_order << "\n";
  if (vv) os << "velocity-velocity block:\n" << vv->str();
  if (zz) os << "odd-odd block:\n" << zz->str();
  if (zv) os << "odd-velocity block:\n" << zv->str();
  os << "two-form body rank: " << omega_body_rank << " of " << omega_full_rank << "\n";
  os << "verdict: " << (regular ? "regular" : "degenerate") << "\n";
  for (const auto& why : reasons) os << "  reason: " << why << "\n";
  return os.str();
}

}  // namespace supermech
