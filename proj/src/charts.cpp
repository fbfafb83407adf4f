#include "supermech/charts.hpp"

#include <regex>
#include <sstream>

namespace supermech {

namespace {

std::vector<std::string> numbered(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; i++) out.push_back(stem + std::to_string(i));
  return out;
}

}  // namespace

bool is_reserved_fiber_name(const std::string& name) {
  static const std::regex re("^(v|z|pv|pz|p|eta|pp|peta)[0-9]+$");
  return std::regex_match(name, re);
}

ChartPtr make_chart(const std::string& kind, const std::vector<std::string>& even_names,
                    const std::vector<std::string>& odd_names) {
  int m = static_cast<int>(even_names.size());
  int n = static_cast<int>(odd_names.size());
  for (const auto& lst : {even_names, odd_names})
    for (const auto& nm : lst)
      if (is_reserved_fiber_name(nm))
        throw MathError("position name " + nm + " collides with a generated fiber name");
  auto cs = std::make_shared<CoordinateSystem>();
  cs->kind = kind;
  cs->m = m;
  cs->n = n;
  auto add = [&](const std::vector<std::string>& names, Role role) {
    for (const auto& nm : names) cs->coords.push_back({nm, role});
  };
  if (kind == "base") {
    add(even_names, Role::Position);
    add(odd_names, Role::OddPosition);
  } else if (kind == "tangent") {
    add(even_names, Role::Position);
    add(numbered("v", m), Role::Velocity);
    add(odd_names, Role::OddPosition);
    add(numbered("z", n), Role::OddVelocity);
  } else if (kind == "tangent-super") {
    add(even_names, Role::Position);
    add(numbered("v", m), Role::Velocity);
    add(numbered("pz", n), Role::PiOddVelocity);
    add(odd_names, Role::OddPosition);
    add(numbered("z", n), Role::OddVelocity);
    add(numbered("pv", m), Role::PiVelocity);
  } else if (kind == "cotangent") {
    add(even_names, Role::Position);
    add(numbered("p", m), Role::Momentum);
    add(odd_names, Role::OddPosition);
    add(numbered("eta", n), Role::OddMomentum);
  } else if (kind == "cotangent-super") {
    add(even_names, Role::Position);
    add(numbered("p", m), Role::Momentum);
    add(numbered("peta", n), Role::PiOddMomentum);
    add(odd_names, Role::OddPosition);
    add(numbered("eta", n), Role::OddMomentum);
    add(numbered("pp", m), Role::PiMomentum);
  } else if (kind == "odd-momentum-sector") {
    add(even_names, Role::Position);
    add(numbered("peta", n), Role::PiOddMomentum);
    add(odd_names, Role::OddPosition);
    add(numbered("pp", m), Role::PiMomentum);
  } else {
    throw MathError("unknown chart kind " + kind);
  }
  cs->finalize();
  return cs;
}

ChartPtr make_chart(const std::string& kind, int m, int n) {
  return make_chart(kind, numbered("q", m), numbered("th", n));
}

ChartPtr base_of(const ChartPtr& big) {
  std::vector<std::string> evens, odds;
  for (const auto& c : big->coords) {
    if (c.role == Role::Position) evens.push_back(c.name);
    if (c.role == Role::OddPosition) odds.push_back(c.name);
  }
  return make_chart("base", evens, odds);
}

SuperFunction embed(const SuperFunction& f, const ChartPtr& to) {
  SuperFunction r(to);
  const auto& from = *f.chart();
  for (const auto& [m, c] : f.terms()) {
    OddMono mapped;
    mapped.reserve(m.size());
    for (int id : m) {
      const std::string& nm = from.odd_name(id);
      auto it = to->odd_id.find(nm);
      if (it == to->odd_id.end())
        throw MathError("coordinate " + nm + " does not exist in chart " + to->str());
      mapped.push_back(it->second);
    }
    // odd position coordinates keep their relative order across chart kinds,
    // so the mapped monomial is still sorted; be defensive anyway
    for (size_t i = 1; i < mapped.size(); i++)
      if (mapped[i - 1] >= mapped[i]) throw MathError("embedding reordered generators");
    SuperFunction term(to);
    term.set_coefficient(mapped, c);
    r = r + term;
  }
  return r;
}

// ---- SuperMorphism ----

SuperMorphism SuperMorphism::identity(ChartPtr cs) {
  SuperMorphism f;
  f.source = cs;
  f.target = cs;
  for (const auto& c : cs->coords) f.pb[c.name] = SuperFunction::coordinate(cs, c.name);
  return f;
}

void SuperMorphism::validate() const {
  if (!source || !target) throw MathError("morphism without charts");
  for (const auto& c : target->coords) {
    auto it = pb.find(c.name);
    if (it == pb.end()) throw MathError("morphism misses assignment for " + c.name);
    if (it->second.chart() != source && !(*it->second.chart() == *source))
      throw MathError("assignment for " + c.name + " is not over the source chart");
    auto p = it->second.parity();
    if (!p) throw MathError("assignment for " + c.name + " has mixed parity");
    if (!it->second.is_zero() && *p != role_parity(c.role))
      throw MathError("assignment for " + c.name + " has the wrong parity");
  }
}

const SuperFunction& SuperMorphism::assignment(const std::string& target_coord) const {
  auto it = pb.find(target_coord);
  if (it == pb.end()) throw MathError("morphism misses assignment for " + target_coord);
  return it->second;
}

SuperFunction SuperMorphism::pullback(const SuperFunction& f_over_target) const {
  if (f_over_target.chart() != target && !(*f_over_target.chart() == *target))
    throw MathError("pullback argument lives on " + f_over_target.chart()->str() +
                    ", expected " + target->str());
  SuperFunction acc(source);
  auto lookup = [&](const std::string& name) -> std::optional<SuperFunction> {
    auto it = pb.find(name);
    if (it != pb.end()) return it->second;
    if (source->has(name))
      throw MathError("free variable " + name + " collides with a source coordinate");
    return std::nullopt;  // parameter, stays symbolic
  };
  for (const auto& [m, c] : f_over_target.terms()) {
    SuperFunction term = eval_scalar_over(c, source, lookup);
    for (int id : m) term = term * assignment(f_over_target.chart()->odd_name(id));
    acc = acc + term;
  }
  return acc;
}

std::string SuperMorphism::str() const {
  std::ostringstream os;
  for (const auto& c : target->coords) {
    auto it = pb.find(c.name);
    os << c.name << " := " << (it == pb.end() ? "?" : it->second.str()) << "\n";
  }
  return os.str();
}

SuperMorphism compose(const SuperMorphism& f, const SuperMorphism& g) {
  if (g.target != f.source && !(*g.target == *f.source))
    throw MathError("cannot compose: inner target " + g.target->str() +
                    " does not match outer source " + f.source->str());
  SuperMorphism r;
  r.source = g.source;
  r.target = f.target;
  for (const auto& c : f.target->coords) r.pb[c.name] = g.pullback(f.assignment(c.name));
  return r;
}

SuperMorphism canonical_projection(const ChartPtr& big) {
  SuperMorphism pr;
  pr.source = big;
  pr.target = base_of(big);
  for (const auto& c : pr.target->coords)
    pr.pb[c.name] = SuperFunction::coordinate(big, c.name);
  return pr;
}

SuperMorphism canonical_imbedding(const ChartPtr& plain, const ChartPtr& super) {
  SuperMorphism im;
  im.source = plain;
  im.target = super;
  for (const auto& c : super->coords) {
    if (plain->has(c.name))
      im.pb[c.name] = SuperFunction::coordinate(plain, c.name);
    else
      im.pb[c.name] = SuperFunction(plain);  // pi coordinates pull back to zero
  }
  return im;
}

// ---- induced transitions ----

namespace {

struct BaseNames {
  std::vector<std::string> evens, odds;
};

BaseNames base_names(const ChartPtr& base) {
  BaseNames bn;
  for (const auto& c : base->coords) {
    if (c.role == Role::Position) bn.evens.push_back(c.name);
    else bn.odds.push_back(c.name);
  }
  return bn;
}

}  // namespace

SuperMorphism induce_st_transition(const SuperMorphism& base_transition,
                                   const std::string& kind) {
  const SuperMorphism& t = base_transition;
  if (t.source->kind != "base" || t.target->kind != "base")
    throw MathError("induce_st_transition expects a base transition");
  if (kind != "tangent" && kind != "tangent-super")
    throw MathError("induce_st_transition: kind must be tangent or tangent-super");
  BaseNames src = base_names(t.source);
  BaseNames dst = base_names(t.target);
  ChartPtr big_src = make_chart(kind, src.evens, src.odds);
  ChartPtr big_dst = make_chart(kind, dst.evens, dst.odds);
  bool super = kind == "tangent-super";

  SuperMorphism r;
  r.source = big_src;
  r.target = big_dst;
  auto coord = [&](const std::string& nm) { return SuperFunction::coordinate(big_src, nm); };
  auto dpart = [&](const SuperFunction& f, const std::string& x) {
    return embed(f.left_derivative(x), big_src);
  };
  int m = static_cast<int>(src.evens.size());
  int n = static_cast<int>(src.odds.size());

  for (size_t i = 0; i < dst.evens.size(); i++) {
    const SuperFunction& F = t.assignment(dst.evens[i]);
    r.pb[dst.evens[i]] = embed(F, big_src);
    SuperFunction vp(big_src), pvp(big_src);
    for (int j = 0; j < m; j++) {
      SuperFunction dq = dpart(F, src.evens[j]);
      vp = vp + dq * coord("v" + std::to_string(j + 1));
      if (super) pvp = pvp + dq * coord("pv" + std::to_string(j + 1));
    }
    for (int b = 0; b < n; b++) {
      SuperFunction dth = dpart(F, src.odds[b]);
      vp = vp - dth * coord("z" + std::to_string(b + 1));
      if (super) pvp = pvp + dth * coord("pz" + std::to_string(b + 1));
    }
    r.pb["v" + std::to_string(i + 1)] = vp;
    if (super) r.pb["pv" + std::to_string(i + 1)] = pvp;
  }
  for (size_t a = 0; a < dst.odds.size(); a++) {
    const SuperFunction& G = t.assignment(dst.odds[a]);
    r.pb[dst.odds[a]] = embed(G, big_src);
    SuperFunction zp(big_src), pzp(big_src);
    for (int j = 0; j < m; j++) {
      SuperFunction dq = dpart(G, src.evens[j]);
      zp = zp + dq * coord("v" + std::to_string(j + 1));
      if (super) pzp = pzp - dq * coord("pv" + std::to_string(j + 1));
    }
    for (int b = 0; b < n; b++) {
      SuperFunction dth = dpart(G, src.odds[b]);
      zp = zp + dth * coord("z" + std::to_string(b + 1));
      if (super) pzp = pzp + dth * coord("pz" + std::to_string(b + 1));
    }
    r.pb["z" + std::to_string(a + 1)] = zp;
    if (super) r.pb["pz" + std::to_string(a + 1)] = pzp;
  }
  r.validate();
  return r;
}

GradedMatrix structural_transition(const SuperMorphism& base_transition) {
  const SuperMorphism& t = base_transition;
  if (t.source->kind != "base" || t.target->kind != "base")
    throw MathError("structural_transition expects a base transition");
  BaseNames src = base_names(t.source);
  BaseNames dst = base_names(t.target);
  int m = static_cast<int>(src.evens.size());
  int n = static_cast<int>(src.odds.size());
  if (static_cast<int>(dst.evens.size()) != m || static_cast<int>(dst.odds.size()) != n)
    throw MathError("structural_transition expects equal dimensions");
  ChartPtr big = make_chart("tangent-super", src.evens, src.odds);

  // psi[a][b]: coefficient of th_b in the odd assignments
  std::vector<std::vector<ScalarExpr>> psi(n, std::vector<ScalarExpr>(n));
  for (int a = 0; a < n; a++) {
    const SuperFunction& G = t.assignment(dst.odds[a]);
    for (int b = 0; b < n; b++) psi[a][b] = G.coefficient(OddMono{b});
  }
  // phi0[i] and phi2[i][a][b] (a<b): body and theta-theta parts of the evens
  std::vector<ScalarExpr> phi0(m);
  std::vector<std::vector<std::vector<ScalarExpr>>> phi2(
      m, std::vector<std::vector<ScalarExpr>>(n, std::vector<ScalarExpr>(n)));
  for (int i = 0; i < m; i++) {
    const SuperFunction& F = t.assignment(dst.evens[i]);
    phi0[i] = F.body();
    for (int a = 0; a < n; a++)
      for (int b = a + 1; b < n; b++) {
        phi2[i][a][b] = F.coefficient(OddMono{a, b});
        phi2[i][b][a] = -phi2[i][a][b];
      }
  }

  GradedMatrix M(big, 2 * n + m, 2 * n + m);
  auto emb = [&](const ScalarExpr& s) { return SuperFunction::from_scalar(big, s); };
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++) {
      M.at(a, b) = emb(psi[a][b]);
      M.at(n + a, n + b) = emb(psi[a][b]);
      SuperFunction dv(big);
      for (int j = 0; j < m; j++)
        dv = dv + emb(psi[a][b].derivative(src.evens[j])) *
                      SuperFunction::coordinate(big, "v" + std::to_string(j + 1));
      M.at(n + a, b) = dv;
    }
  for (int i = 0; i < m; i++) {
    for (int a = 0; a < n; a++) {
      SuperFunction s(big);
      for (int b = 0; b < n; b++)
        s = s + emb(phi2[i][a][b]) *
                    SuperFunction::coordinate(big, "pz" + std::to_string(b + 1));
      M.at(2 * n + i, a) = s.scale(ScalarExpr::integer(-2));
    }
    for (int j = 0; j < m; j++)
      M.at(2 * n + i, 2 * n + j) = emb(phi0[i].derivative(src.evens[j]));
  }
  return M;
}

std::pair<std::vector<std::vector<ScalarExpr>>, std::vector<std::vector<ScalarExpr>>>
body_split(const SuperMorphism& base_transition) {
  const SuperMorphism& t = base_transition;
  BaseNames src = base_names(t.source);
  BaseNames dst = base_names(t.target);
  int m = static_cast<int>(src.evens.size());
  int n = static_cast<int>(src.odds.size());
  std::vector<std::vector<ScalarExpr>> A(m, std::vector<ScalarExpr>(m));
  std::vector<std::vector<ScalarExpr>> D(n, std::vector<ScalarExpr>(n));
  for (int i = 0; i < static_cast<int>(dst.evens.size()); i++)
    for (int j = 0; j < m; j++)
      A[i][j] = t.assignment(dst.evens[i]).left_derivative(src.evens[j]).body();
  for (int a = 0; a < static_cast<int>(dst.odds.size()); a++)
    for (int b = 0; b < n; b++)
      D[a][b] = t.assignment(dst.odds[a]).coefficient(OddMono{b});
  return {A, D};
}

}  // namespace supermech
