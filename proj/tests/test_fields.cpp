#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracle.hpp"
#include "supermech/fields.hpp"

using namespace supermech;

namespace {

SuperFunction SF(const ChartPtr& cs, const std::string& s) {
  return parse_superfunction(cs, s);
}

SuperVectorField random_field(std::mt19937_64& rng, const ChartPtr& cs) {
  SuperVectorField X(cs);
  for (const auto& c : cs->coords)
    X.set_component(c.name, oracle::random_superfunction(rng, cs, 2));
  return X;
}

SuperVectorField random_homogeneous_field(std::mt19937_64& rng, const ChartPtr& cs, int p) {
  SuperVectorField X(cs);
  for (const auto& c : cs->coords) {
    int want = (p + cs->parity_of(c.name)) % 2;
    X.set_component(c.name, oracle::random_homogeneous(rng, cs, want));
  }
  return X;
}

}  // namespace

TEST_CASE("apply basics") {
  auto tm = make_chart("tangent", 1, 2);
  auto dq = SuperVectorField::coordinate_field(tm, "q1");
  CHECK(dq.apply(SF(tm, "q1^2")) == SF(tm, "2*q1"));

  // th1 d/dth2 applied to th2*th1: the surviving factor collides and kills it
  SuperVectorField X(tm);
  X.set_component("th2", SF(tm, "th1"));
  CHECK(X.apply(SF(tm, "th2*th1")).is_zero());

  auto dth1 = SuperVectorField::coordinate_field(tm, "th1");
  CHECK(dth1.apply(SF(tm, "th1*th2")) == SF(tm, "th2"));

  CHECK_THROWS_AS(X.apply(SF(make_chart("tangent", 1, 1), "q1")), MathError);
  CHECK_THROWS_AS(X.set_component("nope", SF(tm, "q1")), MathError);
}

TEST_CASE("superderivation rule") {
  std::mt19937_64 rng(21);
  auto cs = make_chart("tangent", 1, 2);
  for (int rep = 0; rep < 60; rep++) {
    int px = rep % 2, pf = (rep / 2) % 2;
    auto X = random_homogeneous_field(rng, cs, px);
    auto f = oracle::random_homogeneous(rng, cs, pf);
    auto g = oracle::random_superfunction(rng, cs, 3);
    auto lhs = X.apply(f * g);
    auto rhs = X.apply(f) * g + (f * X.apply(g)).scale(ScalarExpr::integer(px * pf ? -1 : 1));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("fields along a morphism") {
  auto b = make_chart("base", 1, 2);
  SuperMorphism phi;
  phi.source = b;
  phi.target = b;
  phi.pb["q1"] = SF(b, "q1 + th1*th2");
  phi.pb["th1"] = SF(b, "th1");
  phi.pb["th2"] = SF(b, "q1*th2");
  phi.validate();

  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; rep++) {
    int px = rep % 2, pf = (rep / 2) % 2;
    FieldAlongMorphism X(phi);
    for (const auto& c : b->coords)
      X.set_component(c.name,
                      oracle::random_homogeneous(rng, b, (px + b->parity_of(c.name)) % 2));
    auto f = oracle::random_homogeneous(rng, b, pf);
    auto g = oracle::random_superfunction(rng, b, 3);
    // Leibniz relative to the pullback
    auto lhs = X.apply(f * g);
    auto rhs = X.apply(f) * phi.pullback(g) +
               (phi.pullback(f) * X.apply(g)).scale(ScalarExpr::integer(px * pf ? -1 : 1));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("hat restriction") {
  auto b = make_chart("base", 1, 1);
  auto tm = make_chart("tangent", 1, 1);
  auto stm = make_chart("tangent-super", 1, 1);

  auto X = SuperVectorField::coordinate_field(b, "q1");
  auto hatX = hat_restrict(X, SuperMorphism::identity(b));
  CHECK(hatX.component("q1") == SF(b, "1"));
  CHECK(hatX.apply(SF(b, "q1*th1")) == SF(b, "th1"));

  // a field on the super chart restricted to the plain one: pi components die
  auto im = canonical_imbedding(tm, stm);
  SuperVectorField Y(stm);
  Y.set_component("q1", SF(stm, "pv1"));
  CHECK(hat_restrict(Y, im).is_zero());

  SuperVectorField Z(stm);
  Z.set_component("q1", SF(stm, "v1 + pv1"));
  Z.set_component("v1", SF(stm, "q1 + pz1*pv1"));
  auto hatZ = hat_restrict(Z, im);
  CHECK(hatZ.component("q1") == SF(tm, "v1"));
  CHECK(hatZ.component("v1") == SF(tm, "q1"));
}

TEST_CASE("push and projectability") {
  auto tm = make_chart("tangent", 1, 1);
  auto tau = canonical_projection(tm);

  auto dv = SuperVectorField::coordinate_field(tm, "v1");
  auto pushed = push_along(dv, tau);
  CHECK(pushed.is_zero());
  auto pr0 = project_field(dv, tau);
  CHECK(pr0.status == ProjectStatus::Projectable);
  CHECK(pr0.field->is_zero());

  SuperVectorField Y(tm);
  Y.set_component("q1", SF(tm, "v1"));
  auto along = push_along(Y, tau);
  CHECK(along.component("q1") == SF(tm, "v1"));
  CHECK(project_field(Y, tau).status == ProjectStatus::NotProjectable);

  SuperVectorField W(tm);
  W.set_component("q1", SF(tm, "q1*th1"));
  W.set_component("th1", SF(tm, "th1"));
  auto prW = project_field(W, tau);
  CHECK(prW.status == ProjectStatus::Projectable);
  CHECK(prW.field->component("q1") == SF(tau.target, "q1*th1"));
  CHECK(prW.field->component("th1") == SF(tau.target, "th1"));

  // non-projection morphisms stay undecided
  auto b = make_chart("base", 1, 1);
  SuperMorphism flip;
  flip.source = b;
  flip.target = b;
  flip.pb["q1"] = SF(b, "2*q1");
  flip.pb["th1"] = SF(b, "th1");
  auto Xb = SuperVectorField::coordinate_field(b, "q1");
  CHECK(project_field(Xb, flip).status == ProjectStatus::Undecided);
}

TEST_CASE("total time derivative") {
  auto tm = make_chart("tangent", 1, 1);
  auto stm = make_chart("tangent-super", 1, 1);
  auto T = total_time_derivative(tm);
  auto ST = total_time_derivative(stm);
  auto base = T.morphism().target;

  CHECK(T.apply(SF(base, "q1")) == SF(tm, "v1"));
  CHECK(ST.apply(SF(ST.morphism().target, "q1")) == SF(stm, "v1 + pv1"));
  CHECK(T.apply(SF(base, "q1*th1")) == SF(tm, "v1*th1 + q1*z1"));
  CHECK(T.apply(SF(base, "th1")) == SF(tm, "z1"));
}

TEST_CASE("vertical lift of functions") {
  auto b2 = make_chart("base", 2, 0);
  auto tm2 = make_chart("tangent", 2, 0);
  CHECK(vertical_lift_function(SF(b2, "q1"), tm2) == SF(tm2, "v1"));
  CHECK(vertical_lift_function(SF(b2, "q1*q2"), tm2) == SF(tm2, "q2*v1 + q1*v2"));

  auto b = make_chart("base", 1, 2);
  auto tm = make_chart("tangent", 1, 2);
  auto stm = make_chart("tangent-super", 1, 2);
  // d(th1*th2)/dth1 = th2, d(th1*th2)/dth2 = -th1; the derivative stays on
  // the left of the fiber weight
  auto fv = vertical_lift_function(SF(b, "th1*th2"), tm);
  CHECK(fv == SF(tm, "th2*z1 - th1*z2"));
  auto fvs = vertical_lift_function(SF(b, "th1*th2"), stm);
  CHECK(fvs == SF(stm, "th2*(z1 + pz1) - th1*(z2 + pz2)"));

  // cross-check the signs numerically
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; rep++) {
    auto f = oracle::random_superfunction(rng, b, 3);
    auto lifted = vertical_lift_function(f, tm);
    auto pt = oracle::random_point(rng, tm);
    // d/dth weights z with the derivative to the left
    oracle::Grass expect(tm->odd_count());
    for (const auto& c : tm->coords) {
      if (c.role != Role::Position && c.role != Role::OddPosition) continue;
      auto d = embed(f, tm).left_derivative(c.name);
      std::string w = c.role == Role::Position
                          ? "v" + std::to_string(tm->position(c.name) + 1)
                          : "z" + std::to_string(tm->odd_id.at(c.name) + 1);
      expect = oracle::add(expect, oracle::mul(oracle::project(d, pt),
                                               oracle::project(SF(tm, w), pt)));
    }
    CHECK(oracle::max_abs_diff(oracle::project(lifted, pt), expect) < 1e-9);
  }
}

TEST_CASE("vertical lift of fields") {
  auto b = make_chart("base", 1, 1);
  auto tm = make_chart("tangent", 1, 1);
  auto stm = make_chart("tangent-super", 1, 1);

  auto lift = vertical_lift_field(SuperVectorField::coordinate_field(b, "q1"), tm);
  CHECK(lift == SuperVectorField::coordinate_field(tm, "v1"));

  SuperVectorField X(b);
  X.set_component("th1", SF(b, "th1"));
  auto lx = vertical_lift_field(X, tm);
  CHECK(lx.component("z1") == SF(tm, "th1"));
  CHECK(lx.component("v1").is_zero());

  // defining identity on the plain chart over the generating family
  std::mt19937_64 rng(51);
  auto b12 = make_chart("base", 1, 2);
  auto tm12 = make_chart("tangent", 1, 2);
  std::vector<SuperFunction> family = {SF(b12, "q1"), SF(b12, "th1"), SF(b12, "th2"),
                                       SF(b12, "q1^2"), SF(b12, "q1*th1"), SF(b12, "q1*th2")};
  for (int rep = 0; rep < 10; rep++) {
    auto Xr = random_field(rng, b12);
    auto XV = vertical_lift_field(Xr, tm12);
    for (const auto& f : family)
      CHECK(XV.apply(vertical_lift_function(f, tm12)) == embed(Xr.apply(f), tm12));
  }

  // super chart: the identity picks up a parity factor; even inputs see only
  // the q channel, odd inputs only the th channel
  auto stm12 = make_chart("tangent-super", 1, 2);
  for (int rep = 0; rep < 30; rep++) {
    int px = rep % 2, pf = (rep / 2) % 2;
    auto Xr = random_homogeneous_field(rng, b12, px);
    auto XV = vertical_lift_field(Xr, stm12);
    auto f = oracle::random_homogeneous(rng, b12, pf);
    auto lhs = XV.apply(vertical_lift_function(f, stm12));
    SuperFunction rhs(stm12);
    ScalarExpr qw = ScalarExpr::integer(pf ? 0 : 2);
    ScalarExpr tw = ScalarExpr::integer(pf ? 2 : 0);
    auto F = embed(f, stm12);
    for (const auto& c : b12->coords) {
      auto w = c.role == Role::Position ? qw : tw;
      rhs = rhs + (embed(Xr.component(c.name), stm12) * F.left_derivative(c.name)).scale(w);
    }
    CHECK(lhs == rhs);
  }

  // and homogeneity is essential there: these kill every lifted function of
  // the matching parity without being zero
  SuperVectorField K(stm12);
  K.set_component("v1", SF(stm12, "1"));
  K.set_component("pv1", SF(stm12, "-1"));
  SuperVectorField Ko(stm12);
  Ko.set_component("z1", SF(stm12, "1"));
  Ko.set_component("pz1", SF(stm12, "-1"));
  for (int rep = 0; rep < 10; rep++) {
    auto fe = oracle::random_homogeneous(rng, b12, 0);
    auto fo = oracle::random_homogeneous(rng, b12, 1);
    CHECK(K.apply(vertical_lift_function(fe, stm12)).is_zero());
    CHECK(Ko.apply(vertical_lift_function(fo, stm12)).is_zero());
  }
}

// a field is pinned down by what it does to lifted functions: unknowns for
// every component coefficient, equations from the generating family, then a
// full-rank check of the resulting linear system
TEST_CASE("determinacy through lifted functions") {
  auto b = make_chart("base", 1, 1);
  auto tm = make_chart("tangent", 1, 1);

  std::vector<OddMono> monos = {{}, {0}, {1}, {0, 1}};
  std::vector<std::string> slots;
  for (const auto& c : tm->coords) slots.push_back(c.name);

  int nu = 0;
  SuperVectorField Y(tm);
  std::map<std::string, int> ucol;
  for (const auto& s : slots) {
    SuperFunction comp(tm);
    for (const auto& mo : monos) {
      std::string u = "u" + std::to_string(nu);
      ucol[u] = nu++;
      comp.set_coefficient(mo, ScalarExpr::variable(u));
    }
    Y.set_component(s, comp);
  }

  std::vector<SuperFunction> family = {SF(b, "q1"), SF(b, "th1"), SF(b, "q1^2"),
                                       SF(b, "q1*th1")};
  // rows keyed by (family member, generator monomial, even monomial)
  std::map<std::string, std::vector<ScalarExpr>> rows;
  int fi = 0;
  for (const auto& f : family) {
    auto e = Y.apply(vertical_lift_function(f, tm));
    const Poly one = ScalarExpr::integer(1).num;
    for (const auto& [mo, coeff] : e.terms()) {
      REQUIRE(coeff.den == one);
      for (const auto& [mono, val] : coeff.num) {
        std::string ukey, rest;
        for (const auto& [sym, exp] : mono) {
          std::string piece = sym.str() + "^" + std::to_string(exp);
          if (ucol.count(sym.str())) {
            REQUIRE(exp == 1);
            REQUIRE(ukey.empty());
            ukey = sym.str();
          } else {
            rest += piece;
          }
        }
        REQUIRE(!ukey.empty());
        std::string rk = std::to_string(fi);
        for (int id : mo) rk += "g" + std::to_string(id);
        rk += "|" + rest;
        auto& row = rows[rk];
        row.resize(nu, ScalarExpr::integer(0));
        row[ucol[ukey]] = row[ucol[ukey]] + ScalarExpr::rational(val);
      }
    }
    fi++;
  }
  std::vector<std::vector<ScalarExpr>> M;
  for (auto& [k, row] : rows) {
    row.resize(nu, ScalarExpr::integer(0));
    M.push_back(row);
  }
  CHECK(scalar_matrix_rank(M) == nu);  // only the zero field annihilates them all
}

TEST_CASE("vertical endomorphism") {
  auto tm = make_chart("tangent", 1, 1);
  auto stm = make_chart("tangent-super", 1, 1);

  CHECK(vertical_endomorphism(SuperVectorField::coordinate_field(tm, "q1")) ==
        SuperVectorField::coordinate_field(tm, "v1"));
  CHECK(vertical_endomorphism(SuperVectorField::coordinate_field(tm, "v1")).is_zero());
  CHECK(vertical_endomorphism(SuperVectorField::coordinate_field(tm, "th1")) ==
        SuperVectorField::coordinate_field(tm, "z1"));

  auto s_dq = vertical_endomorphism(SuperVectorField::coordinate_field(stm, "q1"));
  CHECK(s_dq == SuperVectorField::coordinate_field(stm, "v1") +
                    SuperVectorField::coordinate_field(stm, "pv1"));
  auto s_dth = vertical_endomorphism(SuperVectorField::coordinate_field(stm, "th1"));
  CHECK(s_dth == SuperVectorField::coordinate_field(stm, "z1") +
                     SuperVectorField::coordinate_field(stm, "pz1"));
  for (const char* nm : {"v1", "z1", "pv1", "pz1"})
    CHECK(vertical_endomorphism(SuperVectorField::coordinate_field(stm, nm)).is_zero());

  // S.S = 0 on random fields, both charts
  std::mt19937_64 rng(61);
  for (const auto& cs : {tm, stm})
    for (int rep = 0; rep < 15; rep++) {
      auto Y = random_field(rng, cs);
      CHECK(vertical_endomorphism(vertical_endomorphism(Y)).is_zero());
      CHECK(vertical_endomorphism(vertical_endomorphism(Y) + Y) ==
            vertical_endomorphism(Y));
    }

  // on the plain chart the image of S spans exactly its kernel: the matrix
  // of S over the body has rank m+n out of 2(m+n)
  auto tm21 = make_chart("tangent", 2, 1);
  std::vector<std::vector<ScalarExpr>> M;
  for (const auto& ci : tm21->coords) {
    auto img = vertical_endomorphism(SuperVectorField::coordinate_field(tm21, ci.name));
    std::vector<ScalarExpr> row;
    for (const auto& cj : tm21->coords) row.push_back(img.component(cj.name).body());
    M.push_back(row);
  }
  CHECK(scalar_matrix_rank(M) == 3);
  // and S lands inside its own kernel
  for (int rep = 0; rep < 10; rep++) {
    auto Y = random_field(rng, tm21);
    CHECK(vertical_endomorphism(vertical_endomorphism(Y)).is_zero());
  }
}

TEST_CASE("liouville field") {
  auto tm = make_chart("tangent", 1, 2);
  auto stm = make_chart("tangent-super", 1, 1);
  auto D = liouville_field(tm);
  CHECK(D.apply(SF(tm, "v1")) == SF(tm, "v1"));
  CHECK(D.apply(SF(tm, "q1")).is_zero());
  CHECK(D.apply(SF(tm, "z1*z2")) == SF(tm, "2*z1*z2"));

  SuperVectorField expect(tm);
  expect.set_component("v1", SF(tm, "v1"));
  expect.set_component("z1", SF(tm, "z1"));
  expect.set_component("z2", SF(tm, "z2"));
  CHECK(D == expect);

  auto DS = liouville_field(stm);
  SuperVectorField es(stm);
  es.set_component("v1", SF(stm, "v1 + pv1"));
  es.set_component("pv1", SF(stm, "v1 + pv1"));
  es.set_component("z1", SF(stm, "z1 + pz1"));
  es.set_component("pz1", SF(stm, "z1 + pz1"));
  CHECK(DS == es);

  // any second order field collapses to the Liouville field under S
  SuperVectorField gamma(tm);
  gamma.set_component("q1", SF(tm, "v1"));
  gamma.set_component("th1", SF(tm, "z1"));
  gamma.set_component("th2", SF(tm, "z2"));
  gamma.set_component("v1", SF(tm, "q1*v1"));
  gamma.set_component("z2", SF(tm, "q1*z1"));
  CHECK(vertical_endomorphism(gamma) == D);
}

TEST_CASE("sections of the structural bundle") {
  auto b = make_chart("base", 1, 1);

  auto X = hat_restrict(SuperVectorField::coordinate_field(b, "q1"), SuperMorphism::identity(b));
  auto sec = section_from_field(X);
  CHECK(sec.assignment("v1") == SF(b, "1"));
  CHECK(sec.assignment("pv1").is_zero());
  CHECK(sec.assignment("z1").is_zero());
  CHECK(sec.assignment("pz1").is_zero());
  CHECK(sec.assignment("q1") == SF(b, "q1"));

  SuperVectorField Xo(b);
  Xo.set_component("q1", SF(b, "th1"));
  auto so = section_from_field(hat_restrict(Xo, SuperMorphism::identity(b)));
  CHECK(so.assignment("pv1") == SF(b, "th1"));
  CHECK(so.assignment("v1").is_zero());

  // round trips, also along a nontrivial morphism
  std::mt19937_64 rng(71);
  SuperMorphism phi;
  phi.source = b;
  phi.target = b;
  phi.pb["q1"] = SF(b, "q1^2");
  phi.pb["th1"] = SF(b, "q1*th1");
  phi.validate();
  for (int rep = 0; rep < 15; rep++) {
    FieldAlongMorphism A(phi);
    for (const auto& c : b->coords)
      A.set_component(c.name, oracle::random_superfunction(rng, b, 2));
    auto s = section_from_field(A);
    // the section covers phi
    auto covered = compose(canonical_projection(s.target), s);
    for (const auto& c : b->coords)
      CHECK(covered.assignment(c.name) == phi.assignment(c.name));
    CHECK(field_from_section(s) == A);
  }
}
