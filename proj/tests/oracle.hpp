#pragma once

// Test-side numeric oracle: a dense Grassmann algebra on k generators with
// double coefficients, indexed by bitmask with generators multiplied in
// ascending index order.  Engine results are checked against this by
// evaluating their scalar coefficients at random points.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "supermech/superfunction.hpp"

namespace oracle {

struct Grass {
  int k = 0;
  std::vector<double> c;
  explicit Grass(int k_) : k(k_), c(size_t(1) << k_, 0.0) {}
};

inline int merge_sign(uint32_t a, uint32_t b) {
  // (-1)^{#pairs (i in a, j in b) with i > j}
  int inv = 0;
  for (int j = 0; j < 32; j++)
    if (b & (1u << j)) inv += __builtin_popcount(a >> (j + 1));
  return inv % 2 == 0 ? 1 : -1;
}

inline Grass mul(const Grass& a, const Grass& b) {
  Grass r(a.k);
  for (uint32_t ma = 0; ma < a.c.size(); ma++) {
    if (a.c[ma] == 0) continue;
    for (uint32_t mb = 0; mb < b.c.size(); mb++) {
      if (b.c[mb] == 0 || (ma & mb)) continue;
      r.c[ma | mb] += merge_sign(ma, mb) * a.c[ma] * b.c[mb];
    }
  }
  return r;
}

inline Grass add(const Grass& a, const Grass& b) {
  Grass r = a;
  for (size_t i = 0; i < r.c.size(); i++) r.c[i] += b.c[i];
  return r;
}

inline Grass left_derivative(const Grass& a, int id) {
  Grass r(a.k);
  for (uint32_t m = 0; m < a.c.size(); m++) {
    if (a.c[m] == 0 || !(m & (1u << id))) continue;
    int before = __builtin_popcount(m & ((1u << id) - 1));
    r.c[m & ~(1u << id)] += (before % 2 == 0 ? 1 : -1) * a.c[m];
  }
  return r;
}

inline double max_abs_diff(const Grass& a, const Grass& b) {
  double d = 0;
  for (size_t i = 0; i < a.c.size(); i++) d = std::max(d, std::abs(a.c[i] - b.c[i]));
  return d;
}

// evaluate an engine superfunction into the oracle algebra at a numeric point
inline Grass project(const supermech::SuperFunction& f,
                     const std::map<std::string, double>& at) {
  Grass g(f.chart()->odd_count());
  for (const auto& [mono, coeff] : f.terms()) {
    uint32_t mask = 0;
    for (int id : mono) mask |= 1u << id;
    g.c[mask] += coeff.eval(at);
  }
  return g;
}

// random data helpers shared by several suites
inline supermech::ScalarExpr random_coeff(std::mt19937_64& rng,
                                          const std::vector<std::string>& evens) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2), deg(0, 2), pick(0, 99);
  supermech::ScalarExpr e;
  for (int t = 0; t < 2; t++) {
    auto term = supermech::ScalarExpr::rational(supermech::Rational(num(rng), den(rng)));
    if (!evens.empty()) {
      const std::string& v = evens[pick(rng) % evens.size()];
      term = term * supermech::ScalarExpr::variable(v).pow(deg(rng));
    }
    e = e + term;
  }
  return e;
}

inline supermech::SuperFunction random_superfunction(std::mt19937_64& rng,
                                                     const supermech::ChartPtr& cs,
                                                     int max_terms = 4) {
  std::vector<std::string> evens;
  for (const auto& c : cs->coords)
    if (supermech::role_parity(c.role) == 0) evens.push_back(c.name);
  int k = cs->odd_count();
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<uint32_t> mask(0, (1u << k) - 1);
  supermech::SuperFunction f(cs);
  int t = nterms(rng);
  for (int i = 0; i < t; i++) {
    supermech::OddMono mono;
    uint32_t mk = mask(rng);
    for (int id = 0; id < k; id++)
      if (mk & (1u << id)) mono.push_back(id);
    f.set_coefficient(mono, f.coefficient(mono) + random_coeff(rng, evens));
  }
  return f;
}

inline supermech::SuperFunction random_homogeneous(std::mt19937_64& rng,
                                                   const supermech::ChartPtr& cs, int parity) {
  for (int tries = 0; tries < 50; tries++) {
    auto f = random_superfunction(rng, cs).parity_part(parity);
    if (!f.is_zero()) return f;
  }
  return supermech::SuperFunction(cs);
}

inline std::map<std::string, double> random_point(std::mt19937_64& rng,
                                                  const supermech::ChartPtr& cs) {
  std::uniform_real_distribution<double> val(-1.2, 1.2);
  std::map<std::string, double> at;
  for (const auto& c : cs->coords)
    if (supermech::role_parity(c.role) == 0) at[c.name] = val(rng);
  return at;
}

}  // namespace oracle
