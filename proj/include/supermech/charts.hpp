#pragma once

// Chart construction for the bundle hierarchy over a coordinate superdomain
// with m even / n odd positions, and superdomain morphisms given by their
// pullbacks.  Chart layouts (these fix the differential sort order and the
// odd generator ids; odd position coordinates always come first among the
// odd coordinates, so moving a function from the base into any larger chart
// never renumbers its generators):
//   base:                q1..qm | th1..thn
//   tangent:             q, v | th, z
//   tangent-super:       q, v, pz | th, z, pv
//   cotangent:           q, p | th, eta
//   cotangent-super:     q, p, peta | th, eta, pp
//   odd-momentum-sector: q, peta | th, pp

#include <utility>

#include "supermech/superfunction.hpp"

namespace supermech {

ChartPtr make_chart(const std::string& kind, int m, int n);
ChartPtr make_chart(const std::string& kind, const std::vector<std::string>& even_names,
                    const std::vector<std::string>& odd_names);

// v3, pz12, eta1, ... : generated fiber names may not be used as position names
bool is_reserved_fiber_name(const std::string& name);

// the base chart a fibered chart sits over (same position names)
ChartPtr base_of(const ChartPtr& big);

// re-read a function over `from` on the larger chart `to`; pure renumbering,
// every coordinate of `from` must exist in `to`
SuperFunction embed(const SuperFunction& f, const ChartPtr& to);

struct SuperMorphism {
  ChartPtr source;
  ChartPtr target;
  // target coordinate name -> its pullback, a function over the source
  std::map<std::string, SuperFunction> pb;

  static SuperMorphism identity(ChartPtr cs);
  void validate() const;
  const SuperFunction& assignment(const std::string& target_coord) const;
  SuperFunction pullback(const SuperFunction& f_over_target) const;
  std::string str() const;
};

// compose(f, g) = f after g: g maps A -> B, f maps B -> C, the result A -> C
// and its pullback is g* after f*
SuperMorphism compose(const SuperMorphism& f, const SuperMorphism& g);

// bundle projection (tau/pi and their big-chart versions): forget the fibers
SuperMorphism canonical_projection(const ChartPtr& big);

// inclusion of the plain (co)tangent chart into the super version: the pi
// coordinates pull back to zero
SuperMorphism canonical_imbedding(const ChartPtr& plain, const ChartPtr& super);

// Lift a base transition (source/target both base charts) to the transition
// of the induced tangent bundle chart; kind is "tangent" or "tangent-super".
//   v'   =  sum (dq'/dq) v  - sum (dq'/dth) z
//   z'   =  sum (dth'/dq) v + sum (dth'/dth) z
//   pz'  = -sum (dth'/dq) pv + sum (dth'/dth) pz
//   pv'  =  sum (dq'/dq) pv + sum (dq'/dth) pz
SuperMorphism induce_st_transition(const SuperMorphism& base_transition,
                                   const std::string& kind = "tangent-super");

// The block transition matrix of the structural bundle attached to a base
// transition, over the source tangent-super chart.  Blocks (rows/cols n|n|m):
//   [ psi                0    0       ]
//   [ (d psi/dq) v       psi  0       ]
//   [ -2 phi_{ab} pz_b   0    dphi0/dq ]
// psi = linear odd-odd part of the transition, phi0 = body of the even part,
// phi_{ab} = theta-theta coefficients of the even part.
GradedMatrix structural_transition(const SuperMorphism& base_transition);

// body Jacobian pair: (dq'/dq body, psi body); both cocycles on overlaps
std::pair<std::vector<std::vector<ScalarExpr>>, std::vector<std::vector<ScalarExpr>>>
body_split(const SuperMorphism& base_transition);

}  // namespace supermech
