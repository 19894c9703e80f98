#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "ssr/descent.hpp"

namespace ssr {

using IntPoly = std::vector<std::int64_t>;  // coefficients low to high

IntPoly intpoly_mul(const IntPoly& a, const IntPoly& b);
// P(T) -> P(T^d).
IntPoly substitute_power(const IntPoly& P, int d);

// det(1 - Frob T | H^1) of the dual graph: (1 - T) prod_nodes (1 - lambda T^r) / prod_components (1 - T^r).
IntPoly graph_h1_charpoly(const GraphQuotient& g);

struct LFactorResult {
  IntPoly P1;
  IntPoly graph_factor;
  std::vector<IntPoly> component_factors;
};
LFactorResult local_l_factor(const InertialCurve& Z, std::int64_t p);

struct ConductorResult {
  int epsilon = 0;
  mpq_class delta = 0;
  int conductor = 0;
  std::vector<int> quotient_genera;  // genus of Ybar / Gamma_i for i = 1..h
};
ConductorResult conductor_exponent(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                   const FiberGalois& fg, const SpecialFiberY& Y, int genus_Y, const IntPoly& P1);

// Points of the inertial reduction over F_{p^i}: predicted from P1 and the component count,
// and counted on the descended equations with node corrections.
struct CountCheck {
  int degree = 1;
  std::int64_t predicted = 0;
  std::int64_t counted = 0;
};
std::vector<CountCheck> counting_check(const InertialCurve& Z, const IntPoly& P1, std::int64_t p, int max_degree = 2);

}  // namespace ssr
