#pragma once

#include <cstdint>
#include <vector>

#include "ssr/reduction.hpp"

namespace ssr {

// Reduced scalars gamma[sigma][v] = residue of sigma(varpi_v) / varpi_{sigma v}, so that
// ybar on the chart of sigma(v) at sigma(P) is gamma * phi(ybar(P)).
struct FiberGalois {
  std::vector<std::vector<Fq>> gamma;
};
FiberGalois fiber_galois(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                         const SpecialFiberY& Y);

// Permutation of the components and nodes of Ybar over an algebraic closure induced by the pair
// (sigma, Frob_p^J) with J = j(sigma) mod f. flip[x] is set when the image node has its branches
// exchanged relative to the side-a/side-b orientation.
struct YPerm {
  std::vector<int> comp;
  std::vector<int> node;
  std::vector<char> flip;
};
YPerm y_action(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act, const FiberGalois& fg,
               const SpecialFiberY& Y, int sigma, int J);
YPerm compose(const YPerm& outer, const YPerm& inner);
// Incidences must commute with every element of the group; GluingAmbiguity otherwise.
void check_equivariance(const SpecialFiberY& Y, const std::vector<YPerm>& perms);

// Invariants of the wild part acting by translations X -> X + b, b in B.
struct WildQuotient {
  std::vector<Fq> translations;  // the group B, ascending
  FqPoly ubar;                   // prod_{b in B} (X + b)
  FqPoly gbar;                   // gbar(ubar) = fbar
};
WildQuotient wild_quotient(const FqPoly& fbar, const std::vector<Fq>& translations);

struct DescendedComponent {
  int vertex = -1;         // orbit representative
  std::vector<int> orbit;  // Galois orbit of vertices
  int j0 = 1;              // field of definition F_{p^j0}
  WildQuotient wild;
  int tame_element = 0;
  Fq c = 1, gamma = 1;     // tame generator: ubar -> c ubar, ybar -> gamma ybar
  int m = 1, mu = 1, s = 0, nbar = 1;
  RatFunc hbar;            // zbar^nbar = hbar(wbar) over the residue field of L
  FieldPtr field;          // F_{p^j0}
  RatFunc hprime;          // the same curve with coordinates defined over field
  KummerGenus genus;
  bool genus_zero_quotient = false;  // mu/m = n
  std::vector<std::int64_t> lfactor;  // over F_p, in T
  int geometric_components() const { return j0 * genus.components; }
};

// Orbits of Ybar components and non-inverted nodes under a group, with a Frobenius signed permutation.
struct GraphQuotient {
  std::vector<std::vector<int>> comp_orbits;
  std::vector<std::vector<int>> node_orbits;  // non-inverted orbits only
  int inverted_node_orbits = 0;
  std::vector<int> frob_comp;   // on comp_orbits (empty when no Frobenius is given)
  std::vector<int> frob_node;   // on node_orbits
  std::vector<int> frob_sign;   // +1 or -1 per node orbit
  int betti() const {
    return static_cast<int>(node_orbits.size()) - static_cast<int>(comp_orbits.size()) + 1;
  }
};
GraphQuotient graph_quotient(const SpecialFiberY& Y, const std::vector<YPerm>& group, const YPerm* frob);

struct InertialCurve {
  std::vector<DescendedComponent> components;
  GraphQuotient graph;  // dual graph of the inertial reduction over an algebraic closure
  int dim_h1 = 0;
};

DescendedComponent descend_component(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                     const FiberGalois& fg, const SpecialFiberY& Y, int v);

InertialCurve assemble_inertial_curve(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                      const FiberGalois& fg, const SpecialFiberY& Y);

// Arithmetic genus of Ybar / H for a subgroup H of the wild inertia group.
int wild_quotient_genus(const GaloisGroup& G, const TreeGaloisAction& act, const FiberGalois& fg,
                        const SpecialFiberY& Y, const std::vector<YPerm>& H_perms, const std::vector<int>& H);

}  // namespace ssr
