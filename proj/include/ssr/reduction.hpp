#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssr/finitefield.hpp"
#include "ssr/localfield.hpp"
#include "ssr/tree.hpp"

namespace ssr {

// f(center + scale * X) = sum b_k X^k and N = min v(b_k) in pi-units.
struct GaussData {
  std::int64_t N = 0;
  LPoly coeffs;
};
GaussData gauss_valuation_f(const LocalField& L, const QPoly& f, const Chart& chart);

// Residue of varpi^{-n} f on the chart; requires v(varpi^n) = N.
FqPoly reduce_f(const LocalField& L, const GaussData& g, const LElem& varpi, int n);

struct SemistableFailure {
  int vertex = -1;
  std::int64_t N = 0;
  std::int64_t residue = 0;  // N mod n
};
// Vertices where n does not divide N_v; empty means semistable.
std::vector<SemistableFailure> semistable_check(const std::vector<std::int64_t>& N, int n);

// Geometric genus of the irreducible curve z^nc = h (h not a proper power geometrically).
int kummer_genus(int nc, const RatFunc& h);
// Sum of the geometric genera of the components of z^nbar = h, and their number.
struct KummerGenus {
  int components = 1;
  int genus_each = 0;
  int total() const { return components * genus_each; }
};
KummerGenus kummer_genus_total(int nbar, const RatFunc& h);

struct VertexReduction {
  int vertex = -1;
  std::int64_t N = 0;  // pi-units
  LElem varpi;         // v(varpi) = N / n
  FqPoly fbar;         // over the residue field of L
  PowerClassData power;
  int D = 1;           // geometric components above the vertex
  Fq lc = 1;           // fbar = lc * H^D with H monic
  FqPoly H;
  int genus = 0;       // genus of each component
};

// Twist unit multiplies the default varpi = pi^(N/n).
VertexReduction reduce_vertex(const LocalField& L, const QPoly& f, const MarkedTree& T, int v, int n,
                              const std::optional<LElem>& twist = std::nullopt);

// Nodes above one edge. Side a is the parent (or the first maximal disc for the top edge),
// side b the child (or the second maximal disc). Fiber labels are the d-th roots omega of u0
// on side a; the same node has label ratio * omega on side b.
struct NodeFiber {
  int edge = -1;
  int side_a = -1, side_b = -1;
  ResPoint pos_a, pos_b;      // node position on each chart (infinity = nullopt)
  int ord_a = 0, ord_b = 0;   // vanishing order of fbar at the position (at infinity: -deg)
  int d = 1;                  // number of nodes
  int exp_a = 0, exp_b = 0;   // |ord| on each side: labels are ybar^(n/d) / t^(exp/d)
  Fq u0 = 1;                  // omega^d = u0
  Fq ratio = 1;               // omega_b = ratio * omega_a
  Fq h0_a = 1;                // leading coefficient of H_a at the node on side a
};

NodeFiber node_fiber(const LocalField& L, const MarkedTree& T, int edge, const std::vector<VertexReduction>& red,
                     int n);

struct YComponent {
  int vertex = -1;
  Fq rho = 0;  // label in the label field: zbar^(n/D) = rho * H
};

struct YNode {
  int fiber = -1;
  Fq omega = 0;  // side-a label in the label field
  int comp_a = -1, comp_b = -1;
};

struct SpecialFiberY {
  int n = 0;
  FieldPtr Fres;   // residue field of L
  FieldPtr E;      // label field containing every component and node label
  std::shared_ptr<FieldEmbedding> emb;  // Fres -> E
  std::vector<VertexReduction> vertices;
  std::vector<NodeFiber> fibers;
  std::vector<YComponent> components;
  std::vector<YNode> nodes;
  int betti = 0;
  int arithmetic_genus = 0;
  int component_index(int v, Fq rho) const;
};

// Builds components and nodes with incidences and asserts the genus identity.
SpecialFiberY assemble_special_fiber(const LocalField& L, std::vector<VertexReduction> red,
                                     std::vector<NodeFiber> fibers, int n, int genus_Y);

}  // namespace ssr
