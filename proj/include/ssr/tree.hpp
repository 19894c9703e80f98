#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ssr/curve.hpp"
#include "ssr/localfield.hpp"

namespace ssr {

// A point of P^1 over L or over the residue field; nullopt is infinity.
using LPoint = std::optional<LElem>;
using ResPoint = std::optional<Fq>;

// Affine chart x = center + scale * X; the disc of the vertex is X integral.
struct Chart {
  LElem center;
  LElem scale;
  std::int64_t radius = 0;  // v(scale) in pi-units
};

struct TreeVertex {
  std::vector<int> cluster;      // indices of the finite marked points in the disc
  std::int64_t radius = 0;       // min pairwise v(alpha - beta) over the cluster, pi-units
  int parent = -1;
  std::vector<int> children;
  std::array<int, 3> triple{};   // representative marked points; index m (= #finite points) is infinity
  Chart chart;
};

struct TreeEdge {
  int a = -1, b = -1;  // parent, child; for the top edge the two maximal vertices
  bool top = false;    // joins two maximal discs through the infinity side
};

// Stably marked tree of (P^1_L, D_L) in the disc model.
struct MarkedTree {
  LFieldPtr L;
  std::vector<LElem> points;    // finite marked points
  std::vector<int> multiplicity;
  bool has_infinity = false;
  std::vector<TreeVertex> vertices;
  std::vector<TreeEdge> edges;
  std::vector<int> psi;         // per marked point (infinity last when present)
  int infinity_index() const { return static_cast<int>(points.size()); }
  int marked_count() const { return static_cast<int>(points.size()) + (has_infinity ? 1 : 0); }
  LPoint marked(int i) const;
  // Reduction of marked point i on the chart of vertex v.
  ResPoint reduce(int v, int i) const;
  // Reduction of an arbitrary point of P^1(L) on the chart of v.
  ResPoint reduce_point(int v, const LPoint& x) const;
  int valence(int v) const;
};

// phi_t: generalized cross-ratio sending t = (alpha, beta, gamma) to (0, 1, infinity), then reduced.
std::vector<ResPoint> phi_map(const LocalField& L, const std::array<LPoint, 3>& t, const std::vector<LPoint>& pts);

MarkedTree build_tree(const LFieldPtr& L, const BranchDivisor& D);

// Point action of sigma from the chart of v to the chart of sigma(v):
// X -> a * Frob^j(X) + b on residues.
struct AffineMap {
  Fq a = 1;
  Fq b = 0;
  int j = 0;
};

struct TreeGaloisAction {
  std::vector<std::vector<int>> point_perm;   // [sigma][marked point]
  std::vector<std::vector<int>> vertex_perm;  // [sigma][vertex]
  std::vector<std::vector<AffineMap>> map;    // [sigma][v]: chart v -> chart sigma(v)
  std::vector<std::vector<int>> stabilizer;   // [v]: elements fixing v
};

TreeGaloisAction galois_on_tree(const GaloisGroup& G, const MarkedTree& T);

// Moves the center of every vertex whose inertia stabilizer has a tame part acting
// nontrivially, so that the chosen tame generator fixes X = 0. Returns the tame generator per vertex.
std::vector<int> normalize_charts(const GaloisGroup& G, MarkedTree& T, const TreeGaloisAction& action);

// Tame generator of the inertia stabilizer of v: an element whose tame character has maximal order.
int tame_generator(const GaloisGroup& G, const TreeGaloisAction& action, int v);

// Replaces each chart by a PGL_2(O_L)-equivalent one (center shifted by a unit multiple of the
// scale, scale multiplied by a unit), deterministically from the seed.
void perturb_charts(MarkedTree& T, std::uint64_t seed);

}  // namespace ssr
