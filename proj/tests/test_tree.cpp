#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "ssr/errors.hpp"
#include "ssr/tree.hpp"

using namespace ssr;

namespace {

struct Setup {
  SuperellipticCurve C;
  SemistableCandidate cand;
  BranchDivisor D;
  MarkedTree T;
};

Setup setup(const SuperellipticCurve& C) {
  CatalogBounds bounds;
  auto split = splitting_field(radical(C.f), C.p, bounds);
  auto cand = next_semistabilizing_field(radical(C.f), C.p, C.n, split.entry, bounds, 0);
  REQUIRE(cand.has_value());
  auto D = branch_divisor(C, *cand->L, cand->roots);
  auto T = build_tree(cand->L, D);
  return {C, *cand, D, T};
}

int index_of(const MarkedTree& T, const LElem& x) {
  for (int i = 0; i < static_cast<int>(T.points.size()); ++i)
    if ((T.points[i] - x).zero) return i;
  return -1;
}

// Roots of x^2 - c in the field, as a pair.
std::vector<LElem> sqrt_of(const LocalField& L, long c) {
  auto r = split_in(L, {mpq_class(-c), 0, 1});
  REQUIRE(r.has_value());
  return *r;
}

mpq_class ratio(std::int64_t a, std::int64_t b) {
  mpq_class q(a, b);
  q.canonicalize();
  return q;
}

std::set<std::set<int>> vertex_sets(const MarkedTree& T) {
  std::set<std::set<int>> s;
  for (const auto& v : T.vertices) s.insert(std::set<int>(v.cluster.begin(), v.cluster.end()));
  return s;
}

}  // namespace

TEST_CASE("first worked example: tree and specialization") {
  auto S = setup({4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3});
  const LocalField& L = *S.cand.L;
  const MarkedTree& T = S.T;
  REQUIRE(T.vertices.size() == 3);
  REQUIRE(T.edges.size() == 2);
  auto r3 = sqrt_of(L, 3);
  auto rm3 = sqrt_of(L, -3);
  LElem s3 = r3[0];
  LElem alpha = L.from_int(3) - L.from_int(2) * s3;
  LElem alphap = L.from_int(3) + L.from_int(2) * s3;
  int i_s3 = index_of(T, s3), i_ms3 = index_of(T, -s3), i_a = index_of(T, alpha), i_ap = index_of(T, alphap);
  int i_i1 = index_of(T, rm3[0]), i_i2 = index_of(T, rm3[1]);
  REQUIRE(std::min({i_s3, i_ms3, i_a, i_ap, i_i1, i_i2}) >= 0);
  int v1 = T.psi[i_i1];
  CHECK(T.psi[i_i2] == v1);
  CHECK(T.psi[T.infinity_index()] == v1);
  int v2 = T.psi[i_s3], v3 = T.psi[i_ms3];
  CHECK(T.psi[i_a] == v2);
  CHECK(T.psi[i_ap] == v3);
  CHECK(std::set<int>{v1, v2, v3}.size() == 3);
  for (const auto& e : T.edges) {
    CHECK_FALSE(e.top);
    CHECK(e.a == v1);
  }
  // Radii in the v(3) = 1 normalization: 1/2 for the top disc, 1 for the two small ones.
  CHECK(ratio(T.vertices[v1].radius, L.e()) == mpq_class(1, 2));
  CHECK(ratio(T.vertices[v2].radius, L.e()) == 1);
  CHECK(ratio(T.vertices[v3].radius, L.e()) == 1);

  // phi for t = (3^(1/2), -3^(1/2), infinity).
  std::vector<LPoint> pts;
  for (int i = 0; i < T.marked_count(); ++i) pts.push_back(T.marked(i));
  auto phi = phi_map(L, {LPoint(s3), LPoint(-s3), LPoint()}, pts);
  CHECK(phi[i_s3] == ResPoint(0));
  CHECK(phi[i_a] == ResPoint(0));
  CHECK(phi[i_ms3] == ResPoint(1));
  CHECK(phi[i_ap] == ResPoint(1));
  CHECK(phi[T.infinity_index()] == ResPoint());
  CHECK(phi[i_i1].has_value());
  CHECK(phi[i_i2].has_value());
  CHECK(phi[i_i1] != phi[i_i2]);
  for (int k : {i_i1, i_i2}) CHECK((*phi[k] != 0 && *phi[k] != 1));

  // Galois action: the inertia generator fixes v1, swaps v2 and v3, and acts by -X on v1.
  const GaloisGroup& G = *S.cand.galois;
  auto action = galois_on_tree(G, T);
  int sigma = -1;
  for (int s : G.inertia())
    if (G.element_order(s) == 4) sigma = s;
  REQUIRE(sigma >= 0);
  CHECK(action.vertex_perm[sigma][v1] == v1);
  CHECK(action.vertex_perm[sigma][v2] == v3);
  CHECK(action.vertex_perm[sigma][v3] == v2);
  MarkedTree N = T;
  auto gens = normalize_charts(G, N, action);
  auto action2 = galois_on_tree(G, N);
  const FqField& F = *L.residue_field();
  CHECK(action2.map[sigma][v1].a == F.neg(1));
  CHECK(action2.map[sigma][v1].b == 0);
  CHECK(G.element_order(gens[v1]) == 4);
  // The normalized chart on v1 is x / 3^(1/2) up to a unit: its center reduces to 0.
  CHECK(L.valuation(N.vertices[v1].chart.center) > N.vertices[v1].chart.radius);
  // Identity acts trivially.
  for (int v = 0; v < 3; ++v) {
    CHECK(action2.vertex_perm[G.identity()][v] == v);
    CHECK(action2.map[G.identity()][v].a == 1);
    CHECK(action2.map[G.identity()][v].b == 0);
  }
}

TEST_CASE("second worked example: tree and wild translations") {
  auto S = setup({3, qpoly_parse("x^4-x^2+1"), 2});
  const LocalField& L = *S.cand.L;
  const MarkedTree& T = S.T;
  REQUIRE(T.vertices.size() == 3);
  int v0 = T.psi[T.infinity_index()];
  std::set<int> small;
  for (int i = 0; i < 4; ++i) {
    CHECK(T.psi[i] != v0);
    small.insert(T.psi[i]);
  }
  CHECK(small.size() == 2);
  for (int v : small) {
    const auto& c = T.vertices[v].cluster;
    REQUIRE(c.size() == 2);
    // The pair is {zeta, -zeta}.
    CHECK((T.points[c[0]] + T.points[c[1]]).zero);
    CHECK(ratio(T.vertices[v].radius, L.e()) == 1);
  }
  const GaloisGroup& G = *S.cand.galois;
  auto action = galois_on_tree(G, T);
  MarkedTree N = T;
  normalize_charts(G, N, action);
  auto act = galois_on_tree(G, N);
  auto filt = ramification_filtration(G);
  REQUIRE(filt.groups.size() >= 2);
  const FqField& F = *L.residue_field();
  for (int v : small) {
    for (int s : filt.groups[1]) {
      if (s == G.identity()) continue;
      CHECK(act.vertex_perm[s][v] == v);
      CHECK(act.map[s][v].a == 1);
      // Translation by the residue of zeta (up to sign, which is trivial in characteristic 2).
      Fq zeta = L.residue(N.points[N.vertices[v].cluster[0]]);
      CHECK(act.map[s][v].b == zeta);
      CHECK(F.order(zeta) == 3);
    }
  }
  // Frobenius-type elements swap the two small discs.
  int swaps = 0;
  for (int s = 0; s < G.order(); ++s)
    if (G[s].j == 1) swaps += act.vertex_perm[s][*small.begin()] == *small.rbegin();
  CHECK(swaps == G.order() / 2);
}

TEST_CASE("three marked points give one vertex") {
  auto S = setup({2, qpoly_parse("x(x-1)(x+1)(x-2)(x+2)"), 7});
  CHECK(S.T.vertices.size() == 1);
  CHECK(S.T.edges.empty());
  SuperellipticCurve C{3, qpoly_parse("x(x-1)"), 5};
  auto split = splitting_field(radical(C.f), C.p, CatalogBounds{});
  auto D = branch_divisor(C, *split.L, split.roots);
  REQUIRE(D.size() == 3);
  auto T = build_tree(split.L, D);
  CHECK(T.vertices.size() == 1);
  std::vector<LPoint> pts;
  for (int i = 0; i < T.marked_count(); ++i) pts.push_back(T.marked(i));
  auto phi = phi_map(*split.L, {pts[0], pts[1], pts[2]}, pts);
  CHECK(phi[0] == ResPoint(0));
  CHECK(phi[1] == ResPoint(1));
  CHECK(phi[2] == ResPoint());
}

TEST_CASE("cross-ratio against rational arithmetic") {
  // Points 0, 1, -1, 2, 5 and infinity over Q_5; a direct mod-5 cross ratio is the oracle.
  SuperellipticCurve C{2, qpoly_parse("x(x-1)(x+1)(x-2)(x-5)"), 5};
  auto split = splitting_field(radical(C.f), C.p, CatalogBounds{});
  const LocalField& L = *split.L;
  std::vector<long> vals{0, 1, -1, 2, 5};
  std::vector<LPoint> pts;
  for (long v : vals) pts.push_back(L.from_int(v));
  pts.push_back(std::nullopt);
  auto phi = phi_map(L, {pts[1], pts[2], pts[5]}, pts);
  for (size_t k = 0; k < vals.size(); ++k) {
    // lambda = (x - 1) / (-1 - 1), and 1/(-2) = 2 mod 5.
    long r = ((2 * (vals[k] - 1)) % 5 + 5) % 5;
    CHECK(phi[k] == ResPoint(static_cast<Fq>(r)));
  }
  CHECK(phi[5] == ResPoint());
  // The tree: 0 and 5 collide, so a small disc {0, 5} hangs off a valence-5 top vertex.
  auto D = branch_divisor(C, L, split.roots);
  auto T = build_tree(split.L, D);
  CHECK(T.vertices.size() == 2);
  CHECK(T.valence(0) == 5);
  CHECK(T.valence(1) == 3);
}

TEST_CASE("top disc with two directions is dropped") {
  // Roots 0, 3, 1, 4 over Q_3 in two pairs {0, 3} and {1, 4}; infinity is unmarked for n = 2.
  SuperellipticCurve C{2, qpoly_parse("x(x-3)(x-1)(x-4)(x-9)(x-10)"), 3};
  auto split = splitting_field(radical(C.f), C.p, CatalogBounds{});
  auto D = branch_divisor(C, *split.L, split.roots);
  REQUIRE_FALSE(D.includes_infinity);
  auto T = build_tree(split.L, D);
  // Discs {0,3,9}, {0,9}, {1,4,10}, {1,10}: the top is dropped and a top edge joins the two triples.
  CHECK(T.vertices.size() == 4);
  int tops = 0;
  for (const auto& e : T.edges) tops += e.top;
  CHECK(tops == 1);
  for (int v = 0; v < static_cast<int>(T.vertices.size()); ++v) CHECK(T.valence(v) >= 3);
}

TEST_CASE("tree is independent of the input order") {
  for (const auto& C : {SuperellipticCurve{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3},
                        SuperellipticCurve{2, qpoly_parse("x(x-3)(x-1)(x-4)(x-9)(x-10)"), 3}}) {
    CatalogBounds bounds;
    auto split = splitting_field(radical(C.f), C.p, bounds);
    auto D = branch_divisor(C, *split.L, split.roots);
    auto T = build_tree(split.L, D);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      BranchDivisor D2 = D;
      std::shuffle(D2.points.begin(), D2.points.end(), rng);
      auto T2 = build_tree(split.L, D2);
      REQUIRE(T2.vertices.size() == T.vertices.size());
      // Translate vertex clusters of T2 back to indices of D and compare with radii.
      std::multiset<std::pair<std::set<int>, std::int64_t>> a, b;
      for (const auto& v : T.vertices) a.insert({std::set<int>(v.cluster.begin(), v.cluster.end()), v.radius});
      for (const auto& v : T2.vertices) {
        std::set<int> s;
        for (int i : v.cluster) s.insert(index_of(T, T2.points[i]));
        b.insert({s, v.radius});
      }
      CHECK(a == b);
    }
  }
}

TEST_CASE("perturbed charts keep integral Galois maps") {
  auto S = setup({4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3});
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    MarkedTree P = S.T;
    perturb_charts(P, seed);
    auto act = galois_on_tree(*S.cand.galois, P);
    CHECK(vertex_sets(P) == vertex_sets(S.T));
    CHECK(act.vertex_perm.size() == static_cast<size_t>(S.cand.galois->order()));
  }
}
