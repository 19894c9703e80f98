#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "ssr/errors.hpp"
#include "ssr/reduction.hpp"

using namespace ssr;

namespace {

struct Setup {
  SuperellipticCurve C;
  SemistableCandidate cand;
  MarkedTree T;
};

Setup setup(const SuperellipticCurve& C) {
  CatalogBounds bounds;
  auto split = splitting_field(radical(C.f), C.p, bounds);
  auto cand = next_semistabilizing_field(radical(C.f), C.p, C.n, split.entry, bounds, 0);
  REQUIRE(cand.has_value());
  auto D = branch_divisor(C, *cand->L, cand->roots);
  return {C, *cand, build_tree(cand->L, D)};
}

// Some root in L of x^k - c.
LElem root_of(const LocalField& L, int k, const mpq_class& c) {
  std::vector<mpq_class> g(k + 1, 0);
  g[0] = -c;
  g[k] = 1;
  auto r = split_in(L, g);
  REQUIRE(r.has_value());
  REQUIRE(!r->empty());
  return r->front();
}

FqPoly ints(const FieldPtr& F, std::vector<std::int64_t> c) { return FqPoly::from_ints(F, c); }

SpecialFiberY special_fiber(const Setup& S, const MarkedTree& T) {
  const LocalField& L = *S.cand.L;
  std::vector<VertexReduction> red;
  for (int v = 0; v < static_cast<int>(T.vertices.size()); ++v) red.push_back(reduce_vertex(L, S.C.f, T, v, S.C.n));
  std::vector<NodeFiber> fibers;
  for (int e = 0; e < static_cast<int>(T.edges.size()); ++e) fibers.push_back(node_fiber(L, T, e, red, S.C.n));
  return assemble_special_fiber(L, red, fibers, S.C.n, genus(S.C));
}

std::multiset<int> genera(const SpecialFiberY& Y) {
  std::multiset<int> g;
  for (const auto& c : Y.components) g.insert(Y.vertices[c.vertex].genus);
  return g;
}

}  // namespace

TEST_CASE("Kummer genus") {
  auto F9 = FqField::make(3, 2);
  CHECK(kummer_genus(4, RatFunc::poly(ints(F9, {1, 0, -1, 0, -1, 0, 1}))) == 3);  // (x^2-1)^2(x^2+1)
  auto F4 = FqField::make(2, 2);
  Fq z = F4->gen();  // a primitive cube root of unity
  CHECK(kummer_genus(3, RatFunc::poly(FqPoly(F4, {0, z, 1}))) == 1);
  CHECK(kummer_genus(5, RatFunc::poly(FqPoly::constant(F9, 2))) == 0);
  CHECK_THROWS_AS(kummer_genus(4, RatFunc::poly(ints(F9, {1, 0, 1}) * ints(F9, {1, 0, 1}))), Error);
  auto kg = kummer_genus_total(4, RatFunc::poly(ints(F9, {1, 0, 1}) * ints(F9, {1, 0, 1})));
  CHECK(kg.components == 2);
  CHECK(kg.genus_each == 0);
  // Hyperelliptic oracle over F_7: floor((deg-1)/2) for squarefree h.
  auto F7 = FqField::make(7, 1);
  for (int d = 1; d <= 7; ++d) {
    FqPoly h = FqPoly::constant(F7, 1);
    for (int k = 0; k < d; ++k) h = h * ints(F7, {-k, 1});
    CHECK(kummer_genus(2, RatFunc::poly(h)) == (d - 1) / 2);
  }
}

TEST_CASE("semistability check") {
  CHECK(semistable_check({12, 16, 16}, 4).empty());
  auto bad = semistable_check({6, 8, 8}, 4);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].vertex == 0);
  CHECK(bad[0].residue == 2);
}

TEST_CASE("first worked example: Gauss valuations and reductions") {
  auto S = setup({4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3});
  const LocalField& L = *S.cand.L;
  REQUIRE(L.e() == 4);
  const FieldPtr& F = L.residue_field();
  LElem s3 = root_of(L, 2, 3);
  Chart c1{L.zero(), s3, 2};
  Chart c2{s3, L.from_int(3), 4};
  Chart c3{-s3, L.from_int(3), 4};
  auto g1 = gauss_valuation_f(L, S.C.f, c1);
  auto g2 = gauss_valuation_f(L, S.C.f, c2);
  auto g3 = gauss_valuation_f(L, S.C.f, c3);
  CHECK(g1.N == 12);
  CHECK(g2.N == 16);
  CHECK(g3.N == 16);
  // Scaling elements with varpi^4 = 3^3 and 3^4.
  auto f1 = reduce_f(L, g1, root_of(L, 4, 27), 4);
  auto f2 = reduce_f(L, g2, L.from_int(3), 4);
  auto f3 = reduce_f(L, g3, L.from_int(3), 4);
  CHECK(f1 == ints(F, {1, 0, -1, 0, -1, 0, 1}));  // (x^2-1)^2 (x^2+1)
  CHECK(f2 == ints(F, {0, -2, 2}));                // 2x(x-1)
  CHECK(f3 == ints(F, {0, -2, 2}));
  CHECK_THROWS_AS(reduce_f(L, g1, L.from_int(3), 4), Error);
}

TEST_CASE("first worked example: special fiber") {
  auto S = setup({4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3});
  auto Y = special_fiber(S, S.T);
  CHECK(Y.components.size() == 3);
  CHECK(genera(Y) == std::multiset<int>{1, 1, 3});
  CHECK(Y.nodes.size() == 4);
  CHECK(Y.betti == 2);
  CHECK(Y.arithmetic_genus == 7);
  for (const auto& nf : Y.fibers) {
    CHECK(nf.d == 2);
    CHECK(nf.exp_a == 2);
  }
  for (const auto& r : Y.vertices) CHECK(r.N % 4 == 0);
}

TEST_CASE("first worked example over the smaller field is not semistable") {
  SuperellipticCurve C{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3};
  CatalogBounds bounds;
  auto split = splitting_field(radical(C.f), C.p, bounds);
  REQUIRE(split.L->e() == 2);
  auto D = branch_divisor(C, *split.L, split.roots);
  auto T = build_tree(split.L, D);
  std::vector<std::int64_t> N;
  for (int v = 0; v < static_cast<int>(T.vertices.size()); ++v)
    N.push_back(gauss_valuation_f(*split.L, C.f, T.vertices[v].chart).N);
  std::sort(N.begin(), N.end());
  CHECK(N == std::vector<std::int64_t>{6, 8, 8});
  auto bad = semistable_check(N, 4);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].N == 6);
  CHECK_THROWS_AS(reduce_vertex(*split.L, C.f, T, 0, 4), Error);
}

TEST_CASE("second worked example: reductions and special fiber") {
  auto S = setup({3, qpoly_parse("x^4-x^2+1"), 2});
  const LocalField& L = *S.cand.L;
  const FieldPtr& F = L.residue_field();
  Chart c0{L.zero(), L.one(), 0};
  auto g0 = gauss_valuation_f(L, S.C.f, c0);
  CHECK(g0.N == 0);
  CHECK(reduce_f(L, g0, L.one(), 3) == poly_pow(FqPoly(F, {1, 1, 1}), 2));
  auto Y = special_fiber(S, S.T);
  CHECK(Y.components.size() == 3);
  CHECK(genera(Y) == std::multiset<int>{1, 1, 1});
  CHECK(Y.nodes.size() == 2);
  CHECK(Y.betti == 0);
  CHECK(Y.arithmetic_genus == 3);
  for (const auto& nf : Y.fibers) {
    CHECK(nf.exp_a == 2);
    CHECK(nf.d == 1);
  }
}

TEST_CASE("good reduction gives one smooth component") {
  auto S = setup({2, qpoly_parse("x^3+x+1"), 5});
  auto Y = special_fiber(S, S.T);
  CHECK(Y.components.size() == 1);
  CHECK(Y.nodes.empty());
  CHECK(Y.arithmetic_genus == 1);
}

TEST_CASE("unramified node splits into n nodes") {
  // Two pairs of nearby roots at p = 5: each child disc carries degree 2 = n.
  auto S = setup({2, qpoly_parse("x(x-5)(x-1)(x-6)(x-2)"), 5});
  auto Y = special_fiber(S, S.T);
  int split_fibers = 0;
  for (const auto& nf : Y.fibers)
    if (nf.exp_a % 2 == 0) {
      ++split_fibers;
      CHECK(nf.d == 2);
    }
  CHECK(split_fibers == 2);
  CHECK(Y.arithmetic_genus == 2);
}

TEST_CASE("special fiber is chart independent") {
  for (auto C : {SuperellipticCurve{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3},
                 SuperellipticCurve{3, qpoly_parse("x^4-x^2+1"), 2},
                 SuperellipticCurve{2, qpoly_parse("x(x-5)(x-1)(x-6)(x-2)(x-27)"), 5}}) {
    auto S = setup(C);
    auto base = special_fiber(S, S.T);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      MarkedTree P = S.T;
      perturb_charts(P, seed);
      auto Y = special_fiber(S, P);
      CHECK(Y.components.size() == base.components.size());
      CHECK(Y.nodes.size() == base.nodes.size());
      CHECK(genera(Y) == genera(base));
      for (size_t v = 0; v < Y.vertices.size(); ++v) {
        CHECK(Y.vertices[v].N == base.vertices[v].N);
        CHECK(Y.vertices[v].power.n_v == base.vertices[v].power.n_v);
        CHECK(Y.vertices[v].D == base.vertices[v].D);
      }
    }
  }
}
