#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "ssr/errors.hpp"
#include "ssr/io.hpp"

using namespace ssr;

namespace {

FqPoly ints(const FieldPtr& F, std::vector<std::int64_t> c) { return FqPoly::from_ints(F, c); }

const DescendedComponent& component_with_genus(const InertialCurve& Z, int g) {
  for (const auto& c : Z.components)
    if (c.genus.total() == g) return c;
  FAIL("no component of genus " << g);
  return Z.components.front();
}

// Stages of the pipeline without the genus >= 2 input restriction, for genus-one checks.
struct Stages {
  std::shared_ptr<GaloisGroup> G;
  MarkedTree T;
  TreeGaloisAction act;
  SpecialFiberY Y;
  FiberGalois fg;
  InertialCurve Z;
  LFactorResult P;
  ConductorResult cond;
};

Stages run_stages(const SuperellipticCurve& C) {
  CatalogBounds bounds;
  auto split = splitting_field(radical(C.f), C.p, bounds);
  auto cand = next_semistabilizing_field(radical(C.f), C.p, C.n, split.entry, bounds, 0);
  REQUIRE(cand.has_value());
  Stages S;
  S.G = cand->galois;
  S.T = build_tree(cand->L, branch_divisor(C, *cand->L, cand->roots));
  S.act = galois_on_tree(*S.G, S.T);
  normalize_charts(*S.G, S.T, S.act);
  S.act = galois_on_tree(*S.G, S.T);
  const LocalField& L = *cand->L;
  std::vector<VertexReduction> red;
  for (int v = 0; v < static_cast<int>(S.T.vertices.size()); ++v) red.push_back(reduce_vertex(L, C.f, S.T, v, C.n));
  std::vector<NodeFiber> fib;
  for (int e = 0; e < static_cast<int>(S.T.edges.size()); ++e) fib.push_back(node_fiber(L, S.T, e, red, C.n));
  S.Y = assemble_special_fiber(L, red, fib, C.n, genus(C));
  S.fg = fiber_galois(*S.G, S.T, S.act, S.Y);
  S.Z = assemble_inertial_curve(*S.G, S.T, S.act, S.fg, S.Y);
  S.P = local_l_factor(S.Z, C.p);
  S.cond = conductor_exponent(*S.G, S.T, S.act, S.fg, S.Y, genus(C), S.P.P1);
  return S;
}

// Naive count of y^2 = x^3 + a x + b over F_q plus the point at infinity.
std::int64_t naive_weierstrass_count(const FieldPtr& F, std::int64_t a, std::int64_t b) {
  std::int64_t N = 1;
  for (Fq x = 0; x < F->q(); ++x) {
    Fq rhs = F->add(F->add(F->mul(x, F->mul(x, x)), F->mul(F->from_int(a), x)), F->from_int(b));
    for (Fq y = 0; y < F->q(); ++y) N += F->mul(y, y) == rhs;
  }
  return N;
}

GraphQuotient synthetic_graph(std::vector<int> frob_comp, std::vector<int> frob_node, std::vector<int> sign) {
  GraphQuotient g;
  for (size_t i = 0; i < frob_comp.size(); ++i) g.comp_orbits.push_back({static_cast<int>(i)});
  for (size_t i = 0; i < frob_node.size(); ++i) g.node_orbits.push_back({static_cast<int>(i)});
  g.frob_comp = std::move(frob_comp);
  g.frob_node = std::move(frob_node);
  g.frob_sign = std::move(sign);
  return g;
}

}  // namespace

TEST_CASE("wild quotient") {
  auto F4 = FqField::make(2, 2);
  auto w = wild_quotient(FqPoly(F4, {0, 1, 1}), {0, 1});
  CHECK(w.ubar == FqPoly(F4, {0, 1, 1}));
  CHECK(w.gbar == FqPoly(F4, {0, 1}));
  auto F9 = FqField::make(3, 2);
  FqPoly f = ints(F9, {1, 0, -1, 0, -1, 0, 1});
  auto id = wild_quotient(f, {0});
  CHECK(id.ubar == FqPoly::x(F9));
  CHECK(id.gbar == f);
  // x^3 - x + c is invariant under x -> x + 1 over F_3: u = x^3 - x.
  auto t = wild_quotient(ints(F9, {2, -1, 0, 1}) * ints(F9, {2, -1, 0, 1}), {0, 1, 2});
  CHECK(t.ubar == ints(F9, {0, -1, 0, 1}));
  CHECK(t.gbar == ints(F9, {1, 1, 1}));
  CHECK_THROWS_AS(wild_quotient(FqPoly(F4, {0, 1, 0, 1}), {0, 1}), Error);
  CHECK_THROWS_AS(wild_quotient(FqPoly(F4, {0, 1}), {0, 2}), Error);
}

TEST_CASE("graph factor") {
  // Tree: two components, one node, all fixed.
  CHECK(graph_h1_charpoly(synthetic_graph({0, 1}, {0}, {1})) == IntPoly{1});
  // Two fixed components joined by two fixed nodes.
  CHECK(graph_h1_charpoly(synthetic_graph({0, 1}, {0, 1}, {1, 1})) == IntPoly{1, -1});
  // Same with Frobenius exchanging the two nodes.
  CHECK(graph_h1_charpoly(synthetic_graph({0, 1}, {1, 0}, {1, 1})) == IntPoly{1, 1});
  // One node fixed with its branches exchanged.
  CHECK(graph_h1_charpoly(synthetic_graph({0, 1}, {0, 1}, {1, -1})) == IntPoly{1, 1});
  // A 3-cycle of nodes on a single component: H^1 carries the permutation representation.
  CHECK(graph_h1_charpoly(synthetic_graph({0}, {1, 2, 0}, {1, 1, 1})) == IntPoly{1, 0, 0, -1});
  CHECK(substitute_power({1, 3, 4}, 2) == IntPoly{1, 0, 3, 0, 4});
  CHECK(intpoly_mul({1, 1}, {1, 0, 3}) == IntPoly{1, 1, 3, 3});
}

TEST_CASE("first worked example: descent") {
  auto R = run_pipeline({4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3});
  REQUIRE(R.Z.components.size() == 2);
  const auto& z1 = component_with_genus(R.Z, 0);
  const auto& z2 = component_with_genus(R.Z, 1);
  const FieldPtr& F = R.L->residue_field();
  CHECK(z1.orbit.size() == 1);
  CHECK(z1.c == F->from_int(-1));
  CHECK(F->order(z1.gamma) == 4);
  CHECK(z1.m == 2);
  CHECK(z1.mu == 4);
  CHECK(z1.s == 1);
  CHECK(z1.nbar == 2);
  CHECK(z1.hbar == RatFunc::make(ints(F, {-1, 1}) * ints(F, {-1, 1}) * ints(F, {1, 1}), ints(F, {0, 1})));
  CHECK(z1.j0 == 1);
  CHECK(z2.orbit.size() == 2);
  CHECK(z2.j0 == 1);
  CHECK(z2.field->q() == 3);
  CHECK(z2.lfactor == IntPoly{1, 0, 3});
  CHECK(count_kummer_points(z2.nbar, z2.hprime, 1) == 4);
  CHECK(R.lfactor.graph_factor == IntPoly{1, 1});
  CHECK(R.Z.graph.node_orbits.size() == 2);
  CHECK(R.Z.graph.betti() == 1);
  CHECK(R.Z.dim_h1 == 3);
  for (int s : R.Z.graph.frob_sign) CHECK(s == 1);
  CHECK(R.conductor.delta == 0);
  CHECK(R.conductor.epsilon == 11);
}

TEST_CASE("second worked example: descent and Swan term") {
  auto R = run_pipeline({3, qpoly_parse("x^4-x^2+1"), 2});
  REQUIRE(R.Z.components.size() == 2);
  const auto& z0 = component_with_genus(R.Z, 1);
  const auto& z3 = component_with_genus(R.Z, 0);
  CHECK(z0.j0 == 1);
  CHECK(z0.nbar == 3);
  CHECK(z0.m == 1);
  CHECK(z0.mu == 1);
  CHECK(count_kummer_points(z0.nbar, z0.hprime, 1) == 3);
  CHECK(z0.lfactor == IntPoly{1, 0, 2});
  // The small discs: one wild translation by a cube root of unity, then the tame quotient is a line.
  CHECK(z3.orbit.size() == 2);
  CHECK(z3.j0 == 2);
  CHECK(z3.geometric_components() == 2);
  CHECK(z3.genus_zero_quotient);
  REQUIRE(z3.wild.translations.size() == 2);
  const FieldPtr& F = R.L->residue_field();
  Fq zeta = z3.wild.translations[1];
  CHECK(F->order(zeta) == 3);
  CHECK(z3.wild.ubar == FqPoly(F, {0, zeta, 1}));
  CHECK(z3.wild.gbar.deg() == 1);
  CHECK(R.Z.graph.betti() == 0);
  CHECK(R.conductor.epsilon == 4);
  CHECK(R.conductor.delta == 4);
  CHECK(R.conductor.quotient_genera == std::vector<int>{1, 1, 1});
  CHECK(R.filtration.groups.size() == 4);
  for (int i = 1; i <= 3; ++i) CHECK(R.filtration.group(i).size() == 2);
  CHECK(R.filtration.group(4).size() == 1);
}

TEST_CASE("genus-one good reduction against a naive count") {
  SuperellipticCurve C{2, qpoly_parse("x^3+x+1"), 5};
  auto S = run_stages(C);
  auto F5 = FqField::make(5, 1);
  std::int64_t a = 5 + 1 - naive_weierstrass_count(F5, 1, 1);
  CHECK(S.P.P1 == IntPoly{1, -a, 5});
  auto F25 = FqField::make(5, 2);
  CHECK(naive_weierstrass_count(F25, 1, 1) == 25 + 1 - (a * a - 10));
  CHECK(S.cond.conductor == 0);
  CHECK(S.Z.components.size() == 1);
  CHECK(S.Z.graph.node_orbits.empty());
}

TEST_CASE("end-to-end counting check holds") {
  for (auto C : {SuperellipticCurve{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3},
                 SuperellipticCurve{3, qpoly_parse("x^4-x^2+1"), 2},
                 SuperellipticCurve{2, qpoly_parse("x(x-5)(x-1)(x-6)(x-2)(x-27)"), 5},
                 SuperellipticCurve{3, qpoly_parse("x^4+7"), 7}}) {
    auto R = run_pipeline(C);
    REQUIRE(R.counts.size() == 2);
    for (const auto& c : R.counts) CHECK(c.predicted == c.counted);
  }
}

TEST_CASE("results do not depend on charts or scaling elements") {
  for (auto C : {SuperellipticCurve{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3},
                 SuperellipticCurve{3, qpoly_parse("x^4-x^2+1"), 2},
                 SuperellipticCurve{3, qpoly_parse("x^4+7"), 7}}) {
    auto base = run_pipeline(C);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      PipelineOptions opt;
      opt.perturb_seed = seed;
      opt.twist_seed = seed * 7919;
      auto R = run_pipeline(C, opt);
      CHECK(R.lfactor.P1 == base.lfactor.P1);
      CHECK(R.conductor.conductor == base.conductor.conductor);
      CHECK(R.Z.graph.betti() == base.Z.graph.betti());
    }
  }
}

TEST_CASE("JSON report is deterministic and carries the results") {
  SuperellipticCurve C{4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3};
  auto a = json_report(run_pipeline(C)).dump();
  auto b = json_report(run_pipeline(C)).dump();
  CHECK(a == b);
  auto j = nlohmann::json::parse(a);
  CHECK(j["conductor_exponent"] == 11);
  CHECK(j["epsilon"] == 11);
  CHECK(j["P1"] == nlohmann::json::array({1, 1, 3, 3}));
  auto c = parse_curve_json(nlohmann::json::parse(R"js({"n": 4, "p": 3, "f": "(x^2-3)(x^2+3)(x^2-6x-3)"})js"));
  CHECK(c.f == C.f);
  CHECK_THROWS_AS(parse_curve_json(nlohmann::json::parse(R"({"p": 3, "f": [1, 0, 1]})")), Error);
}
