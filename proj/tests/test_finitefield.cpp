#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "ssr/errors.hpp"
#include "ssr/finitefield.hpp"

using namespace ssr;

namespace {

FqPoly P(const FieldPtr& F, std::vector<std::int64_t> c) { return FqPoly::from_ints(F, c); }

FqPoly random_poly(const FieldPtr& F, int deg, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> d(0, F->q() - 1);
  std::vector<Fq> c(deg + 1);
  for (auto& x : c) x = d(rng);
  if (c.back() == 0) c.back() = 1;
  return FqPoly(F, c);
}

}  // namespace

TEST_CASE("default moduli") {
  CHECK(FqField::make(2, 2)->modulus() == std::vector<std::int64_t>{1, 1, 1});
  CHECK(FqField::make(3, 2)->modulus() == std::vector<std::int64_t>{1, 0, 1});
  CHECK(FqField::make(3, 1)->q() == 3);
  CHECK_THROWS_AS(FqField::make(4, 1), Error);
  CHECK_THROWS_AS(FqField::make(3, 2, std::vector<std::int64_t>{2, 0, 1}), Error);  // x^2-1
  auto F = FqField::make(3, 2);
  Fq i = F->gen();
  CHECK(F->mul(i, i) == F->from_int(-1));
}

TEST_CASE("field axioms on random elements") {
  std::mt19937_64 rng(7);
  for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {2, 5}, {3, 3}, {5, 2}, {7, 1}, {2, 24}, {13, 9}}) {
    auto F = FqField::make(p, k);
    std::uniform_int_distribution<std::uint64_t> d(0, F->q() - 1);
    for (int t = 0; t < 200; ++t) {
      Fq a = d(rng), b = d(rng), c = d(rng);
      CHECK(F->mul(a, F->add(b, c)) == F->add(F->mul(a, b), F->mul(a, c)));
      CHECK(F->add(a, F->neg(a)) == 0);
      if (a) CHECK(F->mul(a, F->inv(a)) == 1);
      CHECK(F->frob(F->add(a, b), 1) == F->add(F->frob(a, 1), F->frob(b, 1)));
      CHECK(F->frob(a, k) == a);
    }
    CHECK(F->order(F->primitive()) == F->q() - 1);
  }
}

TEST_CASE("factor_poly examples") {
  auto F9 = FqField::make(3, 2);
  auto fac = factor_poly(P(F9, {1, 0, 1}));
  REQUIRE(fac.size() == 2);
  std::vector<Fq> brute;
  for (Fq x = 0; x < 9; ++x)
    if (poly_eval(P(F9, {1, 0, 1}), x) == 0) brute.push_back(x);
  CHECK(brute.size() == 2);
  for (auto& [f, e] : fac) {
    CHECK(e == 1);
    CHECK(f.deg() == 1);
    CHECK(std::find(brute.begin(), brute.end(), F9->neg(f.c[0])) != brute.end());
  }

  auto F2 = FqField::make(2, 1);
  auto q = P(F2, {1, 1, 1});
  auto fac2 = factor_poly(q * q);
  REQUIRE(fac2.size() == 1);
  CHECK(fac2[0].first == q);
  CHECK(fac2[0].second == 2);

  auto fac3 = factor_poly(FqPoly::x(F9));
  REQUIRE(fac3.size() == 1);
  CHECK(fac3[0].first == FqPoly::x(F9));
  CHECK_THROWS_AS(factor_poly(FqPoly(F9, {})), Error);
}

TEST_CASE("factor_poly recombines and yields irreducibles") {
  std::mt19937_64 rng(11);
  for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {5, 1}, {7, 1}}) {
    auto F = FqField::make(p, k);
    for (int t = 0; t < 40; ++t) {
      FqPoly g = random_poly(F, 1 + t % 6, rng);
      if (t % 3 == 0) g = g * random_poly(F, 1 + t % 2, rng) * random_poly(F, 1, rng);
      if (t % 5 == 0) g = g * g;
      auto fac = factor_poly(g);
      FqPoly prod = FqPoly::constant(F, g.lc());
      for (auto& [f, e] : fac) {
        CHECK(f.lc() == 1);
        CHECK(oracle::brute_irreducible(f));
        prod = prod * poly_pow(f, static_cast<std::uint64_t>(e));
      }
      CHECK(prod == g);
      for (size_t i = 1; i < fac.size(); ++i) CHECK(poly_lex_less(fac[i - 1].first, fac[i].first));
    }
  }
}

TEST_CASE("power_class examples") {
  auto F9 = FqField::make(3, 2);
  auto x = FqPoly::x(F9);
  auto one = FqPoly::constant(F9, 1);
  auto h1 = poly_pow(x * x - one, 2) * (x * x + one);
  auto pc = power_class(RatFunc::poly(h1), 4);
  CHECK(pc.d_max == 1);
  CHECK(pc.n_v == 4);

  auto pc2 = power_class(RatFunc::poly(x * x), 4);
  CHECK(pc2.d_max == 2);
  CHECK(pc2.n_v == 2);
  REQUIRE(pc2.witness);
  CHECK(rat_pow(*pc2.witness, 2) == RatFunc::poly(x * x));
  CHECK((pc2.witness->num == x || pc2.witness->num == poly_scale(x, F9->from_int(-1))));

  auto F5 = FqField::make(5, 1);
  auto pc3 = power_class(RatFunc::poly(FqPoly::constant(F5, 1)), 3);
  CHECK(pc3.d_max == 3);
  CHECK(pc3.n_v == 1);
}

TEST_CASE("power_class witness on random squares and cubes") {
  std::mt19937_64 rng(3);
  for (auto [p, k] : std::vector<std::pair<int, int>>{{3, 2}, {5, 1}, {7, 1}, {2, 3}}) {
    auto F = FqField::make(p, k);
    for (int t = 0; t < 20; ++t) {
      int n = (p == 3) ? 4 : 6;
      if (n % p == 0) n = 5;
      FqPoly g = random_poly(F, 1 + t % 3, rng);
      RatFunc h = rat_pow(RatFunc::make(g, random_poly(F, t % 2, rng)), n % 2 == 0 ? 2 : 1);
      auto pc = power_class(h, n);
      CHECK(n % pc.d_max == 0);
      if (pc.d_max > 1) {
        REQUIRE(pc.witness);
        CHECK(rat_pow(*pc.witness, pc.d_max) == h);
      }
    }
  }
}

TEST_CASE("count_kummer_points examples") {
  auto F3 = FqField::make(3, 1);
  auto w = FqPoly::x(F3);
  auto h = RatFunc::poly(poly_scale(w * (w - FqPoly::constant(F3, 1)), 2));
  CHECK(count_kummer_points(4, h, 1) == 4);

  auto F2 = FqField::make(2, 1);
  auto q = P(F2, {1, 1, 1});
  CHECK(count_kummer_points(3, RatFunc::poly(q * q), 1) == 3);

  for (int i = 1; i <= 3; ++i) CHECK(count_kummer_points(1, RatFunc::poly(q), i) == (1u << i) + 1);
  CHECK_THROWS_AS(count_kummer_points(2, RatFunc::poly(q), 1), Error);
}

TEST_CASE("count_kummer_points agrees with place enumeration") {
  std::mt19937_64 rng(5);
  int cases = 0;
  for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {5, 1}, {2, 2}, {3, 2}, {7, 1}}) {
    auto F = FqField::make(p, k);
    for (int nbar = 1; nbar <= 6; ++nbar) {
      if (nbar % p == 0) continue;
      for (int i = 1; i <= 3; ++i) {
        std::uint64_t Q = 1;
        for (int j = 0; j < i; ++j) Q *= F->q();
        if (Q > 200) break;
        FqPoly g = random_poly(F, 1 + (nbar + i) % 6, rng);
        if (i == 2) g = g * g;
        RatFunc h = RatFunc::make(g, random_poly(F, (nbar * i) % 3, rng));
        CHECK(count_kummer_points(nbar, h, i) == oracle::count_places(nbar, h, i));
        ++cases;
      }
    }
  }
  CHECK(cases > 40);
}

TEST_CASE("twist invariance of the point count") {
  std::mt19937_64 rng(9);
  auto F = FqField::make(5, 1);
  for (int t = 0; t < 20; ++t) {
    int nbar = 2 + t % 3;
    RatFunc h = RatFunc::poly(random_poly(F, 2 + t % 4, rng));
    RatFunc r = RatFunc::make(random_poly(F, 1 + t % 2, rng), random_poly(F, t % 2, rng));
    RatFunc twisted = h * rat_pow(r, nbar);
    for (int i = 1; i <= 2; ++i) CHECK(count_kummer_points(nbar, h, i) == count_kummer_points(nbar, twisted, i));
  }
}

TEST_CASE("zeta_numerator examples") {
  auto F3 = FqField::make(3, 1);
  auto w = FqPoly::x(F3);
  auto h = RatFunc::poly(poly_scale(w * (w - FqPoly::constant(F3, 1)), 2));
  CHECK(zeta_numerator(4, h, 1) == std::vector<std::int64_t>{1, 0, 3});

  auto F2 = FqField::make(2, 1);
  auto q = P(F2, {1, 1, 1});
  CHECK(zeta_numerator(3, RatFunc::poly(q * q), 1) == std::vector<std::int64_t>{1, 0, 2});

  CHECK(zeta_numerator(2, RatFunc::poly(w * (w + FqPoly::constant(F3, 1))), 0) == std::vector<std::int64_t>{1});
  // A wrong genus is detected.
  CHECK_THROWS_AS(zeta_numerator(4, h, 2), Error);
}

TEST_CASE("zeta_numerator of a split cover") {
  // z^2 = 2 over F_3 splits over F_9 into two lines: H^1 = 0 but two conjugate components.
  auto F3 = FqField::make(3, 1);
  auto h = RatFunc::poly(FqPoly::constant(F3, 2));
  CHECK(count_kummer_points(2, h, 1) == 0);
  CHECK(count_kummer_points(2, h, 2) == 20);
  CHECK(zeta_numerator(2, h, 0) == std::vector<std::int64_t>{1});
  // z^4 = w^2 (w+1)^2 (w-1)^2 ... geometric power index 2: two genus-0 pieces
  auto w = FqPoly::x(F3);
  auto g = w * (w + FqPoly::constant(F3, 1)) * (w - FqPoly::constant(F3, 1));
  CHECK(geometric_power_index(RatFunc::poly(g * g), 4) == 2);
  CHECK(root_orbit_sizes(*F3, 1, 2) == std::vector<int>{1, 1});
  CHECK(root_orbit_sizes(*F3, 2, 2) == std::vector<int>{2});
}

TEST_CASE("zeta numerators satisfy Weil and the functional equation") {
  std::mt19937_64 rng(13);
  for (auto [p, k] : std::vector<std::pair<int, int>>{{5, 1}, {7, 1}, {3, 1}, {2, 2}}) {
    auto F = FqField::make(p, k);
    for (int t = 0; t < 6; ++t) {
      int nbar = p == 3 ? 2 : 3;
      FqPoly g = random_poly(F, 3, rng);
      auto fac = factor_poly(g);
      bool squarefree = true;
      for (auto& [f, e] : fac) squarefree = squarefree && e == 1;
      if (!squarefree) continue;
      // Riemann-Hurwitz for z^nbar = g with g squarefree of degree 3 and gcd(nbar,3) = 1 or 3.
      int ramified = 0;
      for (auto& [f, e] : fac) ramified += f.deg() * (nbar - 1);
      ramified += nbar - std::gcd(nbar, 3);
      int genus = (ramified - 2 * nbar + 2) / 2;
      auto Pz = zeta_numerator(nbar, RatFunc::poly(g), genus);
      CHECK(Pz.size() == static_cast<size_t>(2 * genus + 1));
      CHECK(Pz[0] == 1);
      CHECK(weil_deviation(Pz, static_cast<double>(F->q())) < 1e-6);
    }
  }
}

TEST_CASE("normalize_kummer_equation examples") {
  auto F3 = FqField::make(3, 1);
  auto w = FqPoly::x(F3);
  auto one = FqPoly::constant(F3, 1);
  auto h = RatFunc::make(poly_pow(w - one, 2) * (w + one), w);
  CHECK(normalize_kummer_equation(2, h) == w * (w + one));
  auto g = w * poly_pow(w + one, 2);
  CHECK(normalize_kummer_equation(3, RatFunc::poly(g)) == g);
  CHECK(normalize_kummer_equation(2, RatFunc::poly(poly_pow(w, 4))) == one);
}

TEST_CASE("linear algebra over F_p") {
  FpMatrix m{{1, 2, 3}, {2, 4, 6}};
  auto ker = fp_kernel(m, 7);
  CHECK(ker.size() == 2);
  for (auto& v : ker) CHECK(mod_pos(v[0] + 2 * v[1] + 3 * v[2], 7) == 0);
  auto sol = fp_solve({{1, 1}, {1, 6}}, {3, 1}, 7);
  REQUIRE(sol);
  CHECK(mod_pos((*sol)[0] + (*sol)[1], 7) == 3);
  CHECK(!fp_solve({{1, 1}, {1, 1}}, {0, 1}, 7));
}

TEST_CASE("embeddings are ring maps") {
  auto F4 = FqField::make(2, 2), F16 = FqField::make(2, 4);
  FieldEmbedding e(F4, F16);
  auto brute = oracle::brute_embedding(F4, F16);
  for (Fq a = 0; a < 4; ++a) {
    CHECK(e(a) == brute[a]);
    for (Fq b = 0; b < 4; ++b) CHECK(e(F4->mul(a, b)) == F16->mul(e(a), e(b)));
  }
}
