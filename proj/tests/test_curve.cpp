#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "ssr/curve.hpp"
#include "ssr/errors.hpp"

using namespace ssr;

namespace {

QPoly ints(std::initializer_list<long> c) {
  QPoly r;
  for (long x : c) r.emplace_back(x);
  qpoly_trim(r);
  return r;
}

SuperellipticCurve example_one() { return {4, qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)"), 3}; }
SuperellipticCurve example_two() { return {3, qpoly_parse("x^4-x^2+1"), 2}; }

bool has_clause(const ValidationReport& r, const std::string& clause) {
  for (const auto& v : r.violations)
    if (v.clause == clause) return true;
  return false;
}

}  // namespace

TEST_CASE("polynomial parsing") {
  CHECK(qpoly_parse("x^4 - x^2 + 1") == ints({1, 0, -1, 0, 1}));
  CHECK(qpoly_parse("-6*x") == ints({0, -6}));
  CHECK(qpoly_parse("1/2x^3 + 2") == QPoly{2, 0, 0, mpq_class(1, 2)});
  CHECK(qpoly_parse("(x-1)^2*(x+3)") == ints({3, -5, 1, 1}));
  CHECK(qpoly_parse("(x^2-3)(x^2+3)(x^2-6x-3)") == ints({27, 54, -9, 0, -3, -6, 1}));
  CHECK_THROWS_AS(qpoly_parse("x^"), Error);
  CHECK_THROWS_AS(qpoly_parse("x + y"), Error);
}

TEST_CASE("squarefree decomposition") {
  auto parts = squarefree_decomposition(qpoly_parse("3(x-1)^2(x+1)^3(x^2+1)"));
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].multiplicity == 1);
  CHECK(parts[0].poly == ints({1, 0, 1}));
  CHECK(parts[1].multiplicity == 2);
  CHECK(parts[1].poly == ints({-1, 1}));
  CHECK(parts[2].multiplicity == 3);
  CHECK(parts[2].poly == ints({1, 1}));
  CHECK(radical(qpoly_parse("x^2(x-2)^3")) == ints({0, -2, 1}));

  // Recombination reproduces the monic input.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    QPoly f{1};
    for (int k = 0; k < 4; ++k) {
      QPoly fac{static_cast<long>(rng() % 9) - 4, 1};
      if (rng() % 2) fac = ints({static_cast<long>(rng() % 5) + 1, 0, 1});
      f = qpoly_mul(f, qpoly_pow(fac, 1 + static_cast<int>(rng() % 3)));
    }
    QPoly g{1};
    for (const auto& part : squarefree_decomposition(f)) {
      g = qpoly_mul(g, qpoly_pow(part.poly, part.multiplicity));
      CHECK(qpoly_gcd(part.poly, qpoly_deriv(part.poly)) == ints({1}));
    }
    CHECK(g == qpoly_monic(f));
  }
}

TEST_CASE("validation") {
  CHECK(validate(example_one()).ok());
  CHECK(validate(example_two()).ok());
  auto bad_p = validate({3, qpoly_parse("x^4-x^2+1"), 3});
  CHECK(has_clause(bad_p, "prime-to-p"));
  CHECK(bad_p.violations.size() == 1);
  auto genus0 = validate({2, qpoly_parse("x^2-1"), 5});
  CHECK(has_clause(genus0, "genus"));
  CHECK(has_clause(validate({3, qpoly_parse("(x-1)^3(x^2+5)(x+2)"), 5}), "nth-power"));
  CHECK(has_clause(validate({4, qpoly_parse("(x-1)^2(x+1)^2(x-3)^2"), 5}), "gcd"));
  CHECK(has_clause(validate({1, qpoly_parse("x^5+1"), 5}), "input"));
  CHECK(has_clause(validate({2, qpoly_parse("x^5+1"), 6}), "input"));
}

TEST_CASE("genus") {
  CHECK(genus(example_one()) == 7);
  CHECK(genus(example_two()) == 3);
  CHECK(genus({2, qpoly_parse("x^5+x+1"), 5}) == 2);
  // Hyperelliptic oracle: floor((d-1)/2) for squarefree f of degree d.
  for (int d = 3; d <= 9; ++d) {
    QPoly f{1};
    for (int k = 0; k < d; ++k) f = qpoly_mul(f, ints({-k, 1}));
    CHECK(genus({2, f, 7}) == (d - 1) / 2);
  }
  // Root-by-root Riemann-Hurwitz for products of distinct rational linear factors.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    int roots = 1 + static_cast<int>(rng() % 6);
    QPoly f{1};
    long sum = 0, twice = -2L * n;
    for (int k = 0; k < roots; ++k) {
      int a = 1 + static_cast<int>(rng() % (n - 1));
      f = qpoly_mul(f, qpoly_pow(ints({-k, 1}), a));
      sum += a;
      twice += n - std::gcd(n, a);
    }
    twice += n - std::gcd(static_cast<long>(n), sum);
    CHECK(genus({n, f, 101}) == (twice + 2) / 2);
  }
}

TEST_CASE("integral rescaling") {
  auto m = integral_rescaling({2, QPoly{mpq_class(1, 2), 0, 0, mpq_class(1, 4)}, 5});
  CHECK(m.scale == 2);
  CHECK(m.curve.f == ints({2, 0, 0, 1}));
  auto m3 = integral_rescaling({3, QPoly{mpq_class(1, 12), 1}, 5});
  CHECK(m3.scale == 6);
  CHECK(m3.curve.f == ints({18, 216}));
  auto id = integral_rescaling(example_one());
  CHECK(id.scale == 1);
  CHECK(id.curve.f == example_one().f);
}

TEST_CASE("branch divisors") {
  CatalogBounds bounds;
  {
    auto C = example_one();
    auto split = splitting_field(radical(C.f), C.p, bounds);
    auto D = branch_divisor(C, *split.L, split.roots);
    CHECK(D.points.size() == 6);
    for (const auto& pt : D.points) CHECK(pt.multiplicity == 1);
    CHECK(D.includes_infinity);
    CHECK(D.size() == 7);
  }
  {
    auto C = example_two();
    auto split = splitting_field(radical(C.f), C.p, bounds);
    auto D = branch_divisor(C, *split.L, split.roots);
    CHECK(D.points.size() == 4);
    CHECK(D.includes_infinity);
    CHECK(D.size() == 5);
  }
  {
    SuperellipticCurve C{2, qpoly_parse("x(x-1)(x-2)(x-3)"), 5};
    auto split = splitting_field(radical(C.f), C.p, bounds);
    auto D = branch_divisor(C, *split.L, split.roots);
    CHECK(D.points.size() == 4);
    CHECK_FALSE(D.includes_infinity);
  }
  {
    SuperellipticCurve C{3, qpoly_parse("x^2(x-1)(x-2)(x-3)"), 5};
    auto split = splitting_field(radical(C.f), C.p, bounds);
    auto D = branch_divisor(C, *split.L, split.roots);
    REQUIRE(D.points.size() == 4);
    int twos = 0;
    for (const auto& pt : D.points) twos += pt.multiplicity == 2;
    CHECK(twos == 1);
    CHECK(D.infinity_multiplicity == 5);
    CHECK(D.includes_infinity);
    // A root set that misses a root is rejected.
    std::vector<LElem> partial(split.roots.begin(), split.roots.end() - 1);
    CHECK_THROWS_AS(branch_divisor(C, *split.L, partial), Error);
  }
}
