#include "ssr/lzeta.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "lzeta";

void trim(IntPoly& a) {
  while (a.size() > 1 && a.back() == 0) a.pop_back();
}

// 1 + c T^r.
IntPoly binomial(int r, std::int64_t c) {
  IntPoly b(r + 1, 0);
  b[0] = 1;
  b[r] += c;
  return b;
}

// Exact division by a polynomial with constant term 1.
IntPoly exact_div(IntPoly a, const IntPoly& b) {
  trim(a);
  int db = static_cast<int>(b.size()) - 1;
  if (static_cast<int>(a.size()) - 1 < db) {
    bool zero = std::all_of(a.begin(), a.end(), [](std::int64_t x) { return x == 0; });
    require(zero, ErrorKind::NonIntegralFactor, kMod, "graph factor is not a polynomial");
    return {0};
  }
  IntPoly q(a.size() - db, 0);
  for (size_t i = 0; i < q.size(); ++i) {
    q[i] = a[i];
    for (int k = 0; k <= db; ++k) a[i + k] -= q[i] * b[k];
  }
  for (std::int64_t x : a) require(x == 0, ErrorKind::NonIntegralFactor, kMod, "graph factor is not a polynomial");
  trim(q);
  return q;
}

// Cycles of a permutation with the product of signs along each cycle.
std::vector<std::pair<int, int>> cycles(const std::vector<int>& perm, const std::vector<int>& sign) {
  std::vector<std::pair<int, int>> out;
  std::vector<char> seen(perm.size(), 0);
  for (size_t s = 0; s < perm.size(); ++s) {
    if (seen[s]) continue;
    int len = 0, sg = 1;
    for (int x = static_cast<int>(s); !seen[x]; x = perm[x]) {
      seen[x] = 1;
      ++len;
      if (!sign.empty()) sg *= sign[x];
    }
    out.push_back({len, sg});
  }
  return out;
}

}  // namespace

IntPoly intpoly_mul(const IntPoly& a, const IntPoly& b) {
  IntPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

IntPoly substitute_power(const IntPoly& P, int d) {
  IntPoly r((P.size() - 1) * d + 1, 0);
  for (size_t i = 0; i < P.size(); ++i) r[i * d] = P[i];
  return r;
}

IntPoly graph_h1_charpoly(const GraphQuotient& g) {
  IntPoly num{1, -1};
  for (auto [r, lam] : cycles(g.frob_node, g.frob_sign)) num = intpoly_mul(num, binomial(r, -lam));
  IntPoly q = num;
  for (auto [r, unused] : cycles(g.frob_comp, {})) q = exact_div(q, binomial(r, -1));
  require(static_cast<int>(q.size()) - 1 == g.betti(), ErrorKind::DegreeMismatch, kMod,
          "graph factor degree differs from the first Betti number");
  return q;
}

LFactorResult local_l_factor(const InertialCurve& Z, std::int64_t p) {
  LFactorResult r;
  r.graph_factor = graph_h1_charpoly(Z.graph);
  r.P1 = r.graph_factor;
  for (const auto& c : Z.components) {
    if (c.lfactor.size() > 1)
      require(weil_deviation(c.lfactor, static_cast<double>(p)) < 1e-6, ErrorKind::Internal, kMod,
              "component factor violates the Weil bound");
    r.component_factors.push_back(c.lfactor);
    r.P1 = intpoly_mul(r.P1, c.lfactor);
  }
  require(static_cast<int>(r.P1.size()) - 1 == Z.dim_h1, ErrorKind::DegreeMismatch, kMod,
          "degree of the L-factor differs from the dimension of H^1");
  require(r.P1[0] == 1, ErrorKind::Internal, kMod, "L-factor has constant term other than 1");
  return r;
}

ConductorResult conductor_exponent(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                   const FiberGalois& fg, const SpecialFiberY& Y, int genus_Y, const IntPoly& P1) {
  ConductorResult c;
  c.epsilon = 2 * genus_Y - (static_cast<int>(P1.size()) - 1);
  auto filt = ramification_filtration(G);
  const int g0 = filt.inertia_order();
  std::map<std::vector<int>, int> cache;
  for (int i = 1; i <= filt.jump; ++i) {
    std::vector<int> H = filt.group(i);
    if (H.size() <= 1) {
      c.quotient_genera.push_back(genus_Y);
      continue;
    }
    auto it = cache.find(H);
    if (it == cache.end()) {
      std::vector<YPerm> perms;
      for (int s : H) perms.push_back(y_action(G, T, act, fg, Y, s, 0));
      it = cache.emplace(H, wild_quotient_genus(G, act, fg, Y, perms, H)).first;
    }
    c.quotient_genera.push_back(it->second);
    c.delta += mpq_class(static_cast<long>(H.size()), g0) * (2 * genus_Y - 2 * it->second);
  }
  c.delta.canonicalize();
  require(c.delta.get_den() == 1, ErrorKind::NonIntegralSwan, kMod, "Swan conductor is not an integer");
  c.conductor = c.epsilon + static_cast<int>(c.delta.get_num().get_si());
  const int h = std::max(filt.jump, 0);
  mpq_class bound = mpq_class(2 * genus_Y) * (1 + mpq_class(h * filt.wild_order(), g0));
  require(c.conductor <= bound, ErrorKind::Internal, kMod, "conductor exceeds the trivial bound");
  return c;
}

std::vector<CountCheck> counting_check(const InertialCurve& Z, const IntPoly& P1, std::int64_t p, int max_degree) {
  // Power sums of the reciprocal roots from Newton's identities.
  std::vector<std::int64_t> s(max_degree + 1, 0);
  auto coeff = [&](int k) -> std::int64_t { return k < static_cast<int>(P1.size()) ? P1[k] : 0; };
  for (int i = 1; i <= max_degree; ++i) {
    std::int64_t v = -i * coeff(i);
    for (int k = 1; k < i; ++k) v -= coeff(k) * s[i - k];
    s[i] = v;
  }
  const auto& g = Z.graph;
  std::vector<CountCheck> out;
  for (int i = 1; i <= max_degree; ++i) {
    CountCheck c;
    c.degree = i;
    std::int64_t pi = 1;
    for (int k = 0; k < i; ++k) pi *= p;
    std::int64_t fixed_comps = 0;
    for (size_t o = 0; o < g.frob_comp.size(); ++o) {
      int x = static_cast<int>(o);
      for (int k = 0; k < i; ++k) x = g.frob_comp[x];
      fixed_comps += x == static_cast<int>(o);
    }
    c.predicted = 1 - s[i] + pi * fixed_comps;
    std::int64_t counted = 0;
    for (const auto& dc : Z.components)
      if (i % dc.j0 == 0)
        counted += dc.j0 * static_cast<std::int64_t>(count_kummer_points(dc.nbar, dc.hprime, i / dc.j0));
    for (size_t o = 0; o < g.frob_node.size(); ++o) {
      int x = static_cast<int>(o), sg = 1;
      for (int k = 0; k < i; ++k) {
        sg *= g.frob_sign[x];
        x = g.frob_node[x];
      }
      if (x == static_cast<int>(o)) counted += sg > 0 ? -1 : 1;
    }
    c.counted = counted;
    out.push_back(c);
  }
  return out;
}

}  // namespace ssr
