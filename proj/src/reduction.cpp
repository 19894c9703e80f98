#include "ssr/reduction.hpp"

#include <algorithm>
#include <numeric>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "reduction";

// Residue of an element known to be integral; inexact zeros must be known past precision 0.
Fq integral_residue(const LocalField& L, const LElem& x, const char* what) {
  if (x.zero) {
    require(x.val > 0, ErrorKind::PrecisionExhausted, kMod, std::string("precision exhausted reducing ") + what);
    return 0;
  }
  require(x.val >= 0, ErrorKind::Internal, kMod, std::string("non-integral ") + what);
  return x.val > 0 ? Fq{0} : L.residue(x);
}

// Unit residue of x; fails if x is not a unit.
Fq unit_residue(const LocalField& L, const LElem& x, const char* what) {
  require(!x.zero && x.val == 0, ErrorKind::GluingAmbiguity, kMod, std::string(what) + " is not a unit");
  return L.residue(x);
}

// Order of vanishing of g at xi and the value of g/(x-xi)^ord there.
std::pair<int, Fq> order_at(const FqPoly& g, Fq xi) {
  const FqField& F = *g.F;
  FqPoly lin(g.F, {F.neg(xi), 1});
  FqPoly r = g;
  int a = 0;
  while (poly_eval(r, xi) == 0) {
    r = r / lin;
    ++a;
  }
  return {a, poly_eval(r, xi)};
}

// Genus from Riemann-Hurwitz for z^nc = h with the given signed factorization (exponents already divided).
int rh_genus(int nc, const SignedFactorization& sf) {
  if (nc == 1) return 0;
  std::int64_t twice = -2LL * nc;
  std::int64_t ainf = 0;
  for (const auto& [P, a] : sf.factors) {
    ainf -= static_cast<std::int64_t>(a) * P.deg();
    if (a % nc) twice += static_cast<std::int64_t>(P.deg()) * (nc - std::gcd(nc, std::abs(a)));
  }
  if (ainf % nc) twice += nc - std::gcd<std::int64_t>(nc, std::abs(ainf));
  require(twice % 2 == 0 && twice >= -2, ErrorKind::Internal, kMod, "Riemann-Hurwitz gives an invalid genus");
  return static_cast<int>(twice / 2 + 1);
}

}  // namespace

GaussData gauss_valuation_f(const LocalField& L, const QPoly& f, const Chart& chart) {
  require(!f.empty(), ErrorKind::ZeroPolynomial, kMod, "Gauss valuation of the zero polynomial");
  GaussData g;
  g.coeffs = lpoly_shift_scale(lpoly_from_rational(L, f), chart.center, chart.scale);
  std::int64_t N = kInfPrec;
  for (const auto& b : g.coeffs)
    if (!b.zero) N = std::min(N, b.val);
  require(N < kInfPrec, ErrorKind::PrecisionExhausted, kMod, "every coefficient of f on the chart is an inexact zero");
  for (const auto& b : g.coeffs)
    if (b.zero)
      require(b.val > N, ErrorKind::PrecisionExhausted, kMod, "a coefficient of f on the chart has too little precision");
  g.N = N;
  return g;
}

FqPoly reduce_f(const LocalField& L, const GaussData& g, const LElem& varpi, int n) {
  LElem u = L.pow(varpi, n);
  require(!u.zero && u.val == g.N, ErrorKind::NotDivisible, kMod, "scaling element does not match N_v");
  LElem ui = L.inv(u);
  std::vector<Fq> c;
  for (const auto& b : g.coeffs) c.push_back(integral_residue(L, b * ui, "a coefficient of f"));
  FqPoly r(L.residue_field(), std::move(c));
  require(!r.is_zero(), ErrorKind::Internal, kMod, "reduction of f vanishes");
  return r;
}

std::vector<SemistableFailure> semistable_check(const std::vector<std::int64_t>& N, int n) {
  std::vector<SemistableFailure> out;
  for (size_t v = 0; v < N.size(); ++v)
    if (N[v] % n) out.push_back({static_cast<int>(v), N[v], mod_pos(N[v], n)});
  return out;
}

int kummer_genus(int nc, const RatFunc& h) {
  require(!h.is_zero(), ErrorKind::ZeroFunction, kMod, "Kummer genus of the zero function");
  SignedFactorization sf = signed_factor(h);
  if (sf.factors.empty()) return 0;
  require(geometric_power_index(h, nc) == 1, ErrorKind::IsProperPower, kMod,
          "Kummer cover is reducible over an algebraic closure");
  return rh_genus(nc, sf);
}

KummerGenus kummer_genus_total(int nbar, const RatFunc& h) {
  require(!h.is_zero(), ErrorKind::ZeroFunction, kMod, "Kummer genus of the zero function");
  SignedFactorization sf = signed_factor(h);
  KummerGenus out;
  out.components = geometric_power_index(h, nbar);
  for (auto& [P, a] : sf.factors) a /= out.components;
  out.genus_each = rh_genus(nbar / out.components, sf);
  return out;
}

VertexReduction reduce_vertex(const LocalField& L, const QPoly& f, const MarkedTree& T, int v, int n,
                              const std::optional<LElem>& twist) {
  VertexReduction r;
  r.vertex = v;
  GaussData g = gauss_valuation_f(L, f, T.vertices[v].chart);
  r.N = g.N;
  require(g.N % n == 0, ErrorKind::NotDivisible, kMod,
          "n does not divide N_v = " + std::to_string(g.N) + " at vertex " + std::to_string(v));
  r.varpi = L.pi_pow(g.N / n);
  if (twist) {
    require(!twist->zero && twist->val == 0, ErrorKind::Internal, kMod, "twist of the scaling element is not a unit");
    r.varpi = r.varpi * *twist;
  }
  r.fbar = reduce_f(L, g, r.varpi, n);
  RatFunc h = RatFunc::poly(r.fbar);
  r.power = power_class(h, n);
  r.D = geometric_power_index(h, n);
  r.lc = r.fbar.lc();
  r.H = FqPoly::constant(L.residue_field(), 1);
  for (const auto& [P, a] : signed_factor(h).factors) r.H = r.H * poly_pow(P, static_cast<std::uint64_t>(a / r.D));
  r.genus = kummer_genus(n / r.D, RatFunc::poly(r.H));
  return r;
}

NodeFiber node_fiber(const LocalField& L, const MarkedTree& T, int edge, const std::vector<VertexReduction>& red,
                     int n) {
  const TreeEdge& e = T.edges[edge];
  const VertexReduction& A = red[e.a];
  const VertexReduction& B = red[e.b];
  const Chart& ca = T.vertices[e.a].chart;
  const Chart& cb = T.vertices[e.b].chart;
  NodeFiber nf;
  nf.edge = edge;
  nf.side_a = e.a;
  nf.side_b = e.b;
  nf.pos_b = std::nullopt;
  nf.ord_b = -B.fbar.deg();
  nf.exp_b = B.fbar.deg();
  LElem R;
  if (!e.top) {
    nf.pos_a = T.reduce_point(e.a, cb.center);
    require(nf.pos_a.has_value(), ErrorKind::Internal, kMod, "child disc reduces to infinity on the parent chart");
    auto [ord, u0] = order_at(A.fbar, *nf.pos_a);
    nf.ord_a = ord;
    nf.exp_a = ord;
    nf.u0 = u0;
    nf.h0_a = order_at(A.H, *nf.pos_a).second;
  } else {
    nf.pos_a = std::nullopt;
    nf.ord_a = -A.fbar.deg();
    nf.exp_a = A.fbar.deg();
    nf.u0 = A.lc;
    nf.h0_a = 1;
  }
  require(mod_pos(nf.ord_a + nf.ord_b, n) == 0, ErrorKind::AdmissibilityViolation, kMod,
          "vanishing orders on the two sides of an edge do not cancel modulo n");
  if (!e.top)
    require(nf.exp_a == nf.exp_b, ErrorKind::AdmissibilityViolation, kMod,
            "vanishing order at the node differs from the degree on the child chart");
  nf.d = std::gcd(n, nf.exp_a);
  require(nf.d == std::gcd(n, nf.exp_b), ErrorKind::AdmissibilityViolation, kMod, "label set sizes differ");
  const int d = nf.d;
  if (!e.top) {
    // omega_b / omega_a = (varpi_a / varpi_b)^(n/d) (s_b / s_a)^(a/d).
    R = L.pow(A.varpi / B.varpi, n / d) * L.pow(cb.scale / ca.scale, nf.exp_a / d);
  } else {
    // Label ratio across the annulus joining two maximal discs through the infinity side.
    LElem diff = ca.center - cb.center;
    LElem R1 = L.pow(diff, nf.exp_b / d) * L.pow(ca.scale, nf.exp_a / d) * L.inv(L.pow(A.varpi, n / d));
    LElem R2 = L.pow(-diff, nf.exp_a / d) * L.pow(cb.scale, nf.exp_b / d) * L.inv(L.pow(B.varpi, n / d));
    R = R2 / R1;
  }
  nf.ratio = unit_residue(L, R, "cross-side label ratio");
  const FqField& F = *L.residue_field();
  require(F.mul(F.pow(nf.ratio, static_cast<std::uint64_t>(d)), nf.u0) == B.lc, ErrorKind::GluingAmbiguity, kMod,
          "labels on the two sides of an edge are not compatible");
  return nf;
}

int SpecialFiberY::component_index(int v, Fq rho) const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i].vertex == v && components[i].rho == rho) return static_cast<int>(i);
  fail(ErrorKind::GluingAmbiguity, kMod, "node label does not match a component above vertex " + std::to_string(v));
}

SpecialFiberY assemble_special_fiber(const LocalField& L, std::vector<VertexReduction> red,
                                     std::vector<NodeFiber> fibers, int n, int genus_Y) {
  SpecialFiberY Y;
  Y.n = n;
  Y.Fres = L.residue_field();
  const FqField& F = *Y.Fres;
  int K = 1;
  for (const auto& r : red)
    for (int s : root_orbit_sizes(F, r.lc, r.D)) K = std::lcm(K, s);
  for (const auto& nf : fibers)
    for (int s : root_orbit_sizes(F, nf.u0, nf.d)) K = std::lcm(K, s);
  Y.E = K == 1 ? Y.Fres : FqField::make(F.p(), F.k() * K);
  Y.emb = std::make_shared<FieldEmbedding>(Y.Fres, Y.E);
  const FqField& E = *Y.E;
  const FieldEmbedding& emb = *Y.emb;

  auto roots_of = [&](Fq u, int d) {
    std::vector<Fq> c(d + 1, 0);
    c[0] = E.neg(emb(u));
    c[d] = 1;
    auto rs = poly_roots(FqPoly(Y.E, c));
    require(static_cast<int>(rs.size()) == d, ErrorKind::Internal, kMod, "label field lacks some d-th roots");
    return rs;
  };

  for (const auto& r : red)
    for (Fq rho : roots_of(r.lc, r.D)) Y.components.push_back({r.vertex, rho});
  for (size_t i = 0; i < fibers.size(); ++i) {
    const NodeFiber& nf = fibers[i];
    const VertexReduction& A = red[nf.side_a];
    const VertexReduction& B = red[nf.side_b];
    Fq h0 = emb(nf.h0_a);
    Fq ratio = emb(nf.ratio);
    for (Fq w : roots_of(nf.u0, nf.d)) {
      YNode node;
      node.fiber = static_cast<int>(i);
      node.omega = w;
      node.comp_a = Y.component_index(nf.side_a, E.div(E.pow(w, static_cast<std::uint64_t>(nf.d / A.D)), h0));
      node.comp_b = Y.component_index(nf.side_b, E.pow(E.mul(ratio, w), static_cast<std::uint64_t>(nf.d / B.D)));
      Y.nodes.push_back(node);
    }
  }
  // Connectedness of the dual graph.
  std::vector<int> parent(Y.components.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& nd : Y.nodes) parent[find(nd.comp_a)] = find(nd.comp_b);
  int classes = 0;
  for (size_t i = 0; i < parent.size(); ++i) classes += find(static_cast<int>(i)) == static_cast<int>(i);
  require(classes == 1, ErrorKind::GenusMismatch, kMod, "special fiber is not connected");

  Y.betti = static_cast<int>(Y.nodes.size()) - static_cast<int>(Y.components.size()) + 1;
  int sum = 0;
  for (const auto& r : red) sum += r.D * r.genus;
  Y.arithmetic_genus = sum + Y.betti;
  require(Y.arithmetic_genus == genus_Y, ErrorKind::GenusMismatch, kMod,
          "arithmetic genus " + std::to_string(Y.arithmetic_genus) + " of the special fiber differs from genus " +
              std::to_string(genus_Y));
  Y.vertices = std::move(red);
  Y.fibers = std::move(fibers);
  return Y;
}

}  // namespace ssr
