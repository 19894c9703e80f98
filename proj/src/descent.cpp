#include "ssr/descent.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "descent";

// Matrix over F_p of an F_p-linear map on F, columns indexed by the basis t^i.
FpMatrix linear_matrix(const FqField& F, const std::function<Fq(Fq)>& map) {
  int k = F.k();
  FpMatrix M(k, std::vector<std::int64_t>(k, 0));
  for (int i = 0; i < k; ++i) {
    std::vector<std::int64_t> e(k, 0);
    e[i] = 1;
    auto img = F.coeffs(map(F.from_coeffs(e)));
    for (int r = 0; r < k; ++r) M[r][i] = img[r];
  }
  return M;
}

// A nonzero solution of phi(x) = a * x with phi = Frob^j.
Fq twisted_fixed_vector(const FqField& F, Fq a, int j, const char* what) {
  auto ker = fp_kernel(linear_matrix(F, [&](Fq x) { return F.sub(F.frob(x, j), F.mul(a, x)); }), F.p());
  require(!ker.empty(), ErrorKind::NormNotOne, kMod, std::string(what) + " has no Hilbert 90 solution");
  return F.from_coeffs(ker.front());
}

// Solution of phi(x) - x = r.
Fq additive_solution(const FqField& F, Fq r, int j) {
  auto M = linear_matrix(F, [&](Fq x) { return F.sub(F.frob(x, j), x); });
  auto sol = fp_solve(M, F.coeffs(r), F.p());
  require(sol.has_value(), ErrorKind::NormNotOne, kMod, "translation cocycle has nonzero trace");
  return F.from_coeffs(*sol);
}

// Preimage of a phi-fixed element of Fbig under an embedding from Fsmall.
Fq pull_back(const FieldEmbedding& emb, const FqField& Fsmall, const FqField& Fbig, Fq x) {
  int k = Fsmall.k();
  FpMatrix M(Fbig.k(), std::vector<std::int64_t>(k, 0));
  for (int i = 0; i < k; ++i) {
    std::vector<std::int64_t> e(k, 0);
    e[i] = 1;
    auto img = Fbig.coeffs(emb(Fsmall.from_coeffs(e)));
    for (int r = 0; r < Fbig.k(); ++r) M[r][i] = img[r];
  }
  auto sol = fp_solve(M, Fbig.coeffs(x), Fbig.p());
  require(sol.has_value(), ErrorKind::NotInvariant, kMod, "coefficient is not defined over the descended field");
  return Fsmall.from_coeffs(*sol);
}

FqPoly pull_back(const FieldEmbedding& emb, const FieldPtr& Fsmall, const FqField& Fbig, const FqPoly& g) {
  std::vector<Fq> c;
  for (Fq x : g.c) c.push_back(pull_back(emb, *Fsmall, Fbig, x));
  return FqPoly(Fsmall, c);
}

Fq poly_power_unit(const FqField& F, Fq x, std::int64_t e) {
  return e >= 0 ? F.pow(x, static_cast<std::uint64_t>(e)) : F.inv(F.pow(x, static_cast<std::uint64_t>(-e)));
}

int node_index(const SpecialFiberY& Y, int fiber, Fq omega) {
  for (size_t i = 0; i < Y.nodes.size(); ++i)
    if (Y.nodes[i].fiber == fiber && Y.nodes[i].omega == omega) return static_cast<int>(i);
  fail(ErrorKind::GluingAmbiguity, kMod, "Galois image of a node label is not a node");
}

std::vector<Fq> wild_translations(const GaloisGroup& G, const TreeGaloisAction& act, const FiberGalois& fg, int v,
                                  const std::vector<int>& elements) {
  std::set<Fq> B;
  for (int s : elements) {
    if (act.vertex_perm[s][v] != v) continue;
    const AffineMap& mp = act.map[s][v];
    require(G[s].j == 0 && mp.a == 1, ErrorKind::Internal, kMod, "wild element does not act by a translation");
    require(fg.gamma[s][v] == 1, ErrorKind::Internal, kMod, "wild element scales ybar");
    B.insert(mp.b);
  }
  return {B.begin(), B.end()};
}

}  // namespace

FiberGalois fiber_galois(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                         const SpecialFiberY& Y) {
  const LocalField& L = *T.L;
  FiberGalois fg;
  for (int s = 0; s < G.order(); ++s) {
    std::vector<Fq> row;
    for (size_t v = 0; v < Y.vertices.size(); ++v) {
      int w = act.vertex_perm[s][v];
      LElem r = G.apply(s, Y.vertices[v].varpi) / Y.vertices[w].varpi;
      require(!r.zero && r.val == 0, ErrorKind::Internal, kMod, "Galois image of a scaling element is not a unit multiple");
      row.push_back(L.residue(r));
    }
    fg.gamma.push_back(std::move(row));
  }
  return fg;
}

YPerm y_action(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act, const FiberGalois& fg,
               const SpecialFiberY& Y, int sigma, int J) {
  const FqField& E = *Y.E;
  const FieldEmbedding& emb = *Y.emb;
  const int f = T.L->f();
  require(mod_pos(J - G[sigma].j, f) == 0, ErrorKind::Internal, kMod, "Frobenius exponent does not lift the automorphism");
  YPerm P;
  for (const auto& c : Y.components) {
    const VertexReduction& r = Y.vertices[c.vertex];
    const AffineMap& mp = act.map[sigma][c.vertex];
    Fq rho = E.mul(E.mul(E.pow(emb(fg.gamma[sigma][c.vertex]), static_cast<std::uint64_t>(Y.n / r.D)),
                         poly_power_unit(E, emb(mp.a), -r.H.deg())),
                   E.frob(c.rho, J));
    P.comp.push_back(Y.component_index(act.vertex_perm[sigma][c.vertex], rho));
  }
  for (const auto& nd : Y.nodes) {
    const NodeFiber& nf = Y.fibers[nd.fiber];
    int va = act.vertex_perm[sigma][nf.side_a];
    int vb = act.vertex_perm[sigma][nf.side_b];
    int target = -1;
    bool flipped = false;
    for (size_t i = 0; i < Y.fibers.size(); ++i) {
      if (Y.fibers[i].side_a == va && Y.fibers[i].side_b == vb) target = static_cast<int>(i);
      if (Y.fibers[i].side_a == vb && Y.fibers[i].side_b == va) {
        target = static_cast<int>(i);
        flipped = true;
      }
    }
    require(target >= 0, ErrorKind::Internal, kMod, "Galois image of an edge is not an edge");
    const AffineMap& mp = act.map[sigma][nf.side_a];
    Fq lam = E.mul(E.mul(E.pow(emb(fg.gamma[sigma][nf.side_a]), static_cast<std::uint64_t>(Y.n / nf.d)),
                         poly_power_unit(E, emb(mp.a), -nf.exp_a / nf.d)),
                   E.frob(nd.omega, J));
    if (flipped) lam = E.div(lam, emb(Y.fibers[target].ratio));
    P.node.push_back(node_index(Y, target, lam));
    P.flip.push_back(flipped);
  }
  return P;
}

YPerm compose(const YPerm& outer, const YPerm& inner) {
  YPerm r;
  for (int c : inner.comp) r.comp.push_back(outer.comp[c]);
  for (size_t x = 0; x < inner.node.size(); ++x) {
    r.node.push_back(outer.node[inner.node[x]]);
    r.flip.push_back(inner.flip[x] ^ outer.flip[inner.node[x]]);
  }
  return r;
}

void check_equivariance(const SpecialFiberY& Y, const std::vector<YPerm>& perms) {
  for (const auto& P : perms)
    for (size_t x = 0; x < Y.nodes.size(); ++x) {
      const YNode& a = Y.nodes[x];
      const YNode& b = Y.nodes[P.node[x]];
      int ia = P.flip[x] ? b.comp_b : b.comp_a;
      int ib = P.flip[x] ? b.comp_a : b.comp_b;
      require(P.comp[a.comp_a] == ia && P.comp[a.comp_b] == ib, ErrorKind::GluingAmbiguity, kMod,
              "node incidences are not Galois equivariant");
    }
}

WildQuotient wild_quotient(const FqPoly& fbar, const std::vector<Fq>& translations) {
  const FieldPtr& F = fbar.F;
  WildQuotient w;
  w.translations = translations;
  std::sort(w.translations.begin(), w.translations.end());
  std::set<Fq> B(w.translations.begin(), w.translations.end());
  for (Fq a : B)
    for (Fq b : B) require(B.count(F->add(a, b)) > 0, ErrorKind::NotInvariant, kMod, "translations do not form a group");
  w.ubar = FqPoly::constant(F, 1);
  for (Fq b : w.translations) w.ubar = w.ubar * FqPoly(F, {b, 1});
  // Base-ubar expansion with constant digits.
  std::vector<Fq> g;
  FqPoly r = fbar;
  while (!r.is_zero()) {
    auto [q, rem] = poly_divmod(r, w.ubar);
    require(rem.deg() <= 0, ErrorKind::NotInvariant, kMod, "reduced equation is not invariant under the wild translations");
    g.push_back(rem.coeff(0));
    r = q;
  }
  w.gbar = FqPoly(F, g);
  require(poly_compose(w.gbar, w.ubar) == fbar, ErrorKind::NotInvariant, kMod, "wild quotient resubstitution failed");
  return w;
}

DescendedComponent descend_component(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                     const FiberGalois& fg, const SpecialFiberY& Y, int v) {
  const LocalField& L = *T.L;
  const FieldPtr& Fres = L.residue_field();
  const FqField& F = *Fres;
  const int n = Y.n;
  const int f = L.f();
  const VertexReduction& red = Y.vertices[v];
  DescendedComponent dc;
  dc.vertex = v;
  {
    std::set<int> orb;
    for (int s = 0; s < G.order(); ++s) orb.insert(act.vertex_perm[s][v]);
    dc.orbit.assign(orb.begin(), orb.end());
  }
  std::vector<int> inertia_stab, wild;
  int j0 = f;
  for (int s : act.stabilizer[v]) {
    j0 = std::gcd(j0, G[s].j);
    if (G[s].j != 0) continue;
    inertia_stab.push_back(s);
    if (G.tame_character(s) == 1) wild.push_back(s);
  }
  dc.j0 = j0;

  // Wild part.
  dc.wild = wild_quotient(red.fbar, wild_translations(G, act, fg, v, wild));
  const FqPoly& u = dc.wild.ubar;
  const int Bsize = static_cast<int>(dc.wild.translations.size());

  // Tame part.
  const int t = tame_generator(G, act, v);
  dc.tame_element = t;
  {
    const AffineMap& mp = act.map[t][v];
    require(poly_eval(u, F.div(mp.b, mp.a)) == 0, ErrorKind::NoSecondFixedPoint, kMod,
            "tame generator does not fix the chart origin modulo the wild translations");
    dc.c = F.pow(mp.a, static_cast<std::uint64_t>(Bsize));
    dc.gamma = fg.gamma[t][v];
  }
  dc.m = static_cast<int>(F.order(dc.c));
  dc.mu = static_cast<int>(std::lcm<std::uint64_t>(dc.m, F.order(dc.gamma)));
  const int e = dc.mu / dc.m;
  require(n % e == 0, ErrorKind::Internal, kMod, "tame scalar order does not divide n");
  dc.nbar = n / e;
  dc.s = -1;
  Fq target = F.pow(dc.gamma, static_cast<std::uint64_t>(e));
  for (int s = 0; s < dc.m; ++s)
    if (F.pow(dc.c, static_cast<std::uint64_t>(s)) == target) {
      dc.s = s;
      break;
    }
  require(dc.s >= 0, ErrorKind::Internal, kMod, "no exponent relates the tame scalars");
  dc.genus_zero_quotient = dc.nbar == 1;

  // Every inertia element fixing v must fix wbar = ubar^m and zbar = ybar^e ubar^-s.
  for (int s : inertia_stab) {
    const AffineMap& mp = act.map[s][v];
    require(poly_eval(u, F.div(mp.b, mp.a)) == 0, ErrorKind::NotInvariant, kMod, "inertia does not preserve ubar");
    Fq cs = F.pow(mp.a, static_cast<std::uint64_t>(Bsize));
    require(F.pow(cs, static_cast<std::uint64_t>(dc.m)) == 1, ErrorKind::NotInvariant, kMod, "inertia moves wbar");
    require(F.pow(fg.gamma[s][v], static_cast<std::uint64_t>(e)) == F.pow(cs, static_cast<std::uint64_t>(dc.s)),
            ErrorKind::NotInvariant, kMod, "inertia moves zbar");
  }

  // hbar(w) = gbar(u) u^(-s nbar) with w = u^m.
  {
    std::vector<std::pair<std::int64_t, Fq>> terms;
    for (int k = 0; k <= dc.wild.gbar.deg(); ++k) {
      Fq g = dc.wild.gbar.coeff(k);
      if (g == 0) continue;
      std::int64_t ex = k - static_cast<std::int64_t>(dc.s) * dc.nbar;
      require(mod_pos(ex, dc.m) == 0, ErrorKind::NotInvariant, kMod, "equation is not a function of wbar");
      terms.push_back({ex / dc.m, g});
    }
    std::int64_t lo = 0;
    for (auto& [ex, g] : terms) lo = std::min(lo, ex);
    std::vector<Fq> num;
    for (auto& [ex, g] : terms) {
      if (static_cast<std::int64_t>(num.size()) <= ex - lo) num.resize(ex - lo + 1, 0);
      num[ex - lo] = g;
    }
    std::vector<Fq> den(-lo + 1, 0);
    den.back() = 1;
    dc.hbar = RatFunc::make(FqPoly(Fres, num), FqPoly(Fres, den));
  }

  // Frobenius descent along an element tau of the stabilizer with j = j0.
  {
    int tau = -1;
    for (int s : act.stabilizer[v])
      if (G[s].j == j0 % f) {
        tau = s;
        break;
      }
    require(tau >= 0, ErrorKind::Internal, kMod, "no stabilizer element with the residue degree of the vertex");
    const AffineMap& mp = act.map[tau][v];
    const int j = j0 % f;
    Fq A = F.pow(mp.a, static_cast<std::uint64_t>(Bsize));
    Fq Bp = F.mul(A, poly_eval(poly_frob(u, j), F.div(mp.b, mp.a)));
    Fq aw, bw;
    if (dc.m > 1) {
      require(Bp == 0, ErrorKind::NoSecondFixedPoint, kMod, "Frobenius does not fix the tame fixed point");
      aw = F.pow(A, static_cast<std::uint64_t>(dc.m));
      bw = 0;
    } else {
      aw = A;
      bw = Bp;
    }
    Fq q = F.mul(F.pow(fg.gamma[tau][v], static_cast<std::uint64_t>(e)), poly_power_unit(F, A, -dc.s));
    Fq alpha = twisted_fixed_vector(F, aw, j, "coordinate scaling");
    Fq beta = additive_solution(F, F.mul(alpha, bw), j);
    Fq kappa = twisted_fixed_vector(F, q, j, "equation scaling");
    // hbar'(W) = kappa^nbar hbar((W - beta) / alpha).
    FqPoly lin(Fres, {F.neg(F.div(beta, alpha)), F.inv(alpha)});
    FqPoly num = poly_scale(poly_compose(dc.hbar.num, lin), F.pow(kappa, static_cast<std::uint64_t>(dc.nbar)));
    FqPoly den = poly_compose(dc.hbar.den, lin);
    RatFunc h = RatFunc::make(num, den);
    for (const FqPoly* P : {&h.num, &h.den})
      for (Fq c : P->c)
        require(F.frob(c, j) == c, ErrorKind::NotInvariant, kMod, "descended equation is not Frobenius invariant");
    if (j0 == f) {
      dc.field = Fres;
      dc.hprime = h;
    } else {
      dc.field = FqField::make(F.p(), j0);
      FieldEmbedding emb(dc.field, Fres);
      dc.hprime = RatFunc::make(pull_back(emb, dc.field, F, h.num), pull_back(emb, dc.field, F, h.den));
    }
  }

  dc.genus = kummer_genus_total(dc.nbar, dc.hprime);
  // Cross-check the geometric component count against inertia orbits of the labels above v.
  {
    std::vector<int> comps;
    for (size_t c = 0; c < Y.components.size(); ++c)
      if (Y.components[c].vertex == v) comps.push_back(static_cast<int>(c));
    std::vector<YPerm> perms;
    for (int s : inertia_stab) perms.push_back(y_action(G, T, act, fg, Y, s, 0));
    std::set<int> reps;
    for (int c : comps) {
      int r = c;
      for (const auto& P : perms) r = std::min(r, P.comp[c]);
      reps.insert(r);
    }
    // The stabilizer of v in inertia is a group, so the minimum over its images is an orbit invariant.
    require(static_cast<int>(reps.size()) == dc.genus.components, ErrorKind::GenusMismatch, kMod,
            "components of the quotient do not match inertia orbits of labels");
  }

  const int g = dc.genus.total();
  if (g == 0) {
    dc.lfactor = {1};
  } else {
    auto P = zeta_numerator(dc.nbar, dc.hprime, g);
    dc.lfactor.assign(static_cast<size_t>(P.size() - 1) * j0 + 1, 0);
    for (size_t i = 0; i < P.size(); ++i) dc.lfactor[i * j0] = P[i];
  }
  return dc;
}

GraphQuotient graph_quotient(const SpecialFiberY& Y, const std::vector<YPerm>& group, const YPerm* frob) {
  GraphQuotient gq;
  const int nc = static_cast<int>(Y.components.size());
  const int nn = static_cast<int>(Y.nodes.size());
  std::vector<int> comp_orbit(nc, -1);
  for (int c = 0; c < nc; ++c) {
    if (comp_orbit[c] >= 0) continue;
    std::set<int> orb;
    for (const auto& P : group) orb.insert(P.comp[c]);
    orb.insert(c);
    for (int x : orb) comp_orbit[x] = static_cast<int>(gq.comp_orbits.size());
    gq.comp_orbits.emplace_back(orb.begin(), orb.end());
  }
  // Node orbits with the orientation of each member relative to the representative.
  std::vector<int> node_orbit(nn, -1), rel(nn, 0);
  for (int x = 0; x < nn; ++x) {
    if (node_orbit[x] != -1) continue;
    std::map<int, int> orient;
    bool inverted = false;
    for (const auto& P : group) {
      int y = P.node[x];
      int o = P.flip[x];
      auto it = orient.find(y);
      if (it == orient.end())
        orient[y] = o;
      else if (it->second != o)
        inverted = true;
    }
    orient.emplace(x, 0);
    if (inverted) {
      ++gq.inverted_node_orbits;
      for (auto& [y, o] : orient) node_orbit[y] = -2;
      continue;
    }
    std::vector<int> members;
    for (auto& [y, o] : orient) {
      node_orbit[y] = static_cast<int>(gq.node_orbits.size());
      rel[y] = o;
      members.push_back(y);
    }
    gq.node_orbits.push_back(members);
  }
  if (frob) {
    for (const auto& orb : gq.comp_orbits) gq.frob_comp.push_back(comp_orbit[frob->comp[orb.front()]]);
    for (const auto& orb : gq.node_orbits) {
      int x = orb.front();
      int y = frob->node[x];
      require(node_orbit[y] >= 0, ErrorKind::Internal, kMod, "Frobenius maps a node orbit to an inverted one");
      gq.frob_node.push_back(node_orbit[y]);
      // x is the representative of its orbit, so rel[x] = 0.
      gq.frob_sign.push_back((frob->flip[x] ^ rel[y]) ? -1 : 1);
    }
  }
  return gq;
}

InertialCurve assemble_inertial_curve(const GaloisGroup& G, const MarkedTree& T, const TreeGaloisAction& act,
                                      const FiberGalois& fg, const SpecialFiberY& Y) {
  InertialCurve Z;
  std::vector<YPerm> all, inertia;
  for (int s = 0; s < G.order(); ++s) all.push_back(y_action(G, T, act, fg, Y, s, G[s].j));
  check_equivariance(Y, all);
  for (int s : G.inertia()) inertia.push_back(y_action(G, T, act, fg, Y, s, 0));
  YPerm F = y_action(G, T, act, fg, Y, G.frobenius(), 1);
  check_equivariance(Y, inertia);
  check_equivariance(Y, {F});
  Z.graph = graph_quotient(Y, inertia, &F);

  std::vector<char> seen(Y.vertices.size(), 0);
  int geometric = 0;
  for (size_t v = 0; v < Y.vertices.size(); ++v) {
    if (seen[v]) continue;
    auto dc = descend_component(G, T, act, fg, Y, static_cast<int>(v));
    for (int w : dc.orbit) seen[w] = 1;
    geometric += dc.geometric_components();
    Z.dim_h1 += 2 * dc.j0 * dc.genus.total();
    Z.components.push_back(std::move(dc));
  }
  require(geometric == static_cast<int>(Z.graph.comp_orbits.size()), ErrorKind::GenusMismatch, kMod,
          "descended components do not match the inertia orbits of components");
  Z.dim_h1 += Z.graph.betti();
  return Z;
}

int wild_quotient_genus(const GaloisGroup& G, const TreeGaloisAction& act, const FiberGalois& fg,
                        const SpecialFiberY& Y, const std::vector<YPerm>& H_perms, const std::vector<int>& H) {
  int total = 0;
  std::vector<char> seen(Y.vertices.size(), 0);
  for (size_t v = 0; v < Y.vertices.size(); ++v) {
    if (seen[v]) continue;
    for (int s : H) seen[act.vertex_perm[s][v]] = 1;
    auto w = wild_quotient(Y.vertices[v].fbar, wild_translations(G, act, fg, static_cast<int>(v), H));
    total += kummer_genus_total(Y.n, RatFunc::poly(w.gbar)).total();
  }
  return total + graph_quotient(Y, H_perms, nullptr).betti();
}

}  // namespace ssr
