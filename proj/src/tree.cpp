#include "ssr/tree.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "tree";

// Residue of x as a point of P^1 over the residue field.
ResPoint residue_point(const LocalField& L, const LElem& x) {
  if (x.zero) {
    require(x.val > 0, ErrorKind::PrecisionExhausted, kMod, "reduction of an element with too little precision");
    return Fq{0};
  }
  if (x.val < 0) return std::nullopt;
  return L.residue(x);
}

bool is_zero_diff(const LElem& a, const LElem& b) { return (a - b).zero; }

}  // namespace

LPoint MarkedTree::marked(int i) const {
  if (i == infinity_index()) return std::nullopt;
  return points[i];
}

ResPoint MarkedTree::reduce_point(int v, const LPoint& x) const {
  if (!x) return std::nullopt;
  const Chart& c = vertices[v].chart;
  return residue_point(*L, (*x - c.center) / c.scale);
}

ResPoint MarkedTree::reduce(int v, int i) const { return reduce_point(v, marked(i)); }

int MarkedTree::valence(int v) const {
  int deg = 0;
  for (const auto& e : edges) deg += (e.a == v) + (e.b == v);
  int marked_here = 0;
  for (int p : psi) marked_here += p == v;
  return deg + marked_here;
}

std::vector<ResPoint> phi_map(const LocalField& L, const std::array<LPoint, 3>& t, const std::vector<LPoint>& pts) {
  const LPoint& al = t[0];
  const LPoint& be = t[1];
  const LPoint& ga = t[2];
  std::vector<ResPoint> out;
  for (const LPoint& x : pts) {
    // lambda = (beta - gamma)/(beta - alpha) * (x - alpha)/(x - gamma), with the infinite terms dropped.
    if (x && al && is_zero_diff(*x, *al)) {
      out.push_back(Fq{0});
      continue;
    }
    if ((!x && !al)) {
      out.push_back(Fq{0});
      continue;
    }
    if (x && ga && is_zero_diff(*x, *ga)) {
      out.push_back(std::nullopt);
      continue;
    }
    if (!x && !ga) {
      out.push_back(std::nullopt);
      continue;
    }
    if (!x && !be) {
      out.push_back(Fq{1});
      continue;
    }
    if (x && be && is_zero_diff(*x, *be)) {
      out.push_back(Fq{1});
      continue;
    }
    LElem num = L.one(), den = L.one();
    if (be && ga) num = num * (*be - *ga);
    if (be && al) den = den * (*be - *al);
    if (x && al) num = num * (*x - *al);
    if (x && ga) den = den * (*x - *ga);
    out.push_back(residue_point(L, num / den));
  }
  return out;
}

namespace {

// Partition of indices by equal value, as a canonical label vector.
std::vector<int> partition_labels(const std::vector<ResPoint>& v) {
  std::vector<int> lab(v.size(), -1);
  int next = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (lab[i] >= 0) continue;
    lab[i] = next;
    for (size_t j = i + 1; j < v.size(); ++j)
      if (lab[j] < 0 && v[j] == v[i]) lab[j] = next;
    ++next;
  }
  return lab;
}

}  // namespace

MarkedTree build_tree(const LFieldPtr& Lp, const BranchDivisor& D) {
  const LocalField& L = *Lp;
  MarkedTree T;
  T.L = Lp;
  for (const auto& pt : D.points) {
    T.points.push_back(pt.root);
    T.multiplicity.push_back(pt.multiplicity);
  }
  T.has_infinity = D.includes_infinity;
  const int m = static_cast<int>(T.points.size());
  require(T.marked_count() >= 3, ErrorKind::Internal, kMod, "fewer than three marked points");
  require(m >= 2, ErrorKind::Internal, kMod, "fewer than two finite marked points");

  std::vector<std::vector<std::int64_t>> dist(m, std::vector<std::int64_t>(m, kInfPrec));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) dist[i][j] = dist[j][i] = L.valuation(T.points[i] - T.points[j]);

  // Clusters of size >= 2: {j : v(alpha_i - alpha_j) >= r} for each i and each attained r.
  std::map<std::vector<int>, std::int64_t> clusters;
  for (int i = 0; i < m; ++i) {
    std::set<std::int64_t> radii;
    for (int j = 0; j < m; ++j)
      if (j != i) radii.insert(dist[i][j]);
    for (std::int64_t r : radii) {
      std::vector<int> c;
      for (int j = 0; j < m; ++j)
        if (j == i || dist[i][j] >= r) c.push_back(j);
      std::int64_t rad = kInfPrec;
      for (size_t a = 0; a < c.size(); ++a)
        for (size_t b = a + 1; b < c.size(); ++b) rad = std::min(rad, dist[c[a]][c[b]]);
      clusters.emplace(c, rad);
    }
  }
  std::vector<std::pair<std::vector<int>, std::int64_t>> list(clusters.begin(), clusters.end());
  std::stable_sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
    if (x.first.size() != y.first.size()) return x.first.size() > y.first.size();
    return x.first < y.first;
  });
  auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  // Drop the top cluster when it has only two directions and infinity is not marked.
  {
    const auto& top = list.front().first;
    int directions = 0;
    std::vector<bool> covered(m, false);
    for (size_t k = 1; k < list.size(); ++k) {
      bool maximal = true;
      for (size_t l = 1; l < list.size(); ++l)
        if (l != k && list[l].first.size() > list[k].first.size() && contains(list[l].first, list[k].first))
          maximal = false;
      if (!maximal) continue;
      ++directions;
      for (int i : list[k].first) covered[i] = true;
    }
    for (int i : top) directions += !covered[i];
    if (!T.has_infinity && directions == 2) list.erase(list.begin());
  }

  for (const auto& [c, r] : list) {
    TreeVertex v;
    v.cluster = c;
    v.radius = r;
    v.chart.center = T.points[c.front()];
    v.chart.scale = L.pi_pow(r);
    v.chart.radius = r;
    T.vertices.push_back(v);
  }
  const int nv = static_cast<int>(T.vertices.size());
  for (int w = 0; w < nv; ++w) {
    int best = -1;
    for (int v = 0; v < nv; ++v) {
      if (v == w || T.vertices[v].cluster.size() <= T.vertices[w].cluster.size()) continue;
      if (!contains(T.vertices[v].cluster, T.vertices[w].cluster)) continue;
      if (best < 0 || T.vertices[v].cluster.size() < T.vertices[best].cluster.size()) best = v;
    }
    T.vertices[w].parent = best;
    if (best >= 0) {
      T.vertices[best].children.push_back(w);
      T.edges.push_back({best, w, false});
    }
  }
  std::vector<int> maximal;
  for (int v = 0; v < nv; ++v)
    if (T.vertices[v].parent < 0) maximal.push_back(v);
  require(maximal.size() == 1 || maximal.size() == 2, ErrorKind::Internal, kMod, "unexpected number of maximal discs");
  if (maximal.size() == 2) T.edges.push_back({maximal[0], maximal[1], true});

  // psi: the smallest disc containing the point; points outside every disc go to a maximal vertex.
  T.psi.assign(T.marked_count(), -1);
  for (int i = 0; i < m; ++i) {
    int best = -1;
    for (int v = 0; v < nv; ++v) {
      const auto& c = T.vertices[v].cluster;
      if (!std::binary_search(c.begin(), c.end(), i)) continue;
      if (best < 0 || c.size() < T.vertices[best].cluster.size()) best = v;
    }
    if (best < 0) {
      require(maximal.size() == 1, ErrorKind::Internal, kMod, "isolated marked point with two maximal discs");
      best = maximal[0];
    }
    T.psi[i] = best;
  }
  if (T.has_infinity) {
    require(maximal.size() == 1, ErrorKind::Internal, kMod, "infinity marked but the top disc was dropped");
    T.psi[m] = maximal[0];
  }

  // Tree and stability invariants.
  require(static_cast<int>(T.edges.size()) == nv - 1, ErrorKind::Internal, kMod, "edge count is not |V|-1");
  {
    std::vector<int> comp(nv);
    for (int v = 0; v < nv; ++v) comp[v] = v;
    auto find = [&](int x) {
      while (comp[x] != x) x = comp[x] = comp[comp[x]];
      return x;
    };
    for (const auto& e : T.edges) comp[find(e.a)] = find(e.b);
    for (int v = 0; v < nv; ++v) require(find(v) == find(0), ErrorKind::Internal, kMod, "tree is not connected");
  }
  for (int v = 0; v < nv; ++v)
    require(T.valence(v) >= 3, ErrorKind::Internal, kMod, "vertex of valence below 3");

  // Directions of the marked points at every vertex.
  const int M = T.marked_count();
  std::vector<std::vector<ResPoint>> dirs(nv);
  for (int v = 0; v < nv; ++v)
    for (int i = 0; i < M; ++i) dirs[v].push_back(T.reduce(v, i));

  // Representative triple: lexicographically smallest triple in three distinct directions.
  for (int v = 0; v < nv; ++v) {
    bool found = false;
    for (int a = 0; a < M && !found; ++a)
      for (int b = a + 1; b < M && !found; ++b)
        for (int c = b + 1; c < M && !found; ++c)
          if (dirs[v][a] != dirs[v][b] && dirs[v][a] != dirs[v][c] && dirs[v][b] != dirs[v][c]) {
            T.vertices[v].triple = {a, b, c};
            found = true;
          }
    require(found, ErrorKind::Internal, kMod, "vertex without a separating triple");
  }

  // Cross-check the disc model against the cross-ratio definition: every triple separates at a
  // unique vertex, and phi_t collides exactly the points sharing a direction there.
  std::vector<LPoint> all;
  for (int i = 0; i < M; ++i) all.push_back(T.marked(i));
  std::vector<std::vector<int>> labels(nv);
  for (int v = 0; v < nv; ++v) labels[v] = partition_labels(dirs[v]);
  for (int a = 0; a < M; ++a)
    for (int b = a + 1; b < M; ++b)
      for (int c = b + 1; c < M; ++c) {
        int where = -1;
        for (int v = 0; v < nv; ++v)
          if (dirs[v][a] != dirs[v][b] && dirs[v][a] != dirs[v][c] && dirs[v][b] != dirs[v][c]) {
            require(where < 0, ErrorKind::Internal, kMod, "triple separates at two vertices");
            where = v;
          }
        require(where >= 0, ErrorKind::Internal, kMod, "triple separates nowhere");
        auto phi = phi_map(L, {all[a], all[b], all[c]}, all);
        require(partition_labels(phi) == labels[where], ErrorKind::Internal, kMod,
                "cross-ratio fibers disagree with the disc model");
      }
  for (int i = 0; i < M; ++i)
    for (int v = 0; v < nv; ++v) {
      int same = 0;
      for (int k = 0; k < M; ++k) same += dirs[v][k] == dirs[v][i];
      require((same == 1) == (T.psi[i] == v), ErrorKind::Internal, kMod, "specialization map disagrees with fibers");
    }
  return T;
}

TreeGaloisAction galois_on_tree(const GaloisGroup& G, const MarkedTree& T) {
  const LocalField& L = *T.L;
  const int m = static_cast<int>(T.points.size());
  const int nv = static_cast<int>(T.vertices.size());
  std::int64_t sep = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) sep = std::max(sep, L.valuation(T.points[i] - T.points[j]));
  TreeGaloisAction A;
  A.stabilizer.resize(nv);
  for (int s = 0; s < G.order(); ++s) {
    std::vector<int> pp(T.marked_count());
    for (int i = 0; i < m; ++i) {
      LElem img = G.apply(s, T.points[i]);
      int best = -1;
      std::int64_t bestv = -1;
      for (int k = 0; k < m; ++k) {
        LElem d = img - T.points[k];
        std::int64_t v = d.zero ? d.val : d.val;
        if (v > bestv) {
          bestv = v;
          best = k;
        }
      }
      require(bestv > sep, ErrorKind::Internal, kMod, "Galois image of a marked point is not marked");
      pp[i] = best;
    }
    if (T.has_infinity) pp[m] = m;
    std::vector<int> vp(nv, -1);
    for (int v = 0; v < nv; ++v) {
      std::vector<int> img;
      for (int i : T.vertices[v].cluster) img.push_back(pp[i]);
      std::sort(img.begin(), img.end());
      for (int w = 0; w < nv; ++w)
        if (T.vertices[w].cluster == img) vp[v] = w;
      require(vp[v] >= 0, ErrorKind::Internal, kMod, "Galois image of a disc is not a vertex");
      if (vp[v] == v) A.stabilizer[v].push_back(s);
    }
    // Graph automorphism.
    for (const auto& e : T.edges) {
      bool ok = false;
      for (const auto& f : T.edges)
        ok = ok || (f.a == vp[e.a] && f.b == vp[e.b]) || (f.top && e.top && f.a == vp[e.b] && f.b == vp[e.a]);
      require(ok, ErrorKind::Internal, kMod, "vertex permutation does not preserve edges");
    }
    std::vector<AffineMap> maps(nv);
    for (int v = 0; v < nv; ++v) {
      const Chart& c = T.vertices[v].chart;
      const Chart& d = T.vertices[vp[v]].chart;
      LElem ratio = G.apply(s, c.scale) / d.scale;
      LElem shift = (G.apply(s, c.center) - d.center) / d.scale;
      require(!ratio.zero && ratio.val == 0, ErrorKind::MatrixNotIntegral, kMod, "chart scale ratio is not a unit");
      require(shift.zero ? shift.val > 0 : shift.val >= 0, ErrorKind::MatrixNotIntegral, kMod,
              "chart center shift is not integral");
      maps[v] = {L.residue(ratio), shift.zero ? Fq{0} : L.residue_at(shift, 0), G[s].j};
    }
    A.point_perm.push_back(std::move(pp));
    A.vertex_perm.push_back(std::move(vp));
    A.map.push_back(std::move(maps));
  }
  // Cocycle rule: M_{s t}(v) = M_s(t v) o M_t(v).
  const FqField& F = *L.residue_field();
  for (int s = 0; s < G.order(); ++s)
    for (int t = 0; t < G.order(); ++t) {
      int st = G.compose(s, t);
      for (int v = 0; v < nv; ++v) {
        const AffineMap& mt = A.map[t][v];
        const AffineMap& ms = A.map[s][A.vertex_perm[t][v]];
        const AffineMap& mst = A.map[st][v];
        require(A.vertex_perm[st][v] == A.vertex_perm[s][A.vertex_perm[t][v]], ErrorKind::CocycleInconsistent, kMod,
                "vertex permutations do not compose");
        Fq a = F.mul(ms.a, F.frob(mt.a, ms.j));
        Fq b = F.add(F.mul(ms.a, F.frob(mt.b, ms.j)), ms.b);
        require(a == mst.a && b == mst.b, ErrorKind::CocycleInconsistent, kMod, "reduced chart maps violate the cocycle rule");
      }
    }
  return A;
}

int tame_generator(const GaloisGroup& G, const TreeGaloisAction& action, int v) {
  const FqField& F = *G.field()->residue_field();
  int best = G.identity();
  std::uint64_t best_order = 1;
  for (int s : action.stabilizer[v]) {
    if (G[s].j != 0) continue;
    std::uint64_t o = F.order(G.tame_character(s));
    if (o > best_order) {
      best_order = o;
      best = s;
    }
  }
  return best;
}

std::vector<int> normalize_charts(const GaloisGroup& G, MarkedTree& T, const TreeGaloisAction& action) {
  const LocalField& L = *T.L;
  const FqField& F = *L.residue_field();
  std::vector<int> gens;
  for (int v = 0; v < static_cast<int>(T.vertices.size()); ++v) {
    int t = tame_generator(G, action, v);
    gens.push_back(t);
    const AffineMap& mp = action.map[t][v];
    if (mp.a == 1) continue;
    // Fixed point X0 = b / (1 - a) moves to 0.
    Fq x0 = F.div(mp.b, F.sub(1, mp.a));
    Chart& c = T.vertices[v].chart;
    c.center = c.center + c.scale * L.lift(x0);
  }
  return gens;
}

void perturb_charts(MarkedTree& T, std::uint64_t seed) {
  const LocalField& L = *T.L;
  const FqField& F = *L.residue_field();
  std::mt19937_64 rng(seed);
  for (auto& v : T.vertices) {
    Fq shift = rng() % F.q();
    Fq unit = 1 + rng() % (F.q() - 1);
    Fq tail = rng() % F.q();
    LElem u = L.lift(unit) + L.pi() * L.lift(tail);
    v.chart.center = v.chart.center + v.chart.scale * L.lift(shift);
    v.chart.scale = v.chart.scale * u;
  }
}

}  // namespace ssr
