#include "ssr/io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "io";

using ojson = nlohmann::ordered_json;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Validation, kMod, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Validation, kMod, path + ": " + e.what());
  }
}

mpq_class json_rational(const nlohmann::json& v) {
  if (v.is_number_integer()) return mpq_class(mpz_class(std::to_string(v.get<long long>())));
  if (v.is_string()) {
    mpq_class q(v.get<std::string>());
    q.canonicalize();
    return q;
  }
  fail(ErrorKind::Validation, kMod, "coefficient must be an integer or a rational string");
}

std::string ratio_string(std::int64_t num, std::int64_t den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q.get_str();
}

std::string respoint_string(const FqField& F, const ResPoint& x) { return x ? F.to_string(*x) : "inf"; }

ojson poly_json(const FqPoly& g) {
  ojson a = ojson::array();
  for (Fq c : g.c) a.push_back(g.F->to_string(c));
  return a;
}

ojson ratfunc_json(const RatFunc& h) { return ojson{{"num", poly_json(h.num)}, {"den", poly_json(h.den)}}; }

std::string field_string(const FqField& F) {
  std::string s = "F_" + std::to_string(F.q());
  if (F.k() > 1) {
    s += " = F_" + std::to_string(F.p()) + "[t]/(";
    std::ostringstream m;
    bool first = true;
    for (int i = F.k(); i >= 0; --i) {
      std::int64_t c = F.modulus()[i];
      if (c == 0) continue;
      if (!first) m << " + ";
      first = false;
      if (i == 0 || c != 1) m << c << (i > 0 ? "*" : "");
      if (i > 0) m << "t" << (i > 1 ? "^" + std::to_string(i) : "");
    }
    s += m.str() + ")";
  }
  return s;
}

}  // namespace

std::string intpoly_to_string(const IntPoly& P, const std::string& var) {
  std::ostringstream o;
  bool first = true;
  for (size_t i = 0; i < P.size(); ++i) {
    std::int64_t c = P[i];
    if (c == 0) continue;
    if (!first) o << (c < 0 ? " - " : " + ");
    else if (c < 0) o << "-";
    first = false;
    std::int64_t a = c < 0 ? -c : c;
    if (i == 0 || a != 1) o << a;
    if (i > 0) o << var << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return first ? "0" : o.str();
}

SuperellipticCurve parse_curve_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::Validation, kMod, "curve input must be a JSON object");
  for (const char* key : {"n", "f", "p"})
    require(j.contains(key), ErrorKind::Validation, kMod, std::string("curve input lacks \"") + key + "\"");
  require(j["n"].is_number_integer() && j["p"].is_number_integer(), ErrorKind::Validation, kMod,
          "n and p must be integers");
  SuperellipticCurve C;
  C.n = j["n"].get<int>();
  C.p = j["p"].get<std::int64_t>();
  const auto& f = j["f"];
  if (f.is_string()) {
    C.f = qpoly_parse(f.get<std::string>());
  } else if (f.is_array() && !f.empty() && f[0].is_array()) {
    C.f = QPoly{1};
    for (const auto& fac : f) {
      require(fac.is_array() && fac.size() == 2 && fac[0].is_string() && fac[1].is_number_integer(),
              ErrorKind::Validation, kMod, "factored form must list [\"poly\", exponent] pairs");
      int e = fac[1].get<int>();
      require(e >= 1, ErrorKind::Validation, kMod, "factor exponents must be positive");
      C.f = qpoly_mul(C.f, qpoly_pow(qpoly_parse(fac[0].get<std::string>()), e));
    }
  } else if (f.is_array()) {
    for (const auto& c : f) C.f.push_back(json_rational(c));
    qpoly_trim(C.f);
  } else {
    fail(ErrorKind::Validation, kMod, "f must be a coefficient list, a string or a factored list");
  }
  return C;
}

SuperellipticCurve load_curve(const std::string& path) { return parse_curve_json(read_json(path)); }

FieldTower parse_tower_json(const nlohmann::json& j) {
  FieldTower T;
  try {
    T.f = j.at("f").get<int>();
    if (j.contains("residue_modulus")) T.residue_modulus = j["residue_modulus"].get<std::vector<std::int64_t>>();
    for (const auto& step : j.at("steps")) {
      TowerStep s;
      for (const auto& coeff : step) {
        std::vector<std::vector<mpz_class>> digits;
        for (const auto& digit : coeff) {
          std::vector<mpz_class> w;
          for (const auto& x : digit) w.emplace_back(std::to_string(x.get<long long>()));
          digits.push_back(std::move(w));
        }
        s.coeffs.push_back(std::move(digits));
      }
      T.steps.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Validation, kMod, std::string("malformed field tower: ") + e.what());
  }
  return T;
}

FieldTower load_tower(const std::string& path) { return parse_tower_json(read_json(path)); }

ojson json_report(const PipelineResult& R) {
  const LocalField& L = *R.L;
  const FqField& F = *L.residue_field();
  const int e = L.e();
  ojson out;
  out["p"] = R.input.p;
  out["n"] = R.input.n;
  out["f"] = qpoly_to_string(R.input.f);
  out["genus"] = R.genus;
  out["P1"] = R.lfactor.P1;
  out["epsilon"] = R.conductor.epsilon;
  out["delta"] = R.conductor.delta.get_num().get_si();
  out["conductor_exponent"] = R.conductor.conductor;
  out["dimH1"] = R.Z.dim_h1;

  ojson rep;
  ojson field;
  field["description"] = R.field;
  field["e"] = e;
  field["f"] = L.f();
  field["residue_field"] = field_string(F);
  field["integral_scale"] = R.model.scale.get_str();
  ojson rejected = ojson::array();
  for (const auto& r : R.rejected) {
    ojson fails = ojson::array();
    for (const auto& s : r.failures) fails.push_back({{"vertex", s.vertex}, {"N", s.N}, {"N_mod_n", s.residue}});
    rejected.push_back({{"field", r.field}, {"failures", fails}});
  }
  field["rejected"] = rejected;
  rep["field"] = field;

  ojson filt = ojson::array();
  for (size_t i = 0; i < R.filtration.groups.size(); ++i)
    filt.push_back({{"i", i}, {"order", R.filtration.groups[i].size()}});
  rep["filtration"] = {{"groups", filt}, {"jump", R.filtration.jump}};

  ojson verts = ojson::array();
  for (size_t v = 0; v < R.tree.vertices.size(); ++v) {
    const auto& tv = R.tree.vertices[v];
    const auto& vr = R.Y.vertices[v];
    verts.push_back({{"vertex", v},
                     {"cluster", tv.cluster},
                     {"parent", tv.parent},
                     {"radius", ratio_string(tv.radius, e)},
                     {"N", vr.N},
                     {"eta", ratio_string(vr.N, e)},
                     {"fbar", poly_json(vr.fbar)},
                     {"n_v", vr.power.n_v},
                     {"components", vr.D},
                     {"genus", vr.genus}});
  }
  ojson edges = ojson::array();
  for (const auto& nf : R.Y.fibers)
    edges.push_back({{"a", nf.side_a},
                     {"b", nf.side_b},
                     {"top", R.tree.edges[nf.edge].top},
                     {"position_a", respoint_string(F, nf.pos_a)},
                     {"order_a", nf.ord_a},
                     {"order_b", nf.ord_b},
                     {"nodes", nf.d}});
  rep["reduction"] = {{"vertices", verts},
                      {"edges", edges},
                      {"label_field", field_string(*R.Y.E)},
                      {"components", R.Y.components.size()},
                      {"nodes", R.Y.nodes.size()},
                      {"betti", R.Y.betti},
                      {"arithmetic_genus", R.Y.arithmetic_genus}};

  ojson comps = ojson::array();
  for (size_t i = 0; i < R.Z.components.size(); ++i) {
    const auto& c = R.Z.components[i];
    comps.push_back({{"vertex", c.vertex},
                     {"orbit", c.orbit},
                     {"field", field_string(*c.field)},
                     {"d", c.j0},
                     {"ubar", poly_json(c.wild.ubar)},
                     {"m", c.m},
                     {"mu", c.mu},
                     {"s", c.s},
                     {"nbar", c.nbar},
                     {"hbar", ratfunc_json(c.hbar)},
                     {"hprime", ratfunc_json(c.hprime)},
                     {"geometric_components", c.genus.components},
                     {"genus", c.genus.genus_each},
                     {"absolutely_irreducible", c.geometric_components() == 1},
                     {"lfactor", R.lfactor.component_factors[i]}});
  }
  const auto& g = R.Z.graph;
  ojson node_orbits = ojson::array();
  std::vector<char> seen(g.frob_node.size(), 0);
  for (size_t o = 0; o < g.frob_node.size(); ++o) {
    if (seen[o]) continue;
    int size = 0, sign = 1;
    for (int x = static_cast<int>(o); !seen[x]; x = g.frob_node[x]) {
      seen[x] = 1;
      ++size;
      sign *= g.frob_sign[x];
    }
    node_orbits.push_back({{"size", size}, {"epsilon", sign > 0 ? "trivial" : "order-2"}});
  }
  rep["inertial"] = {{"components", comps},
                     {"node_orbits", node_orbits},
                     {"graph",
                      {{"vertices", g.comp_orbits.size()},
                       {"edges", g.node_orbits.size()},
                       {"inverted_edges", g.inverted_node_orbits},
                       {"frobenius_on_vertices", g.frob_comp},
                       {"frobenius_on_edges", g.frob_node},
                       {"edge_signs", g.frob_sign},
                       {"betti", g.betti()}}},
                     {"graph_factor", R.lfactor.graph_factor}};
  ojson counts = ojson::array();
  for (const auto& c : R.counts) counts.push_back({{"degree", c.degree}, {"points", c.counted}});
  rep["point_counts"] = counts;
  rep["swan"] = {{"quotient_genera", R.conductor.quotient_genera}};
  out["report"] = rep;
  return out;
}

std::string text_report(const PipelineResult& R) {
  const LocalField& L = *R.L;
  const FqField& F = *L.residue_field();
  const int e = L.e();
  std::ostringstream o;
  o << "curve     y^" << R.input.n << " = " << qpoly_to_string(R.input.f) << " at p = " << R.input.p << "\n";
  o << "genus     " << R.genus << "\n";
  for (const auto& r : R.rejected) o << "rejected  " << r.field << " (n does not divide N_v)\n";
  o << "field     " << R.field << ", e = " << e << ", f = " << L.f() << ", residue field " << field_string(F)
    << "\n";
  o << "filtration";
  for (size_t i = 0; i < R.filtration.groups.size(); ++i)
    o << " |G_" << i << "| = " << R.filtration.groups[i].size() << (i + 1 < R.filtration.groups.size() ? "," : "");
  o << "\n\nstably marked tree (radii in units of v(p)):\n";
  std::function<void(int, int)> draw = [&](int v, int depth) {
    const auto& tv = R.tree.vertices[v];
    const auto& vr = R.Y.vertices[v];
    o << std::string(2 * depth, ' ') << "+-- v" << v << "  points {";
    for (size_t i = 0; i < tv.cluster.size(); ++i) o << (i ? "," : "") << tv.cluster[i];
    o << "}  r = " << ratio_string(tv.radius, e) << "  N = " << vr.N << "  fbar = " << vr.fbar.to_string()
      << "  components " << vr.D << " of genus " << vr.genus << "\n";
    for (int c : tv.children) draw(c, depth + 1);
  };
  for (size_t v = 0; v < R.tree.vertices.size(); ++v)
    if (R.tree.vertices[v].parent < 0) draw(static_cast<int>(v), 0);
  o << "\nspecial fiber: " << R.Y.components.size() << " components, " << R.Y.nodes.size()
    << " nodes, b1 = " << R.Y.betti << ", arithmetic genus " << R.Y.arithmetic_genus << "\n";
  for (const auto& nf : R.Y.fibers)
    o << "  edge v" << nf.side_a << " - v" << nf.side_b << ": " << nf.d << " node(s) at "
      << respoint_string(F, nf.pos_a) << " (order " << nf.ord_a << ")\n";
  o << "\ninertial reduction:\n";
  for (size_t i = 0; i < R.Z.components.size(); ++i) {
    const auto& c = R.Z.components[i];
    o << "  orbit of v" << c.vertex << " over " << field_string(*c.field) << ": z^" << c.nbar << " = "
      << c.hprime.to_string("w") << "  (" << c.genus.components << " x genus " << c.genus.genus_each
      << ", factor " << intpoly_to_string(R.lfactor.component_factors[i]) << ")\n";
  }
  o << "  graph factor " << intpoly_to_string(R.lfactor.graph_factor) << "\n\n";
  o << "P1(T) = " << intpoly_to_string(R.lfactor.P1) << "\n";
  o << "epsilon = " << R.conductor.epsilon << ", delta = " << R.conductor.delta.get_str()
    << ", conductor exponent f = " << R.conductor.conductor << "\n";
  return o.str();
}

}  // namespace ssr
