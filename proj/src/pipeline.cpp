#include "ssr/pipeline.hpp"

#include <random>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "pipeline";

struct FieldChoice {
  LFieldPtr L;
  std::shared_ptr<GaloisGroup> G;
  std::vector<LElem> roots;
  std::string name;
  std::size_t position = 0;
};

std::vector<std::int64_t> gauss_orders(const QPoly& f, const MarkedTree& T) {
  std::vector<std::int64_t> N;
  for (const auto& v : T.vertices) N.push_back(gauss_valuation_f(*T.L, f, v.chart).N);
  return N;
}

MarkedTree prepared_tree(const BranchDivisor& D, const FieldChoice& F, const PipelineOptions& opt,
                         TreeGaloisAction& act) {
  MarkedTree T = build_tree(F.L, D);
  if (opt.perturb_seed) perturb_charts(T, *opt.perturb_seed);
  act = galois_on_tree(*F.G, T);
  normalize_charts(*F.G, T, act);
  act = galois_on_tree(*F.G, T);
  return T;
}

}  // namespace

PipelineResult run_pipeline(const SuperellipticCurve& C, const PipelineOptions& opt) {
  auto report = validate(C);
  require(report.ok(), ErrorKind::Validation, "curve", report.to_string());
  PipelineResult R;
  R.input = C;
  R.model = integral_rescaling(C);
  const SuperellipticCurve& M = R.model.curve;
  R.genus = genus(M);
  const QPoly rad = radical(M.f);
  const int n = M.n;

  FieldChoice F;
  BranchDivisor D;
  if (opt.tower) {
    F.L = build_tower(M.p, opt.tower->f, opt.tower->residue_modulus, opt.tower->steps,
                      opt.precision.value_or(400));
    auto roots = split_in(*F.L, rad);
    require(roots.has_value(), ErrorKind::NotSplit, kMod, "the given field does not split f");
    F.roots = *roots;
    F.G = std::make_shared<GaloisGroup>(F.L);
    F.name = F.L->describe();
    D = branch_divisor(M, *F.L, F.roots);
    R.tree = prepared_tree(D, F, opt, R.action);
    auto bad = semistable_check(gauss_orders(M.f, R.tree), n);
    require(bad.empty(), ErrorKind::NotDivisible, kMod, "the given field does not give semistable reduction");
  } else {
    auto split = splitting_field(rad, M.p, opt.bounds, opt.precision);
    std::size_t start = 0;
    for (;;) {
      auto cand = next_semistabilizing_field(rad, M.p, n, split.entry, opt.bounds, start, opt.precision);
      require(cand.has_value(), ErrorKind::CatalogExhausted, kMod,
              "no catalog field gives semistable reduction; supply an explicit tower or raise the bounds");
      F = {cand->L, cand->galois, cand->roots, cand->entry.describe(M.p), cand->catalog_position};
      D = branch_divisor(M, *F.L, F.roots);
      R.tree = prepared_tree(D, F, opt, R.action);
      auto bad = semistable_check(gauss_orders(M.f, R.tree), n);
      if (bad.empty()) break;
      R.rejected.push_back({F.name, bad});
      start = cand->catalog_position + 1;
    }
  }
  R.L = F.L;
  R.G = F.G;
  R.field = F.name;
  const LocalField& L = *F.L;
  const GaloisGroup& G = *F.G;
  R.filtration = ramification_filtration(G);

  std::mt19937_64 rng(opt.twist_seed.value_or(0));
  std::vector<VertexReduction> red;
  for (int v = 0; v < static_cast<int>(R.tree.vertices.size()); ++v) {
    std::optional<LElem> twist;
    if (opt.twist_seed) {
      const FqField& Fr = *L.residue_field();
      twist = L.lift(1 + rng() % (Fr.q() - 1)) + L.pi() * L.lift(rng() % Fr.q());
    }
    red.push_back(reduce_vertex(L, M.f, R.tree, v, n, twist));
  }
  std::vector<NodeFiber> fibers;
  for (int e = 0; e < static_cast<int>(R.tree.edges.size()); ++e) fibers.push_back(node_fiber(L, R.tree, e, red, n));
  R.Y = assemble_special_fiber(L, std::move(red), std::move(fibers), n, R.genus);

  R.fg = fiber_galois(G, R.tree, R.action, R.Y);
  R.Z = assemble_inertial_curve(G, R.tree, R.action, R.fg, R.Y);
  R.lfactor = local_l_factor(R.Z, M.p);
  R.conductor = conductor_exponent(G, R.tree, R.action, R.fg, R.Y, R.genus, R.lfactor.P1);
  R.counts = counting_check(R.Z, R.lfactor.P1, M.p);
  for (const auto& c : R.counts)
    require(c.predicted == c.counted, ErrorKind::CountsInconsistent, kMod,
            "point count of the inertial reduction over F_p^" + std::to_string(c.degree) + " is " +
                std::to_string(c.counted) + ", the L-factor predicts " + std::to_string(c.predicted));
  return R;
}

}  // namespace ssr
