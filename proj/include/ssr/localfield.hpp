#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ssr/finitefield.hpp"

namespace ssr {

class LocalField;
using LFieldPtr = std::shared_ptr<const LocalField>;

constexpr std::int64_t kInfPrec = std::int64_t{1} << 40;

// Element of the unramified ring W = (Z/p^N)[t]/(M(t)): f coefficients of t^0..t^{f-1}.
using WElem = std::vector<mpz_class>;
// Coefficient vector over W of an element of O_L in the basis pi^0..pi^{e-1}; index i*f + j is t^j pi^i.
using Coeffs = std::vector<mpz_class>;

namespace detail {
// Arithmetic in W with coefficients reduced into [0, p^N).
struct WRing {
  std::int64_t p = 0;
  int f = 1;
  int N = 1;
  mpz_class pN;
  std::vector<std::int64_t> M;  // monic lift of the residue modulus, length f+1
  FieldPtr Fres;

  WRing() = default;
  WRing(std::int64_t p, int f, int N, FieldPtr Fres);
  void mod(mpz_class& x) const { mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), pN.get_mpz_t()); }
  WElem zero() const { return WElem(f); }
  WElem one() const;
  WElem from_int(const mpz_class& a) const;
  WElem add(const WElem& a, const WElem& b) const;
  WElem sub(const WElem& a, const WElem& b) const;
  WElem neg(const WElem& a) const;
  WElem mul(const WElem& a, const WElem& b) const;
  WElem inv(const WElem& a) const;  // a must be a unit
  bool is_zero(const WElem& a) const;
  bool is_unit(const WElem& a) const;
  int valuation(const WElem& a) const;  // p-adic, N for zero
  Fq residue(const WElem& a) const;
  WElem lift(Fq a) const;
  // Reduces an unreduced product of length up to 2f-1 modulo M and p^N.
  void reduce_raw(std::vector<mpz_class>& r) const;
};
}  // namespace detail

// x = pi^val * u with u a unit given by its coefficient vector.
// A zero element stores its absolute precision in val (kInfPrec when exact).
struct LElem {
  const LocalField* F = nullptr;
  bool zero = true;
  std::int64_t val = kInfPrec;
  std::int64_t rel = 0;
  Coeffs m;

  bool is_exact_zero() const { return zero && val >= kInfPrec; }
  // Absolute precision in pi-units.
  std::int64_t abs_prec() const { return zero ? val : val + rel; }
};

// L = W[pi]/(E(pi)) with E Eisenstein over W, arithmetic capped at `cap` pi-adic digits.
class LocalField {
 public:
  // residue_modulus: monic modulus of the residue field (default: FqField default);
  // eisenstein: E_0..E_e over W, each a list of at most f integers (t^0..t^{f-1}).
  static LFieldPtr make(std::int64_t p, int f, std::optional<std::vector<std::int64_t>> residue_modulus,
                        const std::vector<WElem>& eisenstein, std::int64_t cap);

  std::int64_t p() const { return W_.p; }
  int f() const { return W_.f; }
  int e() const { return e_; }
  int degree() const { return e_ * W_.f; }
  std::int64_t cap() const { return cap_; }
  int digits() const { return W_.N; }  // coefficients are stored mod p^N
  const FieldPtr& residue_field() const { return W_.Fres; }
  const detail::WRing& w() const { return W_; }
  const std::vector<WElem>& eisenstein() const { return E_; }  // E_0..E_{e-1}; E is monic
  std::string describe() const;

  LElem zero(std::int64_t abs_prec = kInfPrec) const;
  LElem one() const;
  LElem from_int(const mpz_class& a) const;
  LElem from_rational(const mpq_class& a) const;
  LElem from_w(const WElem& w) const;
  LElem pi() const { return pi_pow(1); }
  LElem pi_pow(std::int64_t k) const;
  LElem t() const;  // the unramified generator, a root of M in W
  // Lift of a residue-field element with coordinates in [0, p).
  LElem lift(Fq a) const;
  // Element with the given (not necessarily unit) coefficient vector, known to relative precision cap.
  LElem from_coeffs(const Coeffs& c) const;
  // Coefficient vector of an element of valuation >= 0.
  Coeffs to_coeffs(const LElem& x) const;

  LElem add(const LElem& a, const LElem& b) const;
  LElem neg(const LElem& a) const;
  LElem mul(const LElem& a, const LElem& b) const;
  LElem inv(const LElem& a) const;
  LElem pow(const LElem& a, std::int64_t k) const;
  // Same value with relative precision lowered to at most r.
  LElem truncate(const LElem& a, std::int64_t rel) const;

  // Valuation in pi-units; throws PrecisionExhausted for an inexact zero, returns kInfPrec for exact zero.
  std::int64_t valuation(const LElem& a) const;
  // Valuation normalized by v(p) = 1.
  mpq_class valuation_p(const LElem& a) const;
  Fq residue(const LElem& a) const;
  // Residue of a / pi^k for a of valuation >= k.
  Fq residue_at(const LElem& a, std::int64_t k) const;
  // First `count` pi-adic digits starting at pi^val (digits lifted with coordinates in [0,p)).
  std::vector<Fq> digit_expansion(const LElem& a, int count) const;

  // Hensel root of M congruent to t^(p^j).
  const WElem& frobenius_root(int j) const { return frob_roots_[((j % f()) + f()) % f()]; }
  WElem w_frobenius(const WElem& a, int j) const;

  // Coefficient-vector arithmetic.
  Coeffs coeffs_mul(const Coeffs& a, const Coeffs& b) const;
  Coeffs coeffs_scale(const Coeffs& a, const WElem& w) const;
  Coeffs coeffs_times_pi(const Coeffs& a) const;
  int coeffs_valuation(const Coeffs& a) const;  // e*N when zero mod p^N
  // Element pi^val * c with c integral and absolute precision abs_prec.
  LElem normalize(Coeffs c, std::int64_t val, std::int64_t abs_prec) const;

  LocalField(detail::WRing W, std::vector<WElem> E, std::int64_t cap);

 private:
  Coeffs div_pi_pow(Coeffs a, int j) const;
  Coeffs shift(const Coeffs& a, std::int64_t d) const;
  void reduce(Coeffs& a) const;
  LElem unit_elem(std::int64_t val, std::int64_t rel, Coeffs m) const;

  detail::WRing W_;
  int e_;
  std::int64_t cap_;
  std::vector<WElem> E_;
  std::vector<int> E_nonzero_;
  Coeffs p_over_pi_;                        // coefficients of p/pi (valuation e-1)
  std::vector<Coeffs> eps_pows_, eps_inv_pows_;  // (pi^e/p)^k and its inverse
  std::vector<WElem> frob_roots_;
  std::vector<std::vector<WElem>> frob_root_pows_;
};

LElem operator+(const LElem& a, const LElem& b);
LElem operator-(const LElem& a, const LElem& b);
LElem operator-(const LElem& a);
LElem operator*(const LElem& a, const LElem& b);
LElem operator/(const LElem& a, const LElem& b);

// Polynomials over L, coefficients low to high.
using LPoly = std::vector<LElem>;
LElem lpoly_eval(const LPoly& g, const LElem& x);
LPoly lpoly_deriv(const LPoly& g);
LPoly lpoly_from_rational(const LocalField& L, const std::vector<mpq_class>& c);
// g(a + s*z) as a polynomial in z.
LPoly lpoly_shift_scale(const LPoly& g, const LElem& a, const LElem& s);

// Distinct roots of a squarefree g in L, in the deterministic root order.
std::vector<LElem> lpoly_roots(const LPoly& g);
// Deterministic order: valuation, then digit expansion.
void sort_roots(const LocalField& L, std::vector<LElem>& roots);
// Permutation listing the indices of `roots` in the deterministic order.
std::vector<size_t> root_order(const LocalField& L, const std::vector<LElem>& roots);
bool approx_equal(const LElem& a, const LElem& b, std::int64_t min_agree);

// ---------------------------------------------------------------------------
// Galois group of L over Q_p (or over the subfield fixed by `fixed`).

struct Automorphism {
  int j = 0;                        // acts on the residue field as Frobenius^j
  LElem image_pi;                   // sigma(pi)
  LElem image_pi_inv;
  std::vector<Coeffs> pow_coeffs;   // coefficients of sigma(pi)^i for i < e
};

class GaloisGroup {
 public:
  GaloisGroup(LFieldPtr L, const std::vector<LElem>& fixed = {});

  const LFieldPtr& field() const { return L_; }
  int order() const { return static_cast<int>(auts_.size()); }
  const Automorphism& operator[](int i) const { return auts_[i]; }
  LElem apply(int s, const LElem& x) const;
  int compose(int a, int b) const;  // index of a∘b
  int identity() const { return 0; }
  int inverse(int a) const;
  // Index of the automorphism matching (j, image of pi).
  int identify(int j, const LElem& image_pi) const;
  std::vector<int> inertia() const;
  int frobenius() const;  // an element acting as x -> x^p on the residue field
  // Tame character: residue of sigma(pi)/pi.
  Fq tame_character(int s) const;
  std::uint64_t element_order(int s) const;

 private:
  LFieldPtr L_;
  std::vector<Automorphism> auts_;
  mutable std::map<std::pair<int, int>, int> compose_cache_;
  std::int64_t ident_prec_ = 0;
};

struct RamificationFiltration {
  std::vector<std::int64_t> lower_index;  // i(sigma) per element, kInfPrec for the identity, 0 outside inertia
  std::vector<std::vector<int>> groups;   // Gamma_0, Gamma_1, ..., Gamma_h (each nontrivial)
  int jump = -1;                          // h; -1 when inertia is trivial
  int wild_order() const { return groups.size() > 1 ? static_cast<int>(groups[1].size()) : 1; }
  int inertia_order() const { return groups.empty() ? 1 : static_cast<int>(groups[0].size()); }
  std::vector<int> group(int i) const;    // Gamma_i, trivial group beyond h
};

RamificationFiltration ramification_filtration(const GaloisGroup& G);

// ---------------------------------------------------------------------------
// Catalog of towers Q_p(zeta_m, (u p)^(1/e)).

struct CatalogEntry {
  int f = 1;      // unramified degree
  int a = 0;      // adjoin zeta_{p^a}; 0 or >= 2
  int e_rad = 1;  // radical degree, prime to p
  int u_index = 0;  // u = lift of g^u_index, g primitive in F_{p^f}
  int degree(std::int64_t p) const;
  int ramification(std::int64_t p) const;
  std::string describe(std::int64_t p) const;
};

struct CatalogBounds {
  int max_cyclotomic = 60;
  int max_degree = 32;
};

std::vector<CatalogEntry> catalog_candidates(std::int64_t p, const CatalogBounds& bounds);
LFieldPtr build_catalog_field(std::int64_t p, const CatalogEntry& entry, std::int64_t cap);

// Flattening of a general tower: steps[k] are polynomials over the field built so far.
struct TowerStep {
  // Coefficients of the step polynomial, each an element of the previous field given by
  // its coefficients in powers of the previous uniformizer (each a W element of f integers).
  std::vector<std::vector<std::vector<mpz_class>>> coeffs;
};
LFieldPtr build_tower(std::int64_t p, int f, std::optional<std::vector<std::int64_t>> residue_modulus,
                      const std::vector<TowerStep>& steps, std::int64_t cap);

struct SplitResult {
  LFieldPtr L;
  CatalogEntry entry;
  std::vector<LElem> roots;  // deterministic order
};

// Smallest catalog field containing all roots of the squarefree polynomial g over Q.
SplitResult splitting_field(const std::vector<mpq_class>& g, std::int64_t p, const CatalogBounds& bounds,
                            std::optional<std::int64_t> cap = std::nullopt);

// Catalog fields containing L0's roots of g, zeta_n and p^(1/n), Galois over Q_p, in catalog order
// starting after `start`. Returns nullopt when exhausted.
struct SemistableCandidate {
  LFieldPtr L;
  CatalogEntry entry;
  std::vector<LElem> roots;
  std::shared_ptr<GaloisGroup> galois;
  std::size_t catalog_position = 0;
};
std::optional<SemistableCandidate> next_semistabilizing_field(const std::vector<mpq_class>& g, std::int64_t p,
                                                              int n, const CatalogEntry& L0,
                                                              const CatalogBounds& bounds, std::size_t start,
                                                              std::optional<std::int64_t> cap = std::nullopt);

// Roots of a rational polynomial in L (empty optional when not all roots lie in L).
std::optional<std::vector<LElem>> split_in(const LocalField& L, const std::vector<mpq_class>& g);

}  // namespace ssr
