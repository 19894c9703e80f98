#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace ssr {

class FqField;
using FieldPtr = std::shared_ptr<const FqField>;

// An element of F_{p^k}, stored as the integer whose base-p digits are the
// coefficients of its representative polynomial in t (lowest digit = constant term).
using Fq = std::uint64_t;

class FqField {
 public:
  // modulus: monic, low-to-high, length k+1. When omitted the lexicographically
  // smallest monic irreducible (ordered by c0, c1, ...) is used.
  static FieldPtr make(std::int64_t p, int k,
                       std::optional<std::vector<std::int64_t>> modulus = std::nullopt);

  std::int64_t p() const { return p_; }
  int k() const { return k_; }
  std::uint64_t q() const { return q_; }
  const std::vector<std::int64_t>& modulus() const { return modulus_; }
  bool same_as(const FqField& o) const { return p_ == o.p_ && modulus_ == o.modulus_; }

  Fq zero() const { return 0; }
  Fq one() const { return 1; }
  Fq from_int(std::int64_t a) const;
  Fq from_coeffs(const std::vector<std::int64_t>& c) const;
  std::vector<std::int64_t> coeffs(Fq a) const;
  Fq gen() const;  // the class of t

  Fq add(Fq a, Fq b) const;
  Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }
  Fq neg(Fq a) const;
  Fq mul(Fq a, Fq b) const;
  Fq inv(Fq a) const;
  Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
  Fq pow(Fq a, std::uint64_t e) const;
  Fq pow(Fq a, const mpz_class& e) const;
  Fq frob(Fq a, int j) const;  // a^(p^j), j taken mod k

  // Multiplicative order of a nonzero element.
  std::uint64_t order(Fq a) const;
  // Whether u (nonzero) is a d-th power.
  bool is_power(Fq u, std::uint64_t d) const;
  Fq primitive() const;
  // Builds log/exp tables when q is small enough; returns whether they exist.
  bool ensure_tables() const;
  bool has_tables() const { return tables_ready_.load(std::memory_order_acquire); }
  // Discrete log base primitive(); tables required.
  std::uint32_t log(Fq a) const { return log_[a]; }
  Fq exp(std::uint64_t i) const { return exp_[i % (q_ - 1)]; }

  std::string to_string(Fq a) const;

  FqField(std::int64_t p, int k, std::vector<std::int64_t> modulus);

 private:
  Fq mul_slow(Fq a, Fq b) const;
  Fq pow_slow(Fq a, std::uint64_t e) const;
  const std::vector<std::uint64_t>& qfactors() const;

  std::int64_t p_;
  int k_;
  std::uint64_t q_;
  std::vector<std::int64_t> modulus_;
  mutable std::once_flag factors_once_, tables_once_;
  mutable std::vector<std::uint64_t> qfactors_;  // prime factors of q-1
  mutable Fq prim_ = 0;
  mutable std::atomic<bool> tables_ready_{false};
  mutable std::vector<std::uint32_t> exp_, log_, zech_;
};

// Dense polynomial over F_q, coefficients low to high, no trailing zeros.
struct FqPoly {
  FieldPtr F;
  std::vector<Fq> c;

  FqPoly() = default;
  FqPoly(FieldPtr f, std::vector<Fq> coeffs);
  static FqPoly constant(FieldPtr f, Fq a) { return FqPoly(std::move(f), {a}); }
  static FqPoly x(FieldPtr f) { return FqPoly(std::move(f), {0, 1}); }
  static FqPoly from_ints(FieldPtr f, const std::vector<std::int64_t>& c);

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  bool is_one() const { return c.size() == 1 && c[0] == 1; }
  Fq lc() const { return c.empty() ? 0 : c.back(); }
  Fq coeff(int i) const { return i < static_cast<int>(c.size()) ? c[i] : 0; }
  void trim();
  bool operator==(const FqPoly& o) const { return c == o.c; }
  bool operator!=(const FqPoly& o) const { return c != o.c; }
  std::string to_string(const std::string& var = "x") const;
};

FqPoly operator+(const FqPoly& a, const FqPoly& b);
FqPoly operator-(const FqPoly& a, const FqPoly& b);
FqPoly operator*(const FqPoly& a, const FqPoly& b);
FqPoly poly_scale(const FqPoly& a, Fq s);
std::pair<FqPoly, FqPoly> poly_divmod(const FqPoly& a, const FqPoly& b);
FqPoly operator/(const FqPoly& a, const FqPoly& b);  // exact or truncating quotient
FqPoly operator%(const FqPoly& a, const FqPoly& b);
FqPoly poly_monic(const FqPoly& a);
FqPoly poly_gcd(const FqPoly& a, const FqPoly& b);  // monic
FqPoly poly_deriv(const FqPoly& a);
FqPoly poly_pow(const FqPoly& a, std::uint64_t e);
FqPoly poly_powmod(const FqPoly& a, const mpz_class& e, const FqPoly& m);
FqPoly poly_compose(const FqPoly& a, const FqPoly& b);  // a(b(x))
FqPoly poly_frob(const FqPoly& a, int j);               // coefficientwise a -> a^(p^j)
Fq poly_eval(const FqPoly& a, Fq x);
bool poly_lex_less(const FqPoly& a, const FqPoly& b);  // by degree, then coefficients low to high

using Factorization = std::vector<std::pair<FqPoly, int>>;

// Monic irreducible factors with exponents; the leading coefficient of g is not included.
Factorization factor_poly(const FqPoly& g);
bool is_irreducible(const FqPoly& g);
std::vector<Fq> poly_roots(const FqPoly& g);  // distinct roots in F, ascending

// Reduced fraction num/den with den monic.
struct RatFunc {
  FqPoly num, den;
  static RatFunc make(FqPoly num, FqPoly den);
  static RatFunc poly(FqPoly num);
  bool is_zero() const { return num.is_zero(); }
  bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }
  std::string to_string(const std::string& var = "x") const;
};

RatFunc operator*(const RatFunc& a, const RatFunc& b);
RatFunc rat_inv(const RatFunc& a);
RatFunc rat_pow(const RatFunc& a, std::int64_t e);

// h = unit * prod P^a with signed exponents, P monic irreducible.
struct SignedFactorization {
  Fq unit = 1;
  std::vector<std::pair<FqPoly, int>> factors;
};
SignedFactorization signed_factor(const RatFunc& h);

struct PowerClassData {
  int n = 0;
  int d_max = 1;
  int n_v = 0;
  std::optional<RatFunc> witness;  // witness^d_max == h, present when d_max > 1
};
PowerClassData power_class(const RatFunc& h, int n);

// Largest D | nbar such that z^nbar = h splits into D components over an algebraic closure.
int geometric_power_index(const RatFunc& h, int nbar);

// Points on the normalization of z^nbar = h(w) over F_{q^i}.
std::uint64_t count_kummer_points(int nbar, const RatFunc& h, int i,
                                  std::uint64_t bound = 1'000'000);

// det(1 - Frob_q T | H^1) of the (possibly reducible) smooth curve z^nbar = h over F_q,
// where genus is half the first Betti number.
std::vector<std::int64_t> zeta_numerator(int nbar, const RatFunc& h, int genus,
                                         std::uint64_t bound = 1'000'000);

// Sizes of the Frobenius orbits on the D-th roots of u in an algebraic closure.
std::vector<int> root_orbit_sizes(const FqField& F, Fq u, int D);

FqPoly normalize_kummer_equation(int nbar, const RatFunc& h);

// Embedding of src into dst sending t to the smallest root of src's modulus in dst.
class FieldEmbedding {
 public:
  FieldEmbedding(FieldPtr src, FieldPtr dst);
  Fq operator()(Fq a) const;
  FqPoly operator()(const FqPoly& a) const;
  const FieldPtr& dst() const { return dst_; }
  Fq image_of_gen() const { return root_; }

 private:
  FieldPtr src_, dst_;
  Fq root_;
  std::vector<Fq> table_;  // images of the src elements, when src is small
};

// Linear algebra over F_p.
using FpMatrix = std::vector<std::vector<std::int64_t>>;
std::vector<std::vector<std::int64_t>> fp_kernel(FpMatrix m, std::int64_t p);
std::optional<std::vector<std::int64_t>> fp_solve(FpMatrix m, std::vector<std::int64_t> rhs,
                                                  std::int64_t p);

// Largest | |alpha| sqrt(q) - 1 | over the roots alpha of P, i.e. the distance of the
// reciprocal roots from the circle of radius sqrt(q).
double weil_deviation(const std::vector<std::int64_t>& P, double q);

std::int64_t mod_pos(std::int64_t a, std::int64_t m);
bool is_prime(std::int64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

}  // namespace ssr
