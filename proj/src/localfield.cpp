#include "ssr/localfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "localfield";

int vp_mpz(const mpz_class& x, std::int64_t p, int cap) {
  if (x == 0) return cap;
  if (p == 2) return static_cast<int>(std::min<mp_bitcnt_t>(mpz_scan1(x.get_mpz_t(), 0), cap));
  mpz_class t = x;
  int v = 0;
  while (v < cap && mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kInfPrec || b >= kInfPrec) return kInfPrec;
  return std::min(a + b, kInfPrec);
}

}  // namespace

// ---------------------------------------------------------------------------
// W = (Z/p^N)[t]/M

namespace detail {

WRing::WRing(std::int64_t p_, int f_, int N_, FieldPtr F) : p(p_), f(f_), N(N_), M(F->modulus()), Fres(std::move(F)) {
  mpz_ui_pow_ui(pN.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(N));
}

WElem WRing::one() const {
  WElem r(f);
  r[0] = 1;
  return r;
}

WElem WRing::from_int(const mpz_class& a) const {
  WElem r(f);
  r[0] = a;
  mod(r[0]);
  return r;
}

WElem WRing::add(const WElem& a, const WElem& b) const {
  WElem r(f);
  for (int i = 0; i < f; ++i) {
    r[i] = a[i] + b[i];
    if (r[i] >= pN) r[i] -= pN;
  }
  return r;
}

WElem WRing::sub(const WElem& a, const WElem& b) const {
  WElem r(f);
  for (int i = 0; i < f; ++i) {
    r[i] = a[i] - b[i];
    if (r[i] < 0) r[i] += pN;
  }
  return r;
}

WElem WRing::neg(const WElem& a) const {
  WElem r(f);
  for (int i = 0; i < f; ++i) r[i] = a[i] == 0 ? mpz_class(0) : mpz_class(pN - a[i]);
  return r;
}

void WRing::reduce_raw(std::vector<mpz_class>& r) const {
  for (int l = static_cast<int>(r.size()) - 1; l >= f; --l) {
    if (r[l] == 0) continue;
    for (int m = 0; m < f; ++m)
      if (M[m] != 0) mpz_submul_ui(r[l - f + m].get_mpz_t(), r[l].get_mpz_t(), static_cast<unsigned long>(M[m]));
    r[l] = 0;
  }
  r.resize(f);
  for (auto& c : r) mod(c);
}

WElem WRing::mul(const WElem& a, const WElem& b) const {
  std::vector<mpz_class> r(2 * f - 1);
  for (int i = 0; i < f; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < f; ++j)
      if (b[j] != 0) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  reduce_raw(r);
  return r;
}

bool WRing::is_zero(const WElem& a) const {
  return std::all_of(a.begin(), a.end(), [](const mpz_class& c) { return c == 0; });
}

int WRing::valuation(const WElem& a) const {
  int v = N;
  for (const auto& c : a) v = std::min(v, vp_mpz(c, p, N));
  return v;
}

bool WRing::is_unit(const WElem& a) const { return residue(a) != 0; }

Fq WRing::residue(const WElem& a) const {
  std::vector<std::int64_t> c(f);
  mpz_class t;
  for (int i = 0; i < f; ++i) {
    mpz_fdiv_r_ui(t.get_mpz_t(), a[i].get_mpz_t(), static_cast<unsigned long>(p));
    c[i] = t.get_si();
  }
  return Fres->from_coeffs(c);
}

WElem WRing::lift(Fq a) const {
  auto c = Fres->coeffs(a);
  WElem r(f);
  for (int i = 0; i < f && i < static_cast<int>(c.size()); ++i) r[i] = static_cast<long>(c[i]);
  return r;
}

WElem WRing::inv(const WElem& a) const {
  Fq r = residue(a);
  require(r != 0, ErrorKind::Internal, kMod, "inverse of a non-unit in W");
  WElem x = lift(Fres->inv(r));
  WElem two = from_int(2);
  for (int prec = 1; prec < N; prec *= 2) x = mul(x, sub(two, mul(a, x)));
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LocalField construction

LocalField::LocalField(detail::WRing W, std::vector<WElem> E, std::int64_t cap)
    : W_(std::move(W)), e_(static_cast<int>(E.size())), cap_(cap), E_(std::move(E)) {
  const int f = W_.f;
  for (int i = 0; i < e_; ++i)
    if (!W_.is_zero(E_[i])) E_nonzero_.push_back(i);
  // eps = pi^e / p = -sum_i (E_i/p) pi^i
  Coeffs eps(e_ * f);
  for (int i = 0; i < e_; ++i)
    for (int j = 0; j < f; ++j) {
      mpz_class c = E_[i][j];
      if (c != 0) c = W_.pN - c;
      mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(W_.p));
      eps[i * f + j] = c;
    }
  reduce(eps);
  Coeffs one(e_ * f);
  one[0] = 1;
  eps_pows_.push_back(one);
  for (int k = 1; k <= W_.N + 1; ++k) eps_pows_.push_back(coeffs_mul(eps_pows_.back(), eps));
  LElem eps_elem = unit_elem(0, cap_, eps);
  LElem eps_inv = inv(eps_elem);
  eps_inv_pows_.push_back(one);
  for (int k = 1; k <= W_.N + 1; ++k) eps_inv_pows_.push_back(coeffs_mul(eps_inv_pows_.back(), eps_inv.m));
  // p/pi = pi^(e-1) / eps
  Coeffs c = eps_inv.m;
  for (int i = 0; i + 1 < e_; ++i) c = coeffs_times_pi(c);
  p_over_pi_ = c;

  // Frobenius images of t in W.
  for (int j = 0; j < f; ++j) {
    Fq target = W_.Fres->frob(W_.Fres->gen(), j);
    WElem x = W_.lift(target);
    if (f > 1) {
      for (int prec = 1; prec < 2 * W_.N; prec *= 2) {
        WElem Mx = W_.zero(), dM = W_.zero();
        for (int k = f; k >= 0; --k) {
          Mx = W_.add(W_.mul(Mx, x), W_.from_int(W_.M[k]));
          if (k > 0) dM = W_.add(W_.mul(dM, x), W_.from_int(W_.M[k] * k));
        }
        x = W_.sub(x, W_.mul(Mx, W_.inv(dM)));
      }
    } else {
      x = W_.from_int(-W_.M[0]);
    }
    frob_roots_.push_back(x);
    std::vector<WElem> pows{W_.one()};
    for (int l = 1; l < f; ++l) pows.push_back(W_.mul(pows.back(), x));
    frob_root_pows_.push_back(std::move(pows));
  }
}

LFieldPtr LocalField::make(std::int64_t p, int f, std::optional<std::vector<std::int64_t>> residue_modulus,
                           const std::vector<WElem>& eisenstein, std::int64_t cap) {
  require(is_prime(p), ErrorKind::NonPrime, kMod, "p must be prime");
  require(cap >= 4, ErrorKind::PrecisionTooLow, kMod, "precision must be at least 4 digits");
  FieldPtr F = FqField::make(p, f, std::move(residue_modulus));
  int e = static_cast<int>(eisenstein.size()) - 1;
  require(e >= 1, ErrorKind::NotEisenstein, kMod, "Eisenstein polynomial must have degree >= 1");
  int N = static_cast<int>((cap + e - 1) / e) + 3;
  detail::WRing W(p, f, N, F);
  std::vector<WElem> E;
  for (int i = 0; i <= e; ++i) {
    WElem c(f);
    for (int j = 0; j < f && j < static_cast<int>(eisenstein[i].size()); ++j) {
      c[j] = eisenstein[i][j];
      W.mod(c[j]);
    }
    if (i == e) {
      require(c == W.one(), ErrorKind::NotEisenstein, kMod, "Eisenstein polynomial must be monic");
    } else {
      int v = W.valuation(c);
      require(v >= 1, ErrorKind::NotEisenstein, kMod, "non-leading coefficient must have positive valuation");
      if (i == 0) require(v == 1, ErrorKind::NotEisenstein, kMod, "constant term must have valuation one");
      E.push_back(std::move(c));
    }
  }
  return std::make_shared<const LocalField>(std::move(W), std::move(E), cap);
}

std::string LocalField::describe() const {
  std::ostringstream os;
  os << "Q_" << p() << "(f=" << f() << ", e=" << e_ << "; E = pi^" << e_;
  for (int i = e_ - 1; i >= 0; --i) {
    if (W_.is_zero(E_[i])) continue;
    os << " + (";
    for (int j = 0; j < f(); ++j) {
      mpz_class c = E_[i][j];
      if (c > W_.pN / 2) c -= W_.pN;
      os << (j ? "," : "") << c.get_str();
    }
    os << ")";
    if (i > 0) os << "*pi^" << i;
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Coefficient vectors

void LocalField::reduce(Coeffs& a) const {
  for (auto& c : a) W_.mod(c);
}

Coeffs LocalField::coeffs_mul(const Coeffs& a, const Coeffs& b) const {
  const int f = W_.f, e = e_;
  const int tf = 2 * f - 1;
  std::vector<mpz_class> raw((2 * e - 1) * tf);
  for (int i = 0; i < e; ++i)
    for (int l1 = 0; l1 < f; ++l1) {
      const mpz_class& x = a[i * f + l1];
      if (x == 0) continue;
      for (int j = 0; j < e; ++j)
        for (int l2 = 0; l2 < f; ++l2) {
          const mpz_class& y = b[j * f + l2];
          if (y != 0) mpz_addmul(raw[(i + j) * tf + l1 + l2].get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        }
    }
  auto slot = [&](int k) {
    std::vector<mpz_class> r(raw.begin() + k * tf, raw.begin() + (k + 1) * tf);
    W_.reduce_raw(r);
    return r;
  };
  // pi^e = -sum E_i pi^i, processed from the top so each slot is final when used.
  for (int k = 2 * e - 2; k >= e; --k) {
    WElem c = slot(k);
    if (W_.is_zero(c)) continue;
    for (int i : E_nonzero_) {
      int dst = k - e + i;
      for (int l1 = 0; l1 < f; ++l1) {
        if (c[l1] == 0) continue;
        for (int l2 = 0; l2 < f; ++l2)
          if (E_[i][l2] != 0)
            mpz_submul(raw[dst * tf + l1 + l2].get_mpz_t(), c[l1].get_mpz_t(), E_[i][l2].get_mpz_t());
      }
    }
  }
  Coeffs out(e * f);
  for (int k = 0; k < e; ++k) {
    WElem c = slot(k);
    for (int j = 0; j < f; ++j) out[k * f + j] = std::move(c[j]);
  }
  return out;
}

Coeffs LocalField::coeffs_scale(const Coeffs& a, const WElem& w) const {
  const int f = W_.f;
  Coeffs out(e_ * f);
  for (int i = 0; i < e_; ++i) {
    WElem ai(a.begin() + i * f, a.begin() + (i + 1) * f);
    WElem r = W_.mul(ai, w);
    for (int j = 0; j < f; ++j) out[i * f + j] = std::move(r[j]);
  }
  return out;
}

Coeffs LocalField::coeffs_times_pi(const Coeffs& a) const {
  const int f = W_.f;
  WElem top(a.begin() + (e_ - 1) * f, a.end());
  Coeffs out(e_ * f);
  for (int i = e_ - 1; i >= 1; --i)
    for (int j = 0; j < f; ++j) out[i * f + j] = a[(i - 1) * f + j];
  if (!W_.is_zero(top)) {
    for (int i : E_nonzero_) {
      WElem t = W_.mul(top, E_[i]);
      for (int j = 0; j < f; ++j) out[i * f + j] -= t[j];
    }
  }
  reduce(out);
  return out;
}

int LocalField::coeffs_valuation(const Coeffs& a) const {
  const int f = W_.f;
  int best = e_ * W_.N;
  for (int i = 0; i < e_; ++i) {
    if (i >= best) break;
    int v = W_.N;
    for (int j = 0; j < f; ++j) v = std::min(v, vp_mpz(a[i * f + j], W_.p, v));
    if (v < W_.N) best = std::min(best, e_ * v + i);
  }
  return best;
}

Coeffs LocalField::div_pi_pow(Coeffs a, int j) const {
  const int f = W_.f;
  int q = j / e_, b = j % e_;
  if (q > 0) {
    mpz_class pq;
    mpz_ui_pow_ui(pq.get_mpz_t(), static_cast<unsigned long>(W_.p), static_cast<unsigned long>(q));
    for (auto& c : a) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pq.get_mpz_t());
    a = coeffs_mul(a, q < static_cast<int>(eps_inv_pows_.size()) ? eps_inv_pows_[q]
                                                                  : pow(unit_elem(0, cap_, eps_inv_pows_[1]), q).m);
  }
  for (int s = 0; s < b; ++s) {
    WElem a0(a.begin(), a.begin() + f);
    for (auto& c : a0) mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(W_.p));
    Coeffs r = coeffs_scale(p_over_pi_, a0);
    for (int i = 0; i + 1 < e_; ++i)
      for (int jj = 0; jj < f; ++jj) r[i * f + jj] += a[(i + 1) * f + jj];
    reduce(r);
    a = std::move(r);
  }
  return a;
}

Coeffs LocalField::shift(const Coeffs& a, std::int64_t d) const {
  if (d >= static_cast<std::int64_t>(e_) * W_.N) return Coeffs(a.size());
  if (d < e_) {
    Coeffs r = a;
    for (std::int64_t s = 0; s < d; ++s) r = coeffs_times_pi(r);
    return r;
  }
  int q = static_cast<int>(d / e_), b = static_cast<int>(d % e_);
  Coeffs r = coeffs_mul(a, eps_pows_[q]);
  mpz_class pq;
  mpz_ui_pow_ui(pq.get_mpz_t(), static_cast<unsigned long>(W_.p), static_cast<unsigned long>(q));
  for (auto& c : r) c *= pq;
  reduce(r);
  for (int s = 0; s < b; ++s) r = coeffs_times_pi(r);
  return r;
}

LElem LocalField::unit_elem(std::int64_t val, std::int64_t rel, Coeffs m) const {
  LElem x;
  x.F = this;
  x.zero = false;
  x.val = val;
  x.rel = std::min(rel, cap_);
  x.m = std::move(m);
  return x;
}

LElem LocalField::normalize(Coeffs c, std::int64_t val, std::int64_t abs_prec) const {
  int j = coeffs_valuation(c);
  if (j >= e_ * W_.N) return zero(abs_prec);
  if (val + j >= abs_prec) return zero(abs_prec);
  if (j > 0) c = div_pi_pow(std::move(c), j);
  return unit_elem(val + j, abs_prec >= kInfPrec ? cap_ : abs_prec - val - j, std::move(c));
}

// ---------------------------------------------------------------------------
// Elements

LElem LocalField::zero(std::int64_t abs_prec) const {
  LElem x;
  x.F = this;
  x.zero = true;
  x.val = std::min(abs_prec, kInfPrec);
  return x;
}

LElem LocalField::one() const {
  Coeffs m(e_ * W_.f);
  m[0] = 1;
  return unit_elem(0, cap_, std::move(m));
}

LElem LocalField::pi_pow(std::int64_t k) const {
  LElem x = one();
  x.val = k;
  return x;
}

LElem LocalField::from_w(const WElem& w) const {
  if (W_.is_zero(w)) return zero();
  int v = W_.valuation(w);
  WElem u = w;
  if (v > 0) {
    mpz_class pv;
    mpz_ui_pow_ui(pv.get_mpz_t(), static_cast<unsigned long>(W_.p), static_cast<unsigned long>(v));
    for (auto& c : u) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pv.get_mpz_t());
  }
  Coeffs m(e_ * W_.f);
  for (int j = 0; j < W_.f; ++j) m[j] = u[j];
  if (v > 0) m = coeffs_mul(m, eps_inv_pows_[v]);
  return unit_elem(static_cast<std::int64_t>(e_) * v, cap_, std::move(m));
}

LElem LocalField::from_int(const mpz_class& a) const {
  if (a == 0) return zero();
  int v = vp_mpz(a, W_.p, 1 << 30);
  require(v < W_.N, ErrorKind::PrecisionExhausted, kMod, "integer valuation exceeds the precision cap");
  mpz_class b = a;
  for (int i = 0; i < v; ++i) mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(W_.p));
  Coeffs m(e_ * W_.f);
  m[0] = b;
  W_.mod(m[0]);
  if (v > 0) m = coeffs_mul(m, eps_inv_pows_[v]);
  return unit_elem(static_cast<std::int64_t>(e_) * v, cap_, std::move(m));
}

LElem LocalField::from_rational(const mpq_class& a) const {
  if (a == 0) return zero();
  return mul(from_int(a.get_num()), inv(from_int(a.get_den())));
}

LElem LocalField::t() const {
  WElem w(W_.f);
  if (W_.f > 1)
    w[1] = 1;
  else
    w = W_.from_int(-W_.M[0]);
  return from_w(w);
}

LElem LocalField::lift(Fq a) const { return from_w(W_.lift(a)); }

LElem LocalField::from_coeffs(const Coeffs& c) const {
  Coeffs r = c;
  reduce(r);
  int v = coeffs_valuation(r);
  if (v >= e_ * W_.N) {
    bool exact = std::all_of(c.begin(), c.end(), [](const mpz_class& x) { return x == 0; });
    return zero(exact ? kInfPrec : static_cast<std::int64_t>(e_) * W_.N);
  }
  return normalize(std::move(r), 0, v + cap_);
}

Coeffs LocalField::to_coeffs(const LElem& x) const {
  if (x.zero) return Coeffs(e_ * W_.f);
  require(x.val >= 0, ErrorKind::NegativeValuation, kMod, "coefficient vector of a non-integral element");
  return shift(x.m, x.val);
}

LElem LocalField::add(const LElem& a, const LElem& b) const {
  if (a.zero && b.zero) return zero(std::min(a.val, b.val));
  if (a.zero) {
    if (a.val <= b.val) return zero(a.val);
    LElem r = b;
    r.rel = std::min(r.rel, a.val - b.val);
    return r;
  }
  if (b.zero) return add(b, a);
  std::int64_t k = std::min(a.val, b.val);
  std::int64_t ap = std::min(a.abs_prec(), b.abs_prec());
  Coeffs s(e_ * W_.f);
  auto accumulate = [&](const LElem& x) {
    std::int64_t d = x.val - k;
    if (d >= ap - k) return;
    const Coeffs& m = d == 0 ? x.m : shift(x.m, d);
    for (size_t i = 0; i < s.size(); ++i) s[i] += m[i];
  };
  accumulate(a);
  accumulate(b);
  reduce(s);
  return normalize(std::move(s), k, ap);
}

LElem LocalField::neg(const LElem& a) const {
  if (a.zero) return a;
  LElem r = a;
  for (auto& c : r.m)
    if (c != 0) c = W_.pN - c;
  return r;
}

LElem LocalField::mul(const LElem& a, const LElem& b) const {
  if (a.zero || b.zero) {
    std::int64_t va = a.zero ? a.val : a.val, vb = b.zero ? b.val : b.val;
    return zero(sat_add(va, vb));
  }
  return unit_elem(a.val + b.val, std::min(a.rel, b.rel), coeffs_mul(a.m, b.m));
}

LElem LocalField::inv(const LElem& a) const {
  if (a.zero) {
    fail(a.is_exact_zero() ? ErrorKind::Internal : ErrorKind::PrecisionExhausted, kMod,
         "inverse of an element indistinguishable from zero");
  }
  Fq r = W_.residue(WElem(a.m.begin(), a.m.begin() + W_.f));
  Coeffs w(e_ * W_.f);
  WElem l = W_.lift(W_.Fres->inv(r));
  for (int j = 0; j < W_.f; ++j) w[j] = l[j];
  for (std::int64_t prec = 1; prec < std::min<std::int64_t>(a.rel, cap_) + 1; prec *= 2) {
    Coeffs t = coeffs_mul(a.m, w);
    for (auto& c : t)
      if (c != 0) c = W_.pN - c;
    t[0] += 2;
    reduce(t);
    w = coeffs_mul(w, t);
  }
  return unit_elem(-a.val, a.rel, std::move(w));
}

LElem LocalField::pow(const LElem& a, std::int64_t k) const {
  if (k < 0) return pow(inv(a), -k);
  if (k == 0) return one();
  if (a.zero) return zero(a.val >= kInfPrec ? kInfPrec : a.val * k);
  Coeffs r(e_ * W_.f), base = a.m;
  r[0] = 1;
  std::int64_t kk = k;
  bool first = true;
  while (kk > 0) {
    if (kk & 1) {
      r = first ? base : coeffs_mul(r, base);
      first = false;
    }
    kk >>= 1;
    if (kk) base = coeffs_mul(base, base);
  }
  return unit_elem(a.val * k, a.rel, std::move(r));
}

LElem LocalField::truncate(const LElem& a, std::int64_t rel) const {
  LElem r = a;
  if (r.zero) return r;
  if (rel <= 0) return zero(a.val);
  r.rel = std::min(r.rel, rel);
  return r;
}

std::int64_t LocalField::valuation(const LElem& a) const {
  if (a.zero) {
    if (a.is_exact_zero()) return kInfPrec;
    fail(ErrorKind::PrecisionExhausted, kMod, "element is zero to working precision");
  }
  return a.val;
}

mpq_class LocalField::valuation_p(const LElem& a) const {
  std::int64_t v = valuation(a);
  mpq_class r(static_cast<long>(v), static_cast<unsigned long>(e_));
  r.canonicalize();
  return r;
}

Fq LocalField::residue(const LElem& a) const { return residue_at(a, 0); }

Fq LocalField::residue_at(const LElem& a, std::int64_t k) const {
  if (a.zero) {
    require(a.val > k, ErrorKind::PrecisionExhausted, kMod, "residue of an element with too little precision");
    return 0;
  }
  require(a.val >= k, ErrorKind::NegativeValuation, kMod, "residue of an element of negative valuation");
  if (a.val > k) return 0;
  return W_.residue(WElem(a.m.begin(), a.m.begin() + W_.f));
}

std::vector<Fq> LocalField::digit_expansion(const LElem& a, int count) const {
  std::vector<Fq> out;
  if (a.zero) {
    out.assign(count, 0);
    return out;
  }
  LElem y = unit_elem(0, a.rel, a.m);
  for (int i = 0; i < count; ++i) {
    Fq d = residue(y);
    out.push_back(d);
    y = add(y, neg(lift(d)));
    if (y.val < kInfPrec) y.val -= 1;
  }
  return out;
}

WElem LocalField::w_frobenius(const WElem& a, int j) const {
  int jj = ((j % f()) + f()) % f();
  if (jj == 0) return a;
  const auto& pows = frob_root_pows_[jj];
  WElem r = W_.zero();
  for (int l = 0; l < f(); ++l) {
    if (a[l] == 0) continue;
    WElem t = pows[l];
    for (auto& c : t) c *= a[l];
    r = W_.add(r, t);
  }
  for (auto& c : r) W_.mod(c);
  return r;
}

LElem operator+(const LElem& a, const LElem& b) { return a.F->add(a, b); }
LElem operator-(const LElem& a, const LElem& b) { return a.F->add(a, a.F->neg(b)); }
LElem operator-(const LElem& a) { return a.F->neg(a); }
LElem operator*(const LElem& a, const LElem& b) { return a.F->mul(a, b); }
LElem operator/(const LElem& a, const LElem& b) { return a.F->mul(a, a.F->inv(b)); }

bool approx_equal(const LElem& a, const LElem& b, std::int64_t min_agree) {
  LElem d = a - b;
  return d.zero ? true : d.val >= min_agree;
}

// ---------------------------------------------------------------------------
// Polynomials and roots

LElem lpoly_eval(const LPoly& g, const LElem& x) {
  const LocalField& L = *x.F;
  LElem r = L.zero();
  for (int i = static_cast<int>(g.size()) - 1; i >= 0; --i) r = L.add(L.mul(r, x), g[i]);
  return r;
}

LPoly lpoly_deriv(const LPoly& g) {
  LPoly r;
  for (size_t i = 1; i < g.size(); ++i) r.push_back(g[i].F->mul(g[i], g[i].F->from_int(static_cast<long>(i))));
  return r;
}

LPoly lpoly_from_rational(const LocalField& L, const std::vector<mpq_class>& c) {
  LPoly r;
  for (const auto& x : c) r.push_back(L.from_rational(x));
  return r;
}

LPoly lpoly_shift_scale(const LPoly& g, const LElem& a, const LElem& s) {
  const LocalField& L = *a.F;
  int n = static_cast<int>(g.size());
  LPoly c = g;
  // Taylor shift by repeated synthetic division.
  for (int i = 0; i < n; ++i)
    for (int j = n - 2; j >= i; --j) c[j] = L.add(c[j], L.mul(a, c[j + 1]));
  LElem sp = L.one();
  for (int i = 0; i < n; ++i) {
    c[i] = L.mul(c[i], sp);
    sp = L.mul(sp, s);
  }
  return c;
}

namespace {

void trim_poly(LPoly& g) {
  while (!g.empty() && g.back().zero) g.pop_back();
}

// Newton refinement while the Hensel condition v(g(x)) > 2 v(g'(x)) holds.
LElem newton(const LPoly& g, LElem x) {
  const LocalField& L = *x.F;
  LPoly dg = lpoly_deriv(g);
  for (int it = 0; it < 64; ++it) {
    LElem gx = lpoly_eval(g, x);
    LElem dx = lpoly_eval(dg, x);
    if (dx.zero) fail(ErrorKind::PrecisionExhausted, kMod, "derivative vanishes at a root to working precision");
    if (gx.zero) {
      std::int64_t acc = gx.val - dx.val;  // distance to the true root
      if (acc < kInfPrec / 2) x = L.truncate(x, acc - (x.zero ? 0 : x.val));
      return x;
    }
    if (gx.val <= 2 * dx.val) return x;
    LElem step = L.mul(gx, L.inv(dx));
    x = L.add(x, L.neg(step));
  }
  return x;
}

std::vector<LElem> roots_integral(const LPoly& g0, int depth) {
  LPoly g = g0;
  trim_poly(g);
  if (g.size() < 2) return {};
  const LocalField& L = *g[0].F;
  std::int64_t vmin = kInfPrec;
  for (const auto& c : g)
    if (!c.zero) vmin = std::min(vmin, c.val);
  for (auto& c : g) {
    if (c.zero && c.val <= vmin) fail(ErrorKind::PrecisionExhausted, kMod, "polynomial coefficients lost precision");
    if (c.val < kInfPrec) c.val -= vmin;
  }
  const FieldPtr& F = L.residue_field();
  std::vector<Fq> red;
  for (const auto& c : g) red.push_back(L.residue(c));
  FqPoly gbar(F, red);
  if (gbar.deg() < 1) return {};
  std::vector<LElem> out;
  for (Fq r : poly_roots(gbar)) {
    FqPoly lin(F, {F->neg(r), 1});
    int mult = 0;
    FqPoly h = gbar;
    while (true) {
      auto [q, rem] = poly_divmod(h, lin);
      if (!rem.is_zero()) break;
      h = q;
      ++mult;
    }
    LElem r0 = L.lift(r);
    if (mult == 1) {
      out.push_back(newton(g, r0));
      continue;
    }
    require(depth < L.cap(), ErrorKind::PrecisionExhausted, kMod, "root separation exceeds precision");
    LPoly g2 = lpoly_shift_scale(g, r0, L.pi());
    for (const LElem& z : roots_integral(g2, depth + 1)) out.push_back(L.add(r0, L.mul(L.pi(), z)));
  }
  return out;
}

}  // namespace

std::vector<size_t> root_order(const LocalField& L, const std::vector<LElem>& roots) {
  size_t n = roots.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n < 2) return idx;
  int need = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (roots[i].val != roots[j].val) continue;
      LElem d = roots[i] - roots[j];
      std::int64_t agree = d.zero ? d.val : d.val;
      need = std::max<std::int64_t>(need, std::min<std::int64_t>(agree - roots[i].val + 1, L.cap()));
    }
  std::vector<std::vector<Fq>> keys;
  for (const auto& r : roots) keys.push_back(L.digit_expansion(r, need));
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (roots[a].val != roots[b].val) return roots[a].val < roots[b].val;
    return keys[a] < keys[b];
  });
  return idx;
}

void sort_roots(const LocalField& L, std::vector<LElem>& roots) {
  std::vector<LElem> sorted;
  for (size_t i : root_order(L, roots)) sorted.push_back(roots[i]);
  roots = std::move(sorted);
}

std::vector<LElem> lpoly_roots(const LPoly& g0) {
  LPoly g = g0;
  trim_poly(g);
  if (g.size() < 2) return {};
  const LocalField& L = *g[0].F;
  std::vector<LElem> roots;
  if (g[0].is_exact_zero()) {
    roots = lpoly_roots(LPoly(g.begin() + 1, g.end()));
    roots.push_back(L.zero());
    sort_roots(L, roots);
    return roots;
  }
  for (const LElem& r : roots_integral(g, 0)) roots.push_back(newton(g, r));
  if (roots.size() + 1 < g.size()) {
    LPoly rev(g.rbegin(), g.rend());
    for (const LElem& z : roots_integral(rev, 0)) {
      if (z.zero || z.val <= 0) continue;
      roots.push_back(newton(g, L.inv(z)));
    }
  }
  sort_roots(L, roots);
  return roots;
}

std::optional<std::vector<LElem>> split_in(const LocalField& L, const std::vector<mpq_class>& g) {
  LPoly G = lpoly_from_rational(L, g);
  auto roots = lpoly_roots(G);
  if (static_cast<int>(roots.size()) != static_cast<int>(G.size()) - 1) return std::nullopt;
  return roots;
}

// ---------------------------------------------------------------------------
// Galois group

GaloisGroup::GaloisGroup(LFieldPtr L, const std::vector<LElem>& fixed) : L_(std::move(L)) {
  const LocalField& F = *L_;
  const int e = F.e(), f = F.f();
  std::int64_t max_close = 0;
  for (int j = 0; j < f; ++j) {
    LPoly Ej;
    for (const auto& c : F.eisenstein()) Ej.push_back(F.from_w(F.w_frobenius(c, j)));
    Ej.push_back(F.one());
    auto roots = lpoly_roots(Ej);
    if (static_cast<int>(roots.size()) != e)
      fail(ErrorKind::NotGalois, kMod, "the field is not Galois over Q_" + std::to_string(F.p()));
    for (size_t a = 0; a < roots.size(); ++a)
      for (size_t b = a + 1; b < roots.size(); ++b) {
        LElem d = roots[a] - roots[b];
        require(!d.zero, ErrorKind::PrecisionExhausted, kMod, "conjugates of the uniformizer not separated");
        max_close = std::max(max_close, d.val);
      }
    for (auto& r : roots) {
      Automorphism A;
      A.j = j;
      A.image_pi = r;
      A.image_pi_inv = F.inv(r);
      LElem pw = F.one();
      for (int i = 0; i < e; ++i) {
        A.pow_coeffs.push_back(F.to_coeffs(pw));
        pw = F.mul(pw, r);
      }
      auts_.push_back(std::move(A));
    }
  }
  ident_prec_ = max_close + 1;
  for (const auto& A : auts_)
    require(A.image_pi.rel > ident_prec_, ErrorKind::PrecisionExhausted, kMod, "automorphisms not identifiable");
  // identity first
  for (size_t i = 0; i < auts_.size(); ++i)
    if (auts_[i].j == 0 && approx_equal(auts_[i].image_pi, F.pi(), ident_prec_)) {
      std::rotate(auts_.begin(), auts_.begin() + i, auts_.begin() + i + 1);
      break;
    }
  if (!fixed.empty()) {
    std::vector<Automorphism> keep;
    for (int s = 0; s < order(); ++s) {
      bool ok = true;
      for (const auto& x : fixed) {
        LElem d = apply(s, x) - x;
        if (!d.zero && d.val < x.val + x.rel / 2) ok = false;
      }
      if (ok) keep.push_back(auts_[s]);
    }
    auts_ = std::move(keep);
  }
}

LElem GaloisGroup::apply(int s, const LElem& x) const {
  const LocalField& F = *L_;
  if (x.zero) return x;
  const Automorphism& A = auts_[s];
  const int f = F.f(), e = F.e();
  Coeffs acc(e * f);
  for (int i = 0; i < e; ++i) {
    WElem wi(x.m.begin() + i * f, x.m.begin() + (i + 1) * f);
    if (F.w().is_zero(wi)) continue;
    Coeffs t = F.coeffs_scale(A.pow_coeffs[i], F.w_frobenius(wi, A.j));
    for (int k = 0; k < e * f; ++k) acc[k] += t[k];
  }
  for (auto& c : acc) F.w().mod(c);
  LElem u = F.normalize(std::move(acc), 0, std::min(x.rel, A.image_pi.rel));
  LElem scale = x.val >= 0 ? F.pow(A.image_pi, x.val) : F.pow(A.image_pi_inv, -x.val);
  return F.mul(u, scale);
}

int GaloisGroup::identify(int j, const LElem& image_pi) const {
  int f = L_->f();
  j = ((j % f) + f) % f;
  for (int s = 0; s < order(); ++s)
    if (auts_[s].j == j && approx_equal(auts_[s].image_pi, image_pi, ident_prec_)) return s;
  fail(ErrorKind::PrecisionExhausted, kMod, "automorphism image not identified");
}

int GaloisGroup::compose(int a, int b) const {
  if (a == 0) return b;
  if (b == 0) return a;
  auto key = std::make_pair(a, b);
  auto it = compose_cache_.find(key);
  if (it != compose_cache_.end()) return it->second;
  int r = identify(auts_[a].j + auts_[b].j, apply(a, auts_[b].image_pi));
  compose_cache_[key] = r;
  return r;
}

int GaloisGroup::inverse(int a) const {
  for (int b = 0; b < order(); ++b)
    if ((auts_[a].j + auts_[b].j) % L_->f() == 0 && compose(a, b) == 0) return b;
  fail(ErrorKind::Internal, kMod, "automorphism without inverse");
}

std::vector<int> GaloisGroup::inertia() const {
  std::vector<int> r;
  for (int s = 0; s < order(); ++s)
    if (auts_[s].j == 0) r.push_back(s);
  return r;
}

int GaloisGroup::frobenius() const {
  int target = 1 % L_->f();
  for (int s = 0; s < order(); ++s)
    if (auts_[s].j == target) return s;
  fail(ErrorKind::Internal, kMod, "no Frobenius element");
}

Fq GaloisGroup::tame_character(int s) const {
  const LocalField& F = *L_;
  return F.residue(F.mul(auts_[s].image_pi, F.pi_pow(-1)));
}

std::uint64_t GaloisGroup::element_order(int s) const {
  std::uint64_t k = 1;
  int c = s;
  while (c != 0) {
    c = compose(s, c);
    ++k;
    require(k <= static_cast<std::uint64_t>(order()), ErrorKind::Internal, kMod, "element order exceeds group order");
  }
  return k;
}

std::vector<int> RamificationFiltration::group(int i) const {
  if (i < static_cast<int>(groups.size())) return groups[i];
  return {0};
}

RamificationFiltration ramification_filtration(const GaloisGroup& G) {
  const LocalField& F = *G.field();
  RamificationFiltration R;
  R.lower_index.assign(G.order(), 0);
  std::int64_t total = 0, top = 0;
  auto I = G.inertia();
  for (int s : I) {
    if (s == 0) {
      R.lower_index[s] = kInfPrec;
      continue;
    }
    LElem d = G[s].image_pi - F.pi();
    require(!d.zero, ErrorKind::NotMonogenicWitness, kMod, "automorphism indistinguishable from the identity");
    R.lower_index[s] = d.val;
    total += d.val;
    top = std::max(top, d.val);
  }
  // Hilbert's different formula: sum of i(sigma) equals v_L(E'(pi)).
  LPoly E;
  for (const auto& c : F.eisenstein()) E.push_back(F.from_w(c));
  E.push_back(F.one());
  LElem dE = lpoly_eval(lpoly_deriv(E), F.pi());
  require(!dE.zero && dE.val == total, ErrorKind::NotMonogenicWitness, kMod,
          "ramification indices do not sum to the different");
  R.groups.push_back(I);
  for (std::int64_t i = 1; i < top; ++i) {
    std::vector<int> g{0};
    for (int s : I)
      if (s != 0 && R.lower_index[s] >= i + 1) g.push_back(s);
    R.groups.push_back(g);
  }
  R.jump = I.size() > 1 ? static_cast<int>(top - 1) : -1;
  return R;
}

// ---------------------------------------------------------------------------
// Towers and the catalog

namespace {

using WMatrix = std::vector<std::vector<WElem>>;

// det(xI - A) by Berkowitz's division-free algorithm; coefficients low to high.
std::vector<WElem> charpoly(const WMatrix& A, const detail::WRing& W) {
  int n = static_cast<int>(A.size());
  std::vector<WElem> C{W.one(), W.neg(A[0][0])};  // high to low
  for (int r = 1; r < n; ++r) {
    std::vector<WElem> T(r + 2, W.zero());
    T[0] = W.one();
    T[1] = W.neg(A[r][r]);
    std::vector<WElem> v(r);
    for (int i = 0; i < r; ++i) v[i] = A[i][r];
    for (int k = 0; k < r; ++k) {
      WElem s = W.zero();
      for (int i = 0; i < r; ++i) s = W.add(s, W.mul(A[r][i], v[i]));
      T[k + 2] = W.neg(s);
      if (k + 1 < r) {
        std::vector<WElem> nv(r, W.zero());
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) nv[i] = W.add(nv[i], W.mul(A[i][j], v[j]));
        v = std::move(nv);
      }
    }
    std::vector<WElem> nC(r + 2, W.zero());
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) nC[i] = W.add(nC[i], W.mul(T[i - j], C[j]));
    C = std::move(nC);
  }
  std::reverse(C.begin(), C.end());
  return C;
}

// Solves A x = b over W when A is invertible modulo p.
std::vector<WElem> solve_w(WMatrix A, std::vector<WElem> b, const detail::WRing& W) {
  int n = static_cast<int>(A.size());
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (W.is_unit(A[r][c])) {
        piv = r;
        break;
      }
    require(piv >= 0, ErrorKind::Internal, kMod, "change of basis is not invertible");
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    WElem iv = W.inv(A[c][c]);
    for (int j = c; j < n; ++j) A[c][j] = W.mul(A[c][j], iv);
    b[c] = W.mul(b[c], iv);
    for (int r = 0; r < n; ++r) {
      if (r == c || W.is_zero(A[r][c])) continue;
      WElem m = A[r][c];
      for (int j = c; j < n; ++j) A[r][j] = W.sub(A[r][j], W.mul(m, A[c][j]));
      b[r] = W.sub(b[r], W.mul(m, b[c]));
    }
  }
  return b;
}

struct Flattened {
  LFieldPtr L;
  LElem image_of_base_pi;  // the base uniformizer inside L (meaningful while the base is alive)
};

// K[theta]/G(theta) flattened to W[theta]/E(theta); G monic with coefficients g_0..g_{d-1} in K.
Flattened flatten(const LocalField& K, const LPoly& G, std::int64_t cap) {
  int d = static_cast<int>(G.size()) - 1;
  require(d >= 1, ErrorKind::NotEisenstein, kMod, "step polynomial must have degree >= 1");
  for (int i = 0; i < d; ++i) {
    std::int64_t v = G[i].zero ? G[i].val : G[i].val;
    require(v >= 1, ErrorKind::NotEisenstein, kMod, "step coefficient must have positive valuation");
    if (i == 0) require(!G[0].zero && G[0].val == 1, ErrorKind::NotEisenstein, kMod, "step constant term must have valuation one");
  }
  LElem lead = G[d] - K.one();
  require(lead.zero && lead.val >= K.cap() / 2, ErrorKind::NotEisenstein, kMod, "step polynomial must be monic");
  int eK = K.e(), f = K.f();
  int n = eK * d;
  int N = static_cast<int>((cap + n - 1) / n) + 3;
  detail::WRing W(K.p(), f, N, K.residue_field());
  auto reduceW = [&](WElem w) {
    for (auto& c : w) W.mod(c);
    return w;
  };
  std::vector<WElem> E;
  if (eK == 1) {
    for (int i = 0; i <= d; ++i) {
      Coeffs c = K.to_coeffs(G[i]);
      E.push_back(reduceW(WElem(c.begin(), c.begin() + f)));
    }
    for (int i = 0; i < d; ++i)
      require(W.valuation(E[i]) >= 1, ErrorKind::NotEisenstein, kMod, "step polynomial is not Eisenstein");
    require(W.valuation(E[0]) == 1, ErrorKind::NotEisenstein, kMod, "step polynomial is not Eisenstein");
    auto L = std::make_shared<const LocalField>(W, std::vector<WElem>(E.begin(), E.end() - 1), cap);
    return {L, L->from_int(K.p())};
  }
  // basis index b*eK + a for pi_K^a theta^b
  WMatrix T(n, std::vector<WElem>(n, W.zero()));
  for (int b = 0; b < d; ++b)
    for (int a = 0; a < eK; ++a) {
      int col = b * eK + a;
      if (b + 1 < d) {
        T[(b + 1) * eK + a][col] = W.one();
        continue;
      }
      for (int j = 0; j < d; ++j) {
        LElem c = K.neg(K.mul(K.pi_pow(a), G[j]));
        Coeffs cc = K.to_coeffs(c);
        for (int a2 = 0; a2 < eK; ++a2)
          T[j * eK + a2][col] = reduceW(WElem(cc.begin() + a2 * f, cc.begin() + (a2 + 1) * f));
      }
    }
  E = charpoly(T, W);
  for (int i = 0; i < n; ++i)
    require(W.valuation(E[i]) >= 1, ErrorKind::NotEisenstein, kMod, "flattened polynomial is not Eisenstein");
  require(W.valuation(E[0]) == 1, ErrorKind::NotEisenstein, kMod, "flattened polynomial is not Eisenstein");
  auto L = std::make_shared<const LocalField>(W, std::vector<WElem>(E.begin(), E.end() - 1), cap);
  // columns theta^k in the tower basis; solve for pi_K
  WMatrix C(n, std::vector<WElem>(n, W.zero()));
  std::vector<WElem> v(n, W.zero());
  v[0] = W.one();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) C[i][k] = v[i];
    std::vector<WElem> nv(n, W.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!W.is_zero(T[i][j]) && !W.is_zero(v[j])) nv[i] = W.add(nv[i], W.mul(T[i][j], v[j]));
    v = std::move(nv);
  }
  std::vector<WElem> rhs(n, W.zero());
  rhs[1] = W.one();
  auto x = solve_w(C, rhs, W);
  Coeffs xc;
  for (const auto& w : x) xc.insert(xc.end(), w.begin(), w.end());
  return {L, L->from_coeffs(xc)};
}

// Coefficients of Phi_{p^a}(x+1), low to high.
std::vector<mpz_class> shifted_cyclotomic(std::int64_t p, int a) {
  std::int64_t pa1 = 1;
  for (int i = 1; i < a; ++i) pa1 *= p;
  std::int64_t deg = pa1 * (p - 1);
  std::vector<mpz_class> c(deg + 1);
  for (std::int64_t k = 0; k < p; ++k) {
    std::int64_t m = k * pa1;
    for (std::int64_t i = 0; i <= m; ++i) {
      mpz_class b;
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(i));
      c[i] += b;
    }
  }
  return c;
}

std::int64_t ipow(std::int64_t b, int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

int mult_order(std::int64_t p, std::int64_t m) {
  if (m == 1) return 1;
  std::int64_t x = p % m;
  int k = 1;
  while (x != 1) {
    x = x * p % m;
    ++k;
  }
  return k;
}

}  // namespace

int CatalogEntry::degree(std::int64_t p) const { return f * ramification(p); }

int CatalogEntry::ramification(std::int64_t p) const {
  int e1 = a == 0 ? 1 : static_cast<int>(ipow(p, a - 1) * (p - 1));
  return e1 * e_rad;
}

std::string CatalogEntry::describe(std::int64_t p) const {
  std::ostringstream os;
  os << "Q_" << p << "(unramified degree " << f;
  if (a > 0) os << ", zeta_" << ipow(p, a);
  if (e_rad > 1) os << ", (u_" << u_index << "*" << p << ")^(1/" << e_rad << ")";
  os << ")";
  return os.str();
}

std::vector<CatalogEntry> catalog_candidates(std::int64_t p, const CatalogBounds& bounds) {
  std::vector<CatalogEntry> out;
  std::vector<int> avals{0};
  for (int a = 2; ipow(p, a) <= bounds.max_cyclotomic; ++a) avals.push_back(a);
  for (int a : avals) {
    std::int64_t pa = a == 0 ? 1 : ipow(p, a);
    int e1 = a == 0 ? 1 : static_cast<int>(ipow(p, a - 1) * (p - 1));
    std::vector<int> fs;
    for (std::int64_t m = 1; m * pa <= bounds.max_cyclotomic; ++m) {
      if (m % p == 0) continue;
      int f = mult_order(p, m);
      if (std::find(fs.begin(), fs.end(), f) == fs.end()) fs.push_back(f);
    }
    for (int f : fs) {
      // residue fields must stay inside 64-bit arithmetic
      double logq = f * std::log2(static_cast<double>(p));
      if (logq >= 62) continue;
      std::uint64_t q1 = static_cast<std::uint64_t>(ipow(p, f)) - 1;
      for (int e2 = 1; f * e1 * e2 <= bounds.max_degree; ++e2) {
        if (e2 % p == 0) continue;
        if (std::gcd(e2, e1) != 1) continue;
        int classes = static_cast<int>(std::gcd(static_cast<std::uint64_t>(e2), q1));
        for (int u = 0; u < classes; ++u) out.push_back({f, a, e2, u});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [p](const CatalogEntry& x, const CatalogEntry& y) {
    auto kx = std::make_tuple(x.degree(p), x.f, x.a, x.e_rad, x.u_index);
    auto ky = std::make_tuple(y.degree(p), y.f, y.a, y.e_rad, y.u_index);
    return kx < ky;
  });
  return out;
}

LFieldPtr build_catalog_field(std::int64_t p, const CatalogEntry& entry, std::int64_t cap) {
  FieldPtr F = FqField::make(p, entry.f);
  const int f = entry.f;
  auto wconst = [f](const mpz_class& c) {
    WElem w(f);
    w[0] = c;
    return w;
  };
  // u = lift of g^u_index
  WElem u(f);
  {
    Fq g = F->pow(F->primitive(), static_cast<std::uint64_t>(entry.u_index));
    auto c = F->coeffs(g);
    for (int j = 0; j < f && j < static_cast<int>(c.size()); ++j) u[j] = static_cast<long>(c[j]);
  }
  if (entry.a == 0) {
    int e = entry.e_rad;
    std::vector<WElem> E(e + 1, WElem(f));
    if (e == 1) {
      E[0] = wconst(-p);
    } else {
      for (int j = 0; j < f; ++j) E[0][j] = -u[j] * p;
    }
    E[e] = wconst(1);
    return LocalField::make(p, f, std::nullopt, E, cap);
  }
  auto cyc = shifted_cyclotomic(p, entry.a);
  int e1 = static_cast<int>(cyc.size()) - 1;
  std::vector<WElem> E1;
  for (const auto& c : cyc) E1.push_back(wconst(c));
  if (entry.e_rad == 1) return LocalField::make(p, f, std::nullopt, E1, cap);
  int e2 = entry.e_rad;
  std::int64_t NL = (cap + e1 * e2 - 1) / (e1 * e2) + 3;
  auto K1 = LocalField::make(p, f, std::nullopt, E1, e1 * (NL + 4));
  // theta = alpha^s pi1^t with alpha^e2 = u p and s e1 + t e2 = 1
  int s = 1;
  while ((static_cast<std::int64_t>(s) * e1) % e2 != 1) ++s;
  std::int64_t t = (1 - static_cast<std::int64_t>(s) * e1) / e2;
  LElem up = K1->mul(K1->from_w(u), K1->from_int(p));
  LElem c = K1->mul(K1->pow(up, s), K1->pi_pow(t * e2));
  LPoly G(e2 + 1, K1->zero());
  G[0] = K1->neg(c);
  G[e2] = K1->one();
  return flatten(*K1, G, cap).L;
}

LFieldPtr build_tower(std::int64_t p, int f, std::optional<std::vector<std::int64_t>> residue_modulus,
                      const std::vector<TowerStep>& steps, std::int64_t cap) {
  require(cap >= 4, ErrorKind::PrecisionTooLow, kMod, "precision must be at least 4 digits");
  std::int64_t e_total = 1;
  for (const auto& s : steps) e_total *= static_cast<std::int64_t>(s.coeffs.size()) - 1;
  require(e_total >= 1, ErrorKind::NotEisenstein, kMod, "step polynomial must have degree >= 1");
  std::int64_t N = (cap + e_total - 1) / e_total + 3;
  auto wconst = [f](std::int64_t c) {
    WElem w(f);
    w[0] = c;
    return w;
  };
  // the base W as a degree-one "Eisenstein" extension pi = p
  LFieldPtr K = LocalField::make(p, f, residue_modulus, {wconst(-p), wconst(1)}, (N + 4));
  for (size_t k = 0; k < steps.size(); ++k) {
    bool last = k + 1 == steps.size();
    std::int64_t e_next = K->e() * (static_cast<std::int64_t>(steps[k].coeffs.size()) - 1);
    std::int64_t step_cap = last ? cap : e_next * (N + 4);
    LPoly G;
    for (const auto& enc : steps[k].coeffs) {
      std::vector<WElem> parts = enc;
      Coeffs c(K->e() * f);
      require(static_cast<int>(parts.size()) <= K->e() || K->e() == 1, ErrorKind::Validation, kMod,
              "step coefficient has more terms than the base degree");
      LElem x = K->zero();
      LElem pw = K->one();
      for (const auto& w : parts) {
        WElem ww(f);
        for (int j = 0; j < f && j < static_cast<int>(w.size()); ++j) ww[j] = w[j];
        x = K->add(x, K->mul(K->from_w(ww), pw));
        pw = K->mul(pw, K->pi());
      }
      G.push_back(x);
    }
    K = flatten(*K, G, step_cap).L;
  }
  if (steps.empty()) K = LocalField::make(p, f, residue_modulus, {wconst(-p), wconst(1)}, cap);
  return K;
}

SplitResult splitting_field(const std::vector<mpq_class>& g, std::int64_t p, const CatalogBounds& bounds,
                            std::optional<std::int64_t> cap) {
  for (const auto& entry : catalog_candidates(p, bounds)) {
    std::int64_t c = cap ? *cap : 50 * entry.ramification(p);
    auto L = build_catalog_field(p, entry, c);
    auto roots = split_in(*L, g);
    if (roots) return {L, entry, std::move(*roots)};
  }
  fail(ErrorKind::CatalogExhausted, kMod, "no catalog field splits the polynomial; supply an explicit tower");
}

std::optional<SemistableCandidate> next_semistabilizing_field(const std::vector<mpq_class>& g, std::int64_t p,
                                                              int n, const CatalogEntry& L0,
                                                              const CatalogBounds& bounds, std::size_t start,
                                                              std::optional<std::int64_t> cap) {
  auto cands = catalog_candidates(p, bounds);
  int e0 = L0.ramification(p);
  int need_e = std::lcm(n, e0);
  int need_f = std::lcm(L0.f, mult_order(p, n));
  std::vector<mpq_class> radical(n + 1);
  radical[0] = -p;
  radical[n] = 1;
  for (std::size_t idx = start; idx < cands.size(); ++idx) {
    const auto& entry = cands[idx];
    int e = entry.ramification(p);
    if (e % need_e != 0 || (n * e0) % e != 0 || entry.f % need_f != 0) continue;
    std::int64_t c = cap ? *cap : 50 * e;
    auto L = build_catalog_field(p, entry, c);
    auto roots = split_in(*L, g);
    if (!roots) continue;
    LPoly rad = lpoly_from_rational(*L, radical);
    if (lpoly_roots(rad).empty()) continue;
    std::shared_ptr<GaloisGroup> G;
    try {
      G = std::make_shared<GaloisGroup>(L);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::NotGalois) continue;
      throw;
    }
    return SemistableCandidate{L, entry, std::move(*roots), G, idx};
  }
  return std::nullopt;
}

}  // namespace ssr
