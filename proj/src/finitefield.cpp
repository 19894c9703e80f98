#include "ssr/finitefield.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr const char* kMod = "finitefield";
constexpr std::uint64_t kTableLimit = 1u << 21;

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (b != 0 && r > UINT64_MAX / b) fail(ErrorKind::Validation, kMod, "field size overflows 64 bits");
    r *= b;
  }
  return r;
}

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t fnv1a(const std::vector<std::uint64_t>& words) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint64_t w : words) {
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

bool miller_rabin(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = 1, b = a % n, e = d;
    while (e) {
      if (e & 1) x = mulmod_u64(x, b, n);
      b = mulmod_u64(b, b, n);
      e >>= 1;
    }
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t pollard_rho(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t x = 2, y = 2, d = 1;
    auto f = [&](std::uint64_t v) { return (mulmod_u64(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  for (std::uint64_t p = 2; p < 1000 && p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n == 1) return;
  if (miller_rabin(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// FqField

FqField::FqField(std::int64_t p, int k, std::vector<std::int64_t> modulus)
    : p_(p), k_(k), q_(ipow(static_cast<std::uint64_t>(p), k)), modulus_(std::move(modulus)) {
  if (q_ <= (1u << 16)) ensure_tables();
}

const std::vector<std::uint64_t>& FqField::qfactors() const {
  std::call_once(factors_once_, [this] { qfactors_ = prime_factors(q_ - 1); });
  return qfactors_;
}

namespace {

// Rabin irreducibility test for a monic polynomial over the prime field.
bool rabin_irreducible(const FieldPtr& Fp, const std::vector<std::int64_t>& m) {
  FqPoly f = FqPoly::from_ints(Fp, m);
  int n = f.deg();
  if (n <= 1) return n == 1;
  FqPoly x = FqPoly::x(Fp);
  mpz_class q(static_cast<unsigned long>(Fp->p()));
  std::vector<FqPoly> frob_pows{x % f};
  for (int i = 1; i <= n; ++i) frob_pows.push_back(poly_powmod(frob_pows.back(), q, f));
  if (frob_pows[n] != x % f) return false;
  for (std::uint64_t r : prime_factors(static_cast<std::uint64_t>(n))) {
    FqPoly g = poly_gcd(frob_pows[n / r] - x, f);
    if (g.deg() > 0) return false;
  }
  return true;
}

std::mutex g_cache_mutex;
std::map<std::tuple<std::int64_t, std::vector<std::int64_t>>, FieldPtr>& field_cache() {
  static std::map<std::tuple<std::int64_t, std::vector<std::int64_t>>, FieldPtr> cache;
  return cache;
}
std::map<std::pair<std::int64_t, int>, std::vector<std::int64_t>>& default_modulus_cache() {
  static std::map<std::pair<std::int64_t, int>, std::vector<std::int64_t>> cache;
  return cache;
}

FieldPtr cached_field(std::int64_t p, const std::vector<std::int64_t>& modulus) {
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = field_cache().find({p, modulus});
    if (it != field_cache().end()) return it->second;
  }
  auto F = std::make_shared<const FqField>(p, static_cast<int>(modulus.size()) - 1, modulus);
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto [it, inserted] = field_cache().emplace(std::make_tuple(p, modulus), F);
  return it->second;
}

}  // namespace

FieldPtr FqField::make(std::int64_t p, int k, std::optional<std::vector<std::int64_t>> modulus) {
  if (!is_prime(p)) fail(ErrorKind::NonPrime, kMod, std::to_string(p) + " is not prime");
  if (k < 1) fail(ErrorKind::Validation, kMod, "extension degree must be positive");
  ipow(static_cast<std::uint64_t>(p), k);  // overflow check
  FieldPtr Fp = cached_field(p, {0, 1});
  if (k == 1 && !modulus) return Fp;

  if (modulus) {
    std::vector<std::int64_t> m = *modulus;
    if (static_cast<int>(m.size()) != k + 1)
      fail(ErrorKind::ReducibleModulus, kMod, "modulus has wrong degree");
    for (auto& c : m) c = mod_pos(c, p);
    if (m.back() != 1) fail(ErrorKind::ReducibleModulus, kMod, "modulus is not monic");
    if (!rabin_irreducible(Fp, m)) fail(ErrorKind::ReducibleModulus, kMod, "modulus is reducible");
    return cached_field(p, m);
  }

  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = default_modulus_cache().find({p, k});
    if (it != default_modulus_cache().end()) {
      auto jt = field_cache().find({p, it->second});
      if (jt != field_cache().end()) return jt->second;
    }
  }
  // Enumerate (c0, ..., c_{k-1}) lexicographically with c0 most significant.
  std::uint64_t total = ipow(static_cast<std::uint64_t>(p), k);
  std::uint64_t top = total / static_cast<std::uint64_t>(p);
  for (std::uint64_t idx = top; idx < total; ++idx) {  // c0 = 0 is never irreducible for k >= 2
    std::vector<std::int64_t> m(k + 1, 0);
    std::uint64_t rest = idx;
    for (int i = k - 1; i >= 0; --i) {
      m[k - 1 - i] = static_cast<std::int64_t>(rest / ipow(static_cast<std::uint64_t>(p), i));
      rest %= ipow(static_cast<std::uint64_t>(p), i);
    }
    m[k] = 1;
    if (rabin_irreducible(Fp, m)) {
      {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        default_modulus_cache()[{p, k}] = m;
      }
      return cached_field(p, m);
    }
  }
  fail(ErrorKind::Internal, kMod, "no irreducible polynomial found");
}

Fq FqField::from_int(std::int64_t a) const { return static_cast<Fq>(mod_pos(a, p_)); }

Fq FqField::from_coeffs(const std::vector<std::int64_t>& c) const {
  std::vector<std::int64_t> r(c.begin(), c.end());
  // Reduce modulo the defining polynomial when more than k coefficients are given.
  for (int i = static_cast<int>(r.size()) - 1; i >= k_; --i) {
    std::int64_t top = mod_pos(r[i], p_);
    if (top == 0) continue;
    for (int j = 0; j < k_; ++j) r[i - k_ + j] = mod_pos(r[i - k_ + j] - top * modulus_[j], p_);
    r[i] = 0;
  }
  Fq out = 0, base = 1;
  for (int i = 0; i < k_ && i < static_cast<int>(r.size()); ++i) {
    out += static_cast<Fq>(mod_pos(r[i], p_)) * base;
    base *= static_cast<Fq>(p_);
  }
  return out;
}

std::vector<std::int64_t> FqField::coeffs(Fq a) const {
  std::vector<std::int64_t> c(k_);
  for (int i = 0; i < k_; ++i) {
    c[i] = static_cast<std::int64_t>(a % static_cast<Fq>(p_));
    a /= static_cast<Fq>(p_);
  }
  return c;
}

Fq FqField::gen() const { return k_ == 1 ? from_int(-modulus_[0]) : static_cast<Fq>(p_); }

Fq FqField::neg(Fq a) const {
  if (p_ == 2) return a;
  if (k_ == 1) return a == 0 ? 0 : static_cast<Fq>(p_) - a;
  Fq out = 0, base = 1;
  const Fq P = static_cast<Fq>(p_);
  while (a) {
    Fq d = a % P;
    a /= P;
    out += ((P - d) % P) * base;
    base *= P;
  }
  return out;
}

Fq FqField::add(Fq a, Fq b) const {
  if (k_ == 1) {
    Fq s = a + b;
    return s >= static_cast<Fq>(p_) ? s - static_cast<Fq>(p_) : s;
  }
  if (p_ == 2) return a ^ b;
  if (has_tables() && !zech_.empty()) {
    if (a == 0) return b;
    if (b == 0) return a;
    std::uint64_t n = q_ - 1;
    std::uint64_t la = log_[a], lb = log_[b];
    std::uint64_t d = (lb + n - la) % n;
    std::uint32_t z = zech_[d];
    if (z == UINT32_MAX) return 0;
    return exp_[(la + z) % n];
  }
  const Fq P = static_cast<Fq>(p_);
  Fq out = 0, base = 1;
  while (a || b) {
    Fq d = a % P + b % P;
    if (d >= P) d -= P;
    out += d * base;
    a /= P;
    b /= P;
    base *= P;
  }
  return out;
}

Fq FqField::mul_slow(Fq a, Fq b) const {
  if (a == 0 || b == 0) return 0;
  if (k_ == 1) return mulmod_u64(a, b, static_cast<std::uint64_t>(p_));
  std::vector<std::int64_t> x = coeffs(a), y = coeffs(b), r(2 * k_ - 1, 0);
  for (int i = 0; i < k_; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < k_; ++j) r[i + j] = (r[i + j] + x[i] * y[j]) % p_;
  }
  return from_coeffs(r);
}

Fq FqField::mul(Fq a, Fq b) const {
  if (a == 0 || b == 0) return 0;
  if (k_ == 1) return mulmod_u64(a, b, static_cast<std::uint64_t>(p_));
  if (has_tables()) {
    std::uint64_t s = static_cast<std::uint64_t>(log_[a]) + log_[b];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  return mul_slow(a, b);
}

Fq FqField::pow(Fq a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (has_tables()) return exp_[mulmod_u64(log_[a], e % (q_ - 1), q_ - 1)];
  return pow_slow(a, e);
}

Fq FqField::pow_slow(Fq a, std::uint64_t e) const {
  Fq r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Fq FqField::pow(Fq a, const mpz_class& e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  mpz_class r = e % mpz_class(static_cast<unsigned long>(q_ - 1));
  if (r < 0) r += static_cast<unsigned long>(q_ - 1);
  return pow(a, static_cast<std::uint64_t>(r.get_ui()));
}

Fq FqField::inv(Fq a) const {
  if (a == 0) fail(ErrorKind::Internal, kMod, "division by zero in finite field");
  if (has_tables()) return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  return pow(a, q_ - 2);
}

Fq FqField::frob(Fq a, int j) const {
  j = static_cast<int>(mod_pos(j, k_));
  for (int i = 0; i < j; ++i) a = pow(a, static_cast<std::uint64_t>(p_));
  return a;
}

std::uint64_t FqField::order(Fq a) const {
  if (a == 0) fail(ErrorKind::Internal, kMod, "order of zero");
  std::uint64_t o = q_ - 1;
  for (std::uint64_t r : qfactors()) {
    while (o % r == 0 && pow(a, o / r) == 1) o /= r;
  }
  return o;
}

bool FqField::is_power(Fq u, std::uint64_t d) const {
  if (u == 0) return true;
  std::uint64_t g = std::gcd(d, q_ - 1);
  return pow(u, (q_ - 1) / g) == 1;
}

Fq FqField::primitive() const {
  if (has_tables()) return prim_;
  if (q_ == 2) return 1;
  for (Fq a = 2; a < q_; ++a) {
    bool ok = true;
    for (std::uint64_t r : qfactors())
      if (pow_slow(a, (q_ - 1) / r) == 1) {
        ok = false;
        break;
      }
    if (ok) return a;
  }
  fail(ErrorKind::Internal, kMod, "no primitive element");
}

bool FqField::ensure_tables() const {
  if (q_ > kTableLimit) return false;
  std::call_once(tables_once_, [this] {
    // mul/pow below must not consult the tables while they are being filled
    Fq g = primitive();
    std::vector<std::uint32_t> ex(q_ - 1, 0), lg(q_, 0), zc;
    Fq x = 1;
    for (std::uint64_t i = 0; i + 1 < q_; ++i) {
      ex[i] = static_cast<std::uint32_t>(x);
      lg[x] = static_cast<std::uint32_t>(i);
      x = mul_slow(x, g);
    }
    if (k_ > 1 && p_ != 2) {
      zc.assign(q_ - 1, 0);
      const Fq P = static_cast<Fq>(p_);
      for (std::uint64_t i = 0; i + 1 < q_; ++i) {
        // 1 + g^i: increment the constant digit.
        Fq e = ex[i];
        Fq low = e % P;
        Fq s = e - low + (low + 1) % P;
        zc[i] = s == 0 ? UINT32_MAX : lg[s];
      }
    }
    prim_ = g;
    exp_ = std::move(ex);
    log_ = std::move(lg);
    zech_ = std::move(zc);
    tables_ready_.store(true, std::memory_order_release);
  });
  return true;
}

std::string FqField::to_string(Fq a) const {
  if (k_ == 1) return std::to_string(a);
  auto c = coeffs(a);
  std::ostringstream os;
  bool first = true;
  for (int i = k_ - 1; i >= 0; --i) {
    if (c[i] == 0) continue;
    if (!first) os << "+";
    first = false;
    if (i == 0 || c[i] != 1) os << c[i];
    if (i >= 1) os << "t";
    if (i >= 2) os << "^" << i;
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// Polynomials

FqPoly::FqPoly(FieldPtr f, std::vector<Fq> coeffs) : F(std::move(f)), c(std::move(coeffs)) { trim(); }

FqPoly FqPoly::from_ints(FieldPtr f, const std::vector<std::int64_t>& c) {
  std::vector<Fq> v;
  v.reserve(c.size());
  for (auto x : c) v.push_back(f->from_int(x));
  return FqPoly(std::move(f), std::move(v));
}

void FqPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

std::string FqPoly::to_string(const std::string& var) const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = deg(); i >= 0; --i) {
    if (c[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    std::string coef = F->to_string(c[i]);
    bool compound = coef.find('+') != std::string::npos;
    if (i == 0) {
      os << coef;
      continue;
    }
    if (c[i] != 1) os << (compound ? "(" + coef + ")" : coef) << "*";
    os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

FqPoly operator+(const FqPoly& a, const FqPoly& b) {
  const FieldPtr& F = a.F ? a.F : b.F;
  std::vector<Fq> r(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = F->add(a.coeff(static_cast<int>(i)), b.coeff(static_cast<int>(i)));
  return FqPoly(F, std::move(r));
}

FqPoly operator-(const FqPoly& a, const FqPoly& b) {
  const FieldPtr& F = a.F ? a.F : b.F;
  std::vector<Fq> r(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = F->sub(a.coeff(static_cast<int>(i)), b.coeff(static_cast<int>(i)));
  return FqPoly(F, std::move(r));
}

FqPoly operator*(const FqPoly& a, const FqPoly& b) {
  const FieldPtr& F = a.F ? a.F : b.F;
  if (a.is_zero() || b.is_zero()) return FqPoly(F, {});
  std::vector<Fq> r(a.c.size() + b.c.size() - 1, 0);
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == 0) continue;
    for (size_t j = 0; j < b.c.size(); ++j) r[i + j] = F->add(r[i + j], F->mul(a.c[i], b.c[j]));
  }
  return FqPoly(F, std::move(r));
}

FqPoly poly_scale(const FqPoly& a, Fq s) {
  std::vector<Fq> r(a.c.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = a.F->mul(a.c[i], s);
  return FqPoly(a.F, std::move(r));
}

std::pair<FqPoly, FqPoly> poly_divmod(const FqPoly& a, const FqPoly& b) {
  if (b.is_zero()) fail(ErrorKind::ZeroPolynomial, kMod, "polynomial division by zero");
  const FieldPtr& F = b.F;
  if (a.deg() < b.deg()) return {FqPoly(F, {}), a};
  std::vector<Fq> r = a.c, qv(a.c.size() - b.c.size() + 1, 0);
  Fq il = F->inv(b.lc());
  int db = b.deg();
  for (int i = a.deg(); i >= db; --i) {
    Fq t = F->mul(r[i], il);
    qv[i - db] = t;
    if (t == 0) continue;
    for (int j = 0; j <= db; ++j) r[i - db + j] = F->sub(r[i - db + j], F->mul(t, b.c[j]));
  }
  r.resize(db);
  return {FqPoly(F, std::move(qv)), FqPoly(F, std::move(r))};
}

FqPoly operator/(const FqPoly& a, const FqPoly& b) { return poly_divmod(a, b).first; }
FqPoly operator%(const FqPoly& a, const FqPoly& b) { return poly_divmod(a, b).second; }

FqPoly poly_monic(const FqPoly& a) {
  if (a.is_zero()) return a;
  return poly_scale(a, a.F->inv(a.lc()));
}

FqPoly poly_gcd(const FqPoly& a, const FqPoly& b) {
  FqPoly x = a, y = b;
  while (!y.is_zero()) {
    FqPoly r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return poly_monic(x);
}

FqPoly poly_deriv(const FqPoly& a) {
  if (a.deg() < 1) return FqPoly(a.F, {});
  std::vector<Fq> r(a.c.size() - 1);
  for (size_t i = 1; i < a.c.size(); ++i) r[i - 1] = a.F->mul(a.c[i], a.F->from_int(static_cast<std::int64_t>(i)));
  return FqPoly(a.F, std::move(r));
}

FqPoly poly_pow(const FqPoly& a, std::uint64_t e) {
  FqPoly r = FqPoly::constant(a.F, 1), b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

FqPoly poly_powmod(const FqPoly& a, const mpz_class& e, const FqPoly& m) {
  FqPoly r = FqPoly::constant(m.F, 1) % m, b = a % m;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    r = (r * r) % m;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = (r * b) % m;
  }
  return r;
}

FqPoly poly_compose(const FqPoly& a, const FqPoly& b) {
  FqPoly r(b.F ? b.F : a.F, {});
  for (int i = a.deg(); i >= 0; --i) r = r * b + FqPoly::constant(a.F, a.c[i]);
  return r;
}

FqPoly poly_frob(const FqPoly& a, int j) {
  std::vector<Fq> r(a.c.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = a.F->frob(a.c[i], j);
  return FqPoly(a.F, std::move(r));
}

Fq poly_eval(const FqPoly& a, Fq x) {
  Fq r = 0;
  for (int i = a.deg(); i >= 0; --i) r = a.F->add(a.F->mul(r, x), a.c[i]);
  return r;
}

bool poly_lex_less(const FqPoly& a, const FqPoly& b) {
  if (a.deg() != b.deg()) return a.deg() < b.deg();
  return a.c < b.c;
}

// ---------------------------------------------------------------------------
// Factorization

namespace {

FqPoly pth_root(const FqPoly& f) {
  const FqField& F = *f.F;
  std::vector<Fq> r(f.deg() / F.p() + 1, 0);
  for (int i = 0; i <= f.deg(); i += static_cast<int>(F.p())) r[i / F.p()] = F.frob(f.c[i], F.k() - 1);
  return FqPoly(f.F, std::move(r));
}

void squarefree_rec(const FqPoly& f, int mult, Factorization& out) {
  if (f.deg() <= 0) return;
  FqPoly d = poly_deriv(f);
  int p = static_cast<int>(f.F->p());
  if (d.is_zero()) {
    squarefree_rec(pth_root(f), mult * p, out);
    return;
  }
  FqPoly c = poly_gcd(f, d);
  FqPoly w = f / c;
  int i = 1;
  while (w.deg() > 0) {
    FqPoly y = poly_gcd(w, c);
    FqPoly z = w / y;
    if (z.deg() > 0) out.push_back({poly_monic(z), i * mult});
    ++i;
    w = y;
    c = c / y;
  }
  if (c.deg() > 0) squarefree_rec(pth_root(poly_monic(c)), mult * p, out);
}

std::vector<std::pair<FqPoly, int>> distinct_degree(FqPoly f) {
  std::vector<std::pair<FqPoly, int>> out;
  FqPoly x = FqPoly::x(f.F);
  mpz_class q(static_cast<unsigned long>(f.F->q()));
  FqPoly h = x % f;
  int d = 0;
  while (f.deg() >= 2 * (d + 1)) {
    ++d;
    h = poly_powmod(h, q, f);
    FqPoly g = poly_gcd(h - x, f);
    if (g.deg() > 0) {
      out.push_back({g, d});
      f = f / g;
      h = h % f;
    }
  }
  if (f.deg() > 0) out.push_back({poly_monic(f), f.deg()});
  return out;
}

void equal_degree(const FqPoly& f, int d, std::mt19937_64& rng, std::vector<FqPoly>& out) {
  if (f.deg() == d) {
    out.push_back(f);
    return;
  }
  const FqField& F = *f.F;
  std::uniform_int_distribution<std::uint64_t> coef(0, F.q() - 1);
  mpz_class qd;
  mpz_ui_pow_ui(qd.get_mpz_t(), static_cast<unsigned long>(F.q()), static_cast<unsigned long>(d));
  for (;;) {
    std::vector<Fq> a(f.deg());
    for (auto& x : a) x = coef(rng);
    FqPoly ap(f.F, a);
    if (ap.deg() < 1) continue;
    FqPoly b;
    if (F.p() == 2) {
      FqPoly t = ap % f, s = t;
      for (int i = 1; i < F.k() * d; ++i) {
        t = (t * t) % f;
        s = s + t;
      }
      b = s;
    } else {
      b = poly_powmod(ap, (qd - 1) / 2, f) - FqPoly::constant(f.F, 1);
    }
    FqPoly g = poly_gcd(b, f);
    if (g.deg() > 0 && g.deg() < f.deg()) {
      equal_degree(g, d, rng, out);
      equal_degree(poly_monic(f / g), d, rng, out);
      return;
    }
  }
}

}  // namespace

Factorization factor_poly(const FqPoly& g) {
  if (g.is_zero()) fail(ErrorKind::ZeroPolynomial, kMod, "cannot factor the zero polynomial");
  Factorization out;
  if (g.deg() == 0) return out;
  FqPoly f = poly_monic(g);
  std::vector<std::uint64_t> seed_words{static_cast<std::uint64_t>(f.F->p()), static_cast<std::uint64_t>(f.F->k())};
  seed_words.insert(seed_words.end(), f.c.begin(), f.c.end());
  std::mt19937_64 rng(fnv1a(seed_words));

  Factorization sqf;
  squarefree_rec(f, 1, sqf);
  for (auto& [part, mult] : sqf) {
    for (auto& [block, d] : distinct_degree(part)) {
      std::vector<FqPoly> irr;
      equal_degree(block, d, rng, irr);
      for (auto& P : irr) out.push_back({P, mult});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return poly_lex_less(a.first, b.first); });
  return out;
}

bool is_irreducible(const FqPoly& g) {
  if (g.deg() < 1) return false;
  auto fac = factor_poly(g);
  return fac.size() == 1 && fac[0].second == 1;
}

std::vector<Fq> poly_roots(const FqPoly& g) {
  std::vector<Fq> r;
  for (auto& [P, e] : factor_poly(g))
    if (P.deg() == 1) r.push_back(P.F->neg(P.c[0]));
  std::sort(r.begin(), r.end());
  return r;
}

// ---------------------------------------------------------------------------
// Rational functions

RatFunc RatFunc::make(FqPoly num, FqPoly den) {
  if (den.is_zero()) fail(ErrorKind::ZeroPolynomial, kMod, "zero denominator");
  if (num.is_zero()) return RatFunc{num, FqPoly::constant(den.F, 1)};
  FqPoly g = poly_gcd(num, den);
  if (g.deg() > 0) {
    num = num / g;
    den = den / g;
  }
  Fq il = den.F->inv(den.lc());
  return RatFunc{poly_scale(num, il), poly_scale(den, il)};
}

RatFunc RatFunc::poly(FqPoly num) {
  FieldPtr F = num.F;
  return RatFunc{std::move(num), FqPoly::constant(F, 1)};
}

std::string RatFunc::to_string(const std::string& var) const {
  if (den.is_one()) return num.to_string(var);
  return "(" + num.to_string(var) + ")/(" + den.to_string(var) + ")";
}

RatFunc operator*(const RatFunc& a, const RatFunc& b) { return RatFunc::make(a.num * b.num, a.den * b.den); }

RatFunc rat_inv(const RatFunc& a) {
  if (a.is_zero()) fail(ErrorKind::ZeroFunction, kMod, "inverse of zero function");
  return RatFunc::make(a.den, a.num);
}

RatFunc rat_pow(const RatFunc& a, std::int64_t e) {
  RatFunc b = e < 0 ? rat_inv(a) : a;
  std::uint64_t m = static_cast<std::uint64_t>(e < 0 ? -e : e);
  return RatFunc{poly_pow(b.num, m), poly_pow(b.den, m)};
}

SignedFactorization signed_factor(const RatFunc& h) {
  if (h.is_zero()) fail(ErrorKind::ZeroFunction, kMod, "zero function has no factorization");
  SignedFactorization sf;
  sf.unit = h.num.lc();
  for (auto& [P, e] : factor_poly(h.num)) sf.factors.push_back({P, e});
  for (auto& [P, e] : factor_poly(h.den)) sf.factors.push_back({P, -e});
  std::sort(sf.factors.begin(), sf.factors.end(),
            [](const auto& a, const auto& b) { return poly_lex_less(a.first, b.first); });
  return sf;
}

PowerClassData power_class(const RatFunc& h, int n) {
  if (h.is_zero()) fail(ErrorKind::ZeroFunction, kMod, "power class of the zero function");
  const FieldPtr& F = h.num.F;
  if (n % F->p() == 0)
    fail(ErrorKind::CharacteristicDividesExponent, kMod, "exponent divisible by the characteristic");
  SignedFactorization sf = signed_factor(h);
  PowerClassData out;
  out.n = n;
  for (int d = n; d >= 1; --d) {
    if (n % d) continue;
    bool ok = F->is_power(sf.unit, static_cast<std::uint64_t>(d));
    for (auto& [P, a] : sf.factors) ok = ok && (a % d == 0);
    if (!ok) continue;
    out.d_max = d;
    out.n_v = n / d;
    if (d > 1) {
      std::vector<Fq> xd(d + 1, 0);
      xd[0] = F->neg(sf.unit);
      xd[d] = 1;
      auto roots = poly_roots(FqPoly(F, xd));
      if (roots.empty()) fail(ErrorKind::Internal, kMod, "d-th root of a d-th power not found");
      RatFunc w = RatFunc::poly(FqPoly::constant(F, roots.front()));
      for (auto& [P, a] : sf.factors) w = w * rat_pow(RatFunc::poly(P), a / d);
      out.witness = w;
    }
    return out;
  }
  return out;
}

int geometric_power_index(const RatFunc& h, int nbar) {
  SignedFactorization sf = signed_factor(h);
  int D = nbar;
  for (auto& [P, a] : sf.factors) D = std::gcd(D, std::abs(a));
  return D;
}

FqPoly normalize_kummer_equation(int nbar, const RatFunc& h) {
  SignedFactorization sf = signed_factor(h);
  FqPoly out = FqPoly::constant(h.num.F, sf.unit);
  for (auto& [P, a] : sf.factors) {
    int r = static_cast<int>(mod_pos(a, nbar));
    if (r) out = out * poly_pow(P, static_cast<std::uint64_t>(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

FieldEmbedding::FieldEmbedding(FieldPtr src, FieldPtr dst) : src_(std::move(src)), dst_(std::move(dst)) {
  if (src_->p() != dst_->p() || dst_->k() % src_->k() != 0)
    fail(ErrorKind::Internal, kMod, "no embedding between these fields");
  if (src_->same_as(*dst_)) {
    root_ = dst_->gen();
  } else {
    auto roots = poly_roots(FqPoly::from_ints(dst_, src_->modulus()));
    if (roots.empty()) fail(ErrorKind::Internal, kMod, "modulus has no root in the target field");
    root_ = roots.front();
  }
  if (src_->q() <= (1u << 16)) {
    table_.resize(src_->q());
    for (Fq a = 0; a < src_->q(); ++a) {
      auto c = src_->coeffs(a);
      Fq r = 0;
      for (int i = src_->k() - 1; i >= 0; --i) r = dst_->add(dst_->mul(r, root_), dst_->from_int(c[i]));
      table_[a] = r;
    }
  }
}

Fq FieldEmbedding::operator()(Fq a) const {
  if (!table_.empty()) return table_[a];
  auto c = src_->coeffs(a);
  Fq r = 0;
  for (int i = src_->k() - 1; i >= 0; --i) r = dst_->add(dst_->mul(r, root_), dst_->from_int(c[i]));
  return r;
}

FqPoly FieldEmbedding::operator()(const FqPoly& a) const {
  std::vector<Fq> r(a.c.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = (*this)(a.c[i]);
  return FqPoly(dst_, std::move(r));
}

// ---------------------------------------------------------------------------
// Point counting

std::uint64_t count_kummer_points(int nbar, const RatFunc& h, int i, std::uint64_t bound) {
  if (h.is_zero()) fail(ErrorKind::ZeroFunction, kMod, "cannot count points on z^n = 0");
  const FieldPtr& F = h.num.F;
  if (nbar % F->p() == 0)
    fail(ErrorKind::CharacteristicDividesExponent, kMod, "exponent divisible by the characteristic");
  if (i < 1) fail(ErrorKind::Internal, kMod, "extension degree must be positive");
  std::uint64_t Q = 1;
  for (int j = 0; j < i && Q <= bound; ++j) Q = Q > bound / F->q() + 1 ? bound + 1 : Q * F->q();
  if (Q > bound)
    fail(ErrorKind::CountingBoundExceeded, kMod,
         "counting over a field of size " + std::to_string(Q) + " exceeds the configured bound");
  if (nbar == 1) return Q + 1;

  FieldPtr E = i == 1 ? F : FqField::make(F->p(), F->k() * i);
  FieldEmbedding emb(F, E);
  SignedFactorization sf = signed_factor(h);
  std::vector<FqPoly> Ps, dPs;
  std::vector<int> as;
  for (auto& [P, a] : sf.factors) {
    Ps.push_back(emb(P));
    dPs.push_back(poly_deriv(Ps.back()));
    as.push_back(a);
  }
  const FqField& K = *E;
  const std::uint64_t n1 = Q - 1;
  Fq unit = emb(sf.unit);

  auto points_above = [&](int a, Fq u) -> std::uint64_t {
    std::uint64_t d = static_cast<std::uint64_t>(std::gcd(nbar, std::abs(a)));
    std::uint64_t g = std::gcd(d, n1);
    return K.is_power(u, g) ? g : 0;
  };

  std::uint64_t total = 0;
  int ainf = 0;
  for (size_t l = 0; l < Ps.size(); ++l) ainf -= as[l] * Ps[l].deg();
  total += points_above(ainf, unit);

  const bool logs = K.ensure_tables();
  std::vector<Fq> vals(Ps.size());
  for (Fq x = 0; x < Q; ++x) {
    int branch = -1;
    for (size_t l = 0; l < Ps.size(); ++l) {
      vals[l] = poly_eval(Ps[l], x);
      if (vals[l] == 0) branch = static_cast<int>(l);
    }
    if (branch >= 0) vals[branch] = poly_eval(dPs[branch], x);
    int a = branch >= 0 ? as[branch] : 0;
    std::uint64_t d = static_cast<std::uint64_t>(std::gcd(nbar, std::abs(a)));
    std::uint64_t g = std::gcd(d, n1);
    if (logs) {
      std::uint64_t lg = K.log(unit);
      for (size_t l = 0; l < Ps.size(); ++l) {
        std::int64_t e = as[l] % static_cast<std::int64_t>(g);
        lg += static_cast<std::uint64_t>(mod_pos(e, static_cast<std::int64_t>(g))) * K.log(vals[l]);
      }
      if (lg % g == 0) total += g;
    } else {
      Fq u = unit;
      for (size_t l = 0; l < Ps.size(); ++l) {
        Fq v = as[l] >= 0 ? vals[l] : K.inv(vals[l]);
        u = K.mul(u, K.pow(v, static_cast<std::uint64_t>(std::abs(as[l]))));
      }
      total += points_above(a, u);
    }
  }
  return total;
}

std::vector<int> root_orbit_sizes(const FqField& F, Fq u, int D) {
  if (u == 0) fail(ErrorKind::Internal, kMod, "roots of zero requested");
  std::vector<int> out;
  mpz_class q(static_cast<unsigned long>(F.q()));
  auto count_in = [&](int r) -> std::int64_t {
    mpz_class qr;
    mpz_pow_ui(qr.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(r));
    mpz_class qr1 = qr - 1;
    mpz_class g;
    mpz_gcd_ui(g.get_mpz_t(), qr1.get_mpz_t(), static_cast<unsigned long>(D));
    mpz_class e = qr1 / g;
    return F.pow(u, e) == 1 ? static_cast<std::int64_t>(g.get_ui()) : 0;
  };
  auto mobius = [](int n) {
    int m = 1;
    for (int d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        n /= d;
        if (n % d == 0) return 0;
        m = -m;
      }
    }
    if (n > 1) m = -m;
    return m;
  };
  int found = 0;
  for (int r = 1; found < D; ++r) {
    std::int64_t exact = 0;
    for (int s = 1; s <= r; ++s)
      if (r % s == 0) exact += mobius(r / s) * count_in(s);
    for (std::int64_t j = 0; j < exact / r; ++j) out.push_back(r);
    found += static_cast<int>(exact);
    if (r > 1'000'000) fail(ErrorKind::Internal, kMod, "root orbit search did not terminate");
  }
  return out;
}

std::vector<std::int64_t> zeta_numerator(int nbar, const RatFunc& h, int genus, std::uint64_t bound) {
  const FieldPtr& F = h.num.F;
  const std::int64_t q = static_cast<std::int64_t>(F->q());
  int D = geometric_power_index(h, nbar);
  auto orbits = root_orbit_sizes(*F, signed_factor(h).unit, D);
  auto h0 = [&](int i) {
    std::int64_t s = 0;
    for (int r : orbits)
      if (i % r == 0) s += r;
    return s;
  };
  int G = genus;
  // N_1..N_{G+1} are required; N_{G+2} is used as an extra check when it is cheap enough.
  int top = G + 1;
  std::uint64_t Qnext = 1;
  for (int j = 0; j < G + 2 && Qnext <= bound; ++j) Qnext = Qnext > bound / F->q() ? bound + 1 : Qnext * F->q();
  if (Qnext <= bound) top = G + 2;
  std::vector<__int128> pw(top + 1, 0);  // power sums of the Frobenius eigenvalues on H^1
  __int128 qi = 1;
  for (int i = 1; i <= top; ++i) {
    qi *= q;
    std::uint64_t N = count_kummer_points(nbar, h, i, bound);
    pw[i] = static_cast<__int128>(h0(i)) + qi * h0(i) - static_cast<__int128>(N);
  }
  std::vector<__int128> c(2 * G + 1, 0);
  c[0] = 1;
  for (int j = 1; j <= G; ++j) {
    __int128 s = 0;
    for (int k = 1; k <= j; ++k) s += pw[k] * c[j - k];
    if (s % j != 0) fail(ErrorKind::CountsInconsistent, kMod, "Newton identity produced a non-integer coefficient");
    c[j] = -s / j;
  }
  for (int j = 0; j < G; ++j) {
    __int128 qp = 1;
    for (int t = 0; t < G - j; ++t) qp *= q;
    c[2 * G - j] = qp * c[j];
  }
  // The mirrored polynomial must predict the remaining counts.
  for (int m = G + 1; m <= top; ++m) {
    __int128 s = 0;
    for (int k = 1; k < m; ++k) s += pw[k] * (m - k <= 2 * G ? c[m - k] : 0);
    __int128 predicted = -(s + (m <= 2 * G ? m * c[m] : 0));
    if (predicted != pw[m])
      fail(ErrorKind::CountsInconsistent, kMod, "zeta numerator disagrees with the count over an extension");
  }
  if (G == 0) return {1};
  std::vector<std::int64_t> out(c.size());
  for (size_t j = 0; j < c.size(); ++j) out[j] = static_cast<std::int64_t>(c[j]);
  double dev = weil_deviation(out, static_cast<double>(q));
  if (dev > 1e-6) fail(ErrorKind::CountsInconsistent, kMod, "reciprocal roots violate the Weil bound");
  return out;
}

namespace {

using Rational = mpq_class;
using QPolyVec = std::vector<Rational>;

void qtrim(QPolyVec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

QPolyVec qrem(QPolyVec a, const QPolyVec& b) {
  qtrim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rational t = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= t * b[j];
    qtrim(a);
  }
  return a;
}

QPolyVec qquot(QPolyVec a, const QPolyVec& b) {
  qtrim(a);
  if (a.size() < b.size()) return {};
  QPolyVec quo(a.size() - b.size() + 1, 0);
  while (a.size() >= b.size() && !a.empty()) {
    Rational t = a.back() / b.back();
    size_t shift = a.size() - b.size();
    quo[shift] = t;
    for (size_t j = 0; j < b.size(); ++j) a[shift + j] -= t * b[j];
    qtrim(a);
  }
  return quo;
}

}  // namespace

double weil_deviation(const std::vector<std::int64_t>& P, double q) {
  QPolyVec a(P.begin(), P.end());
  qtrim(a);
  if (a.size() <= 1) return 0.0;
  // Work with the squarefree part so the eigenvalue problem has simple roots.
  QPolyVec d(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * static_cast<long>(i);
  QPolyVec g = a, h = d;
  qtrim(h);
  while (!h.empty()) {
    QPolyVec r = qrem(g, h);
    g = std::move(h);
    h = std::move(r);
  }
  QPolyVec s = g.size() > 1 ? qquot(a, g) : a;
  int n = static_cast<int>(s.size()) - 1;
  if (n < 1) return 0.0;
  std::vector<std::complex<double>> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = Rational(s[i] / s[n]).get_d();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i].real();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    for (int it = 0; it < 4; ++it) {  // Newton polish against the monic squarefree part
      std::complex<double> f = c[n], df = 0.0;
      for (int j = n - 1; j >= 0; --j) {
        df = df * z + f;
        f = f * z + c[j];
      }
      if (std::abs(df) == 0.0) break;
      z -= f / df;
    }
    worst = std::max(worst, std::abs(std::abs(z) * std::sqrt(q) - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Linear algebra over F_p

namespace {

std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  std::int64_t r = 1, b = mod_pos(a, p), e = p - 2;
  while (e) {
    if (e & 1) r = static_cast<std::int64_t>(static_cast<__int128>(r) * b % p);
    b = static_cast<std::int64_t>(static_cast<__int128>(b) * b % p);
    e >>= 1;
  }
  return r;
}

// Row-reduces in place; returns pivot columns.
std::vector<int> rref(FpMatrix& m, std::int64_t p, int cols) {
  std::vector<int> pivots;
  int row = 0;
  int rows = static_cast<int>(m.size());
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = -1;
    for (int r = row; r < rows; ++r)
      if (mod_pos(m[r][col], p) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    std::int64_t iv = inv_mod(m[row][col], p);
    for (auto& x : m[row]) x = mod_pos(x * iv % p, p);
    for (int r = 0; r < rows; ++r) {
      if (r == row || m[r][col] == 0) continue;
      std::int64_t f = mod_pos(m[r][col], p);
      for (size_t c = 0; c < m[r].size(); ++c) m[r][c] = mod_pos(m[r][c] - f * m[row][c], p);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::vector<std::vector<std::int64_t>> fp_kernel(FpMatrix m, std::int64_t p) {
  if (m.empty()) return {};
  int cols = static_cast<int>(m[0].size());
  auto pivots = rref(m, p, cols);
  std::vector<std::vector<std::int64_t>> basis;
  std::vector<bool> is_piv(cols, false);
  for (int c : pivots) is_piv[c] = true;
  for (int free = 0; free < cols; ++free) {
    if (is_piv[free]) continue;
    std::vector<std::int64_t> v(cols, 0);
    v[free] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = mod_pos(-m[r][free], p);
    basis.push_back(v);
  }
  return basis;
}

std::optional<std::vector<std::int64_t>> fp_solve(FpMatrix m, std::vector<std::int64_t> rhs, std::int64_t p) {
  int cols = m.empty() ? 0 : static_cast<int>(m[0].size());
  for (size_t r = 0; r < m.size(); ++r) m[r].push_back(mod_pos(rhs[r], p));
  auto pivots = rref(m, p, cols);
  for (size_t r = pivots.size(); r < m.size(); ++r)
    if (m[r][cols] != 0) return std::nullopt;
  std::vector<std::int64_t> x(cols, 0);
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][cols];
  return x;
}

}  // namespace ssr
