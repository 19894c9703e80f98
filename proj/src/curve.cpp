#include "ssr/curve.hpp"

#include <cctype>
#include <numeric>
#include <sstream>

#include "ssr/errors.hpp"

namespace ssr {

void qpoly_trim(QPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int qpoly_deg(const QPoly& a) { return static_cast<int>(a.size()) - 1; }

QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  qpoly_trim(r);
  return r;
}

std::pair<QPoly, QPoly> qpoly_divmod(const QPoly& a, const QPoly& b) {
  require(!b.empty(), ErrorKind::ZeroPolynomial, "curve", "division by the zero polynomial");
  QPoly r = a;
  qpoly_trim(r);
  if (r.size() < b.size()) return {{}, r};
  QPoly q(r.size() - b.size() + 1);
  for (int i = static_cast<int>(r.size()) - 1; i >= static_cast<int>(b.size()) - 1; --i) {
    if (r[i] == 0) continue;
    mpq_class c = r[i] / b.back();
    int s = i - (static_cast<int>(b.size()) - 1);
    q[s] = c;
    for (std::size_t j = 0; j < b.size(); ++j) r[s + j] -= c * b[j];
  }
  qpoly_trim(q);
  qpoly_trim(r);
  return {q, r};
}

QPoly qpoly_monic(const QPoly& a) {
  QPoly r = a;
  qpoly_trim(r);
  if (r.empty()) return r;
  mpq_class lc = r.back();
  for (auto& c : r) c /= lc;
  return r;
}

QPoly qpoly_gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  qpoly_trim(x);
  qpoly_trim(y);
  while (!y.empty()) {
    QPoly r = qpoly_divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return qpoly_monic(x);
}

QPoly qpoly_deriv(const QPoly& a) {
  if (a.size() <= 1) return {};
  QPoly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long>(i);
  qpoly_trim(r);
  return r;
}

QPoly qpoly_pow(const QPoly& a, int e) {
  QPoly r{1};
  for (int i = 0; i < e; ++i) r = qpoly_mul(r, a);
  return r;
}

std::string qpoly_to_string(const QPoly& a, const std::string& var) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
    if (a[i] == 0) continue;
    mpq_class c = a[i];
    bool neg = c < 0;
    if (neg) c = -c;
    if (!first) os << (neg ? " - " : " + ");
    else if (neg) os << "-";
    first = false;
    if (i == 0 || c != 1) os << c.get_str();
    if (i > 0) os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  QPoly parse() {
    QPoly r = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return r;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::Validation, "curve",
         "cannot parse polynomial \"" + s_ + "\" at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool starts_primary() {
    skip();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == 'x' || c == '(';
  }

  QPoly expr() {
    QPoly r;
    bool neg = false;
    if (peek('-') || peek('+')) neg = s_[pos_++] == '-';
    r = term();
    if (neg) for (auto& c : r) c = -c;
    while (peek('+') || peek('-')) {
      bool minus = s_[pos_++] == '-';
      QPoly t = term();
      if (r.size() < t.size()) r.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) r[i] += minus ? -t[i] : t[i];
    }
    qpoly_trim(r);
    return r;
  }

  QPoly term() {
    QPoly r = factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        r = qpoly_mul(r, factor());
      } else if (starts_primary()) {
        r = qpoly_mul(r, factor());
      } else {
        return r;
      }
    }
  }

  QPoly factor() {
    QPoly b = primary();
    if (peek('^')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected exponent");
      int e = std::stoi(s_.substr(start, pos_ - start));
      b = qpoly_pow(b, e);
    }
    return b;
  }

  QPoly primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    char c = s_[pos_];
    if (c == 'x') {
      ++pos_;
      return {0, 1};
    }
    if (c == '(') {
      ++pos_;
      QPoly r = expr();
      if (!peek(')')) error("expected ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpq_class v(mpz_class(s_.substr(start, pos_ - start)));
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) error("expected denominator");
        mpz_class d(s_.substr(ds, pos_ - ds));
        if (d == 0) error("zero denominator");
        v /= mpq_class(d);
      }
      QPoly r{v};
      qpoly_trim(r);
      return r;
    }
    error("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

QPoly qpoly_parse(const std::string& s) { return Parser(s).parse(); }

std::vector<SquarefreePart> squarefree_decomposition(const QPoly& f) {
  // Yun's algorithm.
  QPoly a = qpoly_monic(f);
  require(!a.empty(), ErrorKind::ZeroPolynomial, "curve", "squarefree decomposition of zero");
  std::vector<SquarefreePart> out;
  if (a.size() == 1) return out;
  QPoly da = qpoly_deriv(a);
  QPoly b = qpoly_gcd(a, da);
  QPoly c = qpoly_divmod(a, b).first;
  QPoly d = da;
  {
    QPoly t = qpoly_divmod(da, b).first;
    QPoly dc = qpoly_deriv(c);
    d = t;
    if (d.size() < dc.size()) d.resize(dc.size());
    for (std::size_t i = 0; i < dc.size(); ++i) d[i] -= dc[i];
    qpoly_trim(d);
  }
  for (int i = 1; c.size() > 1; ++i) {
    QPoly g = qpoly_gcd(c, d);
    if (g.size() > 1) out.push_back({g, i});
    c = qpoly_divmod(c, g).first;
    QPoly t = qpoly_divmod(d, g).first;
    QPoly dc = qpoly_deriv(c);
    d = t;
    if (d.size() < dc.size()) d.resize(dc.size());
    for (std::size_t k = 0; k < dc.size(); ++k) d[k] -= dc[k];
    qpoly_trim(d);
  }
  return out;
}

QPoly radical(const QPoly& f) {
  QPoly r{1};
  for (const auto& part : squarefree_decomposition(f)) r = qpoly_mul(r, part.poly);
  return r;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.clause + ": " + v.message;
  }
  return s;
}

namespace {

// 2g - 2 = -2n + sum over roots (n - gcd(n, a)) + (n - gcd(n, sum a)).
int genus_from_parts(int n, const std::vector<SquarefreePart>& parts) {
  long twice = -2L * n;
  long total = 0;
  for (const auto& part : parts) {
    long deg = qpoly_deg(part.poly);
    twice += deg * (n - std::gcd(n, part.multiplicity));
    total += deg * part.multiplicity;
  }
  twice += n - std::gcd(static_cast<long>(n), total);
  return static_cast<int>((twice + 2) / 2);
}

}  // namespace

ValidationReport validate(const SuperellipticCurve& C) {
  ValidationReport rep;
  QPoly f = C.f;
  qpoly_trim(f);
  if (C.n < 2) rep.violations.push_back({"input", "exponent n must be at least 2"});
  if (!is_prime(C.p)) rep.violations.push_back({"input", "p = " + std::to_string(C.p) + " is not prime"});
  if (f.size() < 2) rep.violations.push_back({"input", "f must be a nonconstant polynomial"});
  if (!rep.ok()) return rep;

  auto parts = squarefree_decomposition(f);
  bool reduced = true;
  int g = 0;
  for (const auto& part : parts) {
    if (part.multiplicity >= C.n) {
      reduced = false;
      rep.violations.push_back({"nth-power", "the factor (" + qpoly_to_string(part.poly) + ")^" +
                                                 std::to_string(part.multiplicity) + " contains an n-th power"});
    }
    g = std::gcd(g, part.multiplicity);
  }
  if (std::gcd(g, C.n) != 1) {
    reduced = false;
    rep.violations.push_back({"gcd", "gcd(n, multiplicities) = " + std::to_string(std::gcd(g, C.n)) + " != 1"});
  }
  if (C.n % C.p == 0)
    rep.violations.push_back({"prime-to-p", "p = " + std::to_string(C.p) + " divides n = " + std::to_string(C.n)});
  if (reduced) {
    int gy = genus_from_parts(C.n, parts);
    if (gy < 2) rep.violations.push_back({"genus", "genus " + std::to_string(gy) + " < 2"});
  }
  return rep;
}

int genus(const SuperellipticCurve& C) {
  require(qpoly_deg(C.f) >= 1, ErrorKind::Validation, "curve", "f must be nonconstant");
  return genus_from_parts(C.n, squarefree_decomposition(C.f));
}

IntegralModel integral_rescaling(const SuperellipticCurve& C) {
  mpz_class den = 1;
  for (const auto& c : C.f) {
    mpz_class d = c.get_den();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  // The smallest c with c^n divisible by den: raise each prime of den to ceil(v / n).
  mpz_class scale = 1, rest = den;
  for (mpz_class q = 2; rest > 1; ++q) {
    if (rest % q != 0) continue;
    int v = 0;
    while (rest % q == 0) {
      rest /= q;
      ++v;
    }
    mpz_class qp;
    mpz_pow_ui(qp.get_mpz_t(), q.get_mpz_t(), (v + C.n - 1) / C.n);
    scale *= qp;
  }
  IntegralModel out{C, scale};
  mpz_class sn;
  mpz_pow_ui(sn.get_mpz_t(), scale.get_mpz_t(), C.n);
  for (auto& c : out.curve.f) c *= sn;
  return out;
}

BranchDivisor branch_divisor(const SuperellipticCurve& C, const LocalField& L, const std::vector<LElem>& roots) {
  auto parts = squarefree_decomposition(C.f);
  BranchDivisor D;
  std::vector<int> found(parts.size(), 0);
  for (const auto& r : roots) {
    int hit = -1;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      LElem v = lpoly_eval(lpoly_from_rational(L, parts[k].poly), r);
      if (!v.zero) continue;
      if (hit >= 0)
        fail(ErrorKind::RootMultiplicityMismatch, "curve", "a root is shared by two squarefree parts");
      hit = static_cast<int>(k);
    }
    if (hit < 0) fail(ErrorKind::RootMultiplicityMismatch, "curve", "a p-adic root is not a root of f");
    ++found[hit];
    D.points.push_back({r, parts[hit].multiplicity});
  }
  long total = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (found[k] != qpoly_deg(parts[k].poly))
      fail(ErrorKind::RootMultiplicityMismatch, "curve",
           "squarefree part " + qpoly_to_string(parts[k].poly) + " has " + std::to_string(found[k]) +
               " p-adic roots but degree " + std::to_string(qpoly_deg(parts[k].poly)));
    total += static_cast<long>(found[k]) * parts[k].multiplicity;
  }
  std::vector<LElem> rs;
  for (const auto& pt : D.points) rs.push_back(pt.root);
  std::vector<BranchPoint> sorted;
  for (size_t i : root_order(L, rs)) sorted.push_back(D.points[i]);
  D.points = std::move(sorted);
  D.infinity_multiplicity = static_cast<int>(total);
  D.includes_infinity = total % C.n != 0;
  require(genus(C) < 2 || D.size() >= 3, ErrorKind::Internal, "curve", "branch divisor has fewer than 3 points");
  return D;
}

}  // namespace ssr
