#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ssr/localfield.hpp"

namespace ssr {

// Polynomials over Q, coefficients low to high, no trailing zeros.
using QPoly = std::vector<mpq_class>;

void qpoly_trim(QPoly& a);
int qpoly_deg(const QPoly& a);
QPoly qpoly_mul(const QPoly& a, const QPoly& b);
std::pair<QPoly, QPoly> qpoly_divmod(const QPoly& a, const QPoly& b);
QPoly qpoly_monic(const QPoly& a);
QPoly qpoly_gcd(const QPoly& a, const QPoly& b);  // monic
QPoly qpoly_deriv(const QPoly& a);
QPoly qpoly_pow(const QPoly& a, int e);
std::string qpoly_to_string(const QPoly& a, const std::string& var = "x");
// Parses expressions such as "x^4 - x^2 + 1", "-6*x", "1/2x^3" or "(x-1)^2*(x+3)".
QPoly qpoly_parse(const std::string& s);

// Squarefree decomposition: f = lc * prod P_a^a with P_a monic squarefree and pairwise coprime.
struct SquarefreePart {
  QPoly poly;
  int multiplicity = 0;
};
std::vector<SquarefreePart> squarefree_decomposition(const QPoly& f);

// y^n = f(x) over Q, studied at the prime p.
struct SuperellipticCurve {
  int n = 0;
  QPoly f;
  std::int64_t p = 0;
};

struct Violation {
  std::string clause;  // "nth-power", "gcd", "prime-to-p", "genus", "input"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const SuperellipticCurve& C);

// Riemann-Hurwitz genus; requires a nonconstant f.
int genus(const SuperellipticCurve& C);

// f replaced by c^n f with c a positive integer making every coefficient integral.
struct IntegralModel {
  SuperellipticCurve curve;
  mpz_class scale = 1;  // y_new = scale * y
};
IntegralModel integral_rescaling(const SuperellipticCurve& C);

// Product of the distinct irreducible factors of f, monic.
QPoly radical(const QPoly& f);

struct BranchPoint {
  LElem root;
  int multiplicity = 0;
};

struct BranchDivisor {
  std::vector<BranchPoint> points;  // finite points in the deterministic root order
  bool includes_infinity = false;
  int infinity_multiplicity = 0;    // sum of the finite multiplicities
  std::size_t size() const { return points.size() + (includes_infinity ? 1 : 0); }
};

// Roots are the roots of radical(f) in L (any order); multiplicities come from the squarefree
// decomposition refined by evaluating each part at each root.
BranchDivisor branch_divisor(const SuperellipticCurve& C, const LocalField& L, const std::vector<LElem>& roots);

}  // namespace ssr
