#pragma once

#include <cstdint>
#include <vector>

#include "hmf/rational.hpp"

namespace hmf {

// Integer polynomials, coefficients low to high, normalized (no trailing 0).
using ZPoly = std::vector<Int>;

ZPoly zpoly_trim(ZPoly p);
ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b);
ZPoly zpoly_derivative(const ZPoly& p);
Int zpoly_eval(const ZPoly& p, const Int& x);

// Resultant of two integer polynomials via the Sylvester matrix.
Int zpoly_resultant(const ZPoly& a, const ZPoly& b);

// Discriminant of p: (-1)^{n(n-1)/2} Res(p, p') / lc(p).
Int zpoly_discriminant(const ZPoly& p);

// ---------------------------------------------------------------------------
// Polynomials over F_p (p a small odd prime or 2), coefficients in [0, p).

using PPoly = std::vector<int64_t>;

struct PolyModP {
  int64_t p;
  explicit PolyModP(int64_t prime) : p(prime) {}

  PPoly trim(PPoly a) const;
  PPoly reduce(const ZPoly& a) const;
  PPoly add(const PPoly& a, const PPoly& b) const;
  PPoly sub(const PPoly& a, const PPoly& b) const;
  PPoly mul(const PPoly& a, const PPoly& b) const;
  // quotient and remainder of a by monic-able b (lc invertible mod p)
  void divmod(const PPoly& a, const PPoly& b, PPoly& q, PPoly& r) const;
  PPoly mod(const PPoly& a, const PPoly& b) const;
  PPoly gcd(PPoly a, PPoly b) const;
  PPoly monic(PPoly a) const;
  PPoly derivative(const PPoly& a) const;
  PPoly pow_mod(PPoly base, Int e, const PPoly& m) const;

  int64_t inv(int64_t x) const;
};

struct PFactor {
  PPoly poly;  // monic irreducible
  int mult;
};

// Full factorization of f mod p (squarefree + distinct degree +
// Cantor-Zassenhaus equal degree splitting). Deterministic seeding.
std::vector<PFactor> factor_mod_p(const ZPoly& f, int64_t p);

// ---------------------------------------------------------------------------
// F_q = F_p[t]/(g), g monic irreducible of degree d, q = p^d.
// Elements are PPoly of degree < d. Suitable for small q.

struct Fq {
  int64_t p;
  PPoly g;      // monic irreducible mod p
  int d;
  Int q;        // p^d
  PolyModP zp;

  Fq(int64_t p_, PPoly g_);

  PPoly zero() const { return {}; }
  PPoly one() const { return {1}; }
  PPoly from_int(const Int& n) const;
  PPoly add(const PPoly& a, const PPoly& b) const { return zp.add(a, b); }
  PPoly sub(const PPoly& a, const PPoly& b) const { return zp.sub(a, b); }
  PPoly neg(const PPoly& a) const;
  PPoly mul(const PPoly& a, const PPoly& b) const;
  PPoly inv(const PPoly& a) const;
  PPoly pow(PPoly a, Int e) const;
  bool is_zero(const PPoly& a) const { return a.empty(); }
  bool eq(const PPoly& a, const PPoly& b) const { return a == b; }

  // Legendre symbol on F_q^*: +1 square, -1 nonsquare, 0 for zero.
  int legendre(const PPoly& a) const;

  // All q elements, in a fixed order (lexicographic in coefficients).
  std::vector<PPoly> elements() const;
};

}  // namespace hmf
