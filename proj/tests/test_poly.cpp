#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmf/poly.hpp"

using namespace hmf;

TEST_CASE("resultant and discriminant") {
  // disc(x^2 + bx + c) = b^2 - 4c
  ZPoly q{Int(3), Int(5), Int(1)};
  CHECK(zpoly_discriminant(q) == 25 - 12);
  // cubic defining fields used elsewhere in the project
  ZPoly f1{Int(12), Int(-9), Int(-1), Int(1)};
  CHECK(zpoly_discriminant(f1) == 1101);
  ZPoly f2{Int(-11), Int(-12), Int(-1), Int(1)};
  CHECK(zpoly_discriminant(f2) == 1369);
  ZPoly f3{Int(8), Int(-10), Int(-1), Int(1)};
  CHECK(zpoly_discriminant(f3) == 3844);  // 4 * 31^2
}

TEST_CASE("resultant of coprime polys is nonzero") {
  ZPoly a{Int(1), Int(0), Int(1)};   // x^2+1
  ZPoly b{Int(-1), Int(1)};          // x-1
  CHECK(zpoly_resultant(a, b) == 2);  // a(1) since b monic linear
}

TEST_CASE("factor x^2+1 mod primes") {
  ZPoly f{Int(1), Int(0), Int(1)};
  auto f5 = factor_mod_p(f, 5);
  REQUIRE(f5.size() == 2);
  CHECK(f5[0].poly.size() == 2);
  CHECK(f5[0].mult == 1);
  auto f3 = factor_mod_p(f, 3);
  REQUIRE(f3.size() == 1);
  CHECK(f3[0].poly.size() == 3);
  auto f2 = factor_mod_p(f, 2);  // (x+1)^2
  REQUIRE(f2.size() == 1);
  CHECK(f2[0].mult == 2);
  CHECK(f2[0].poly == PPoly{1, 1});
}

TEST_CASE("factorization reconstructs the polynomial") {
  ZPoly f{Int(12), Int(-9), Int(-1), Int(1)};
  for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23}) {
    auto fac = factor_mod_p(f, p);
    PolyModP zp(p);
    PPoly prod{1};
    int degsum = 0;
    for (auto& fa : fac) {
      for (int i = 0; i < fa.mult; i++) prod = zp.mul(prod, fa.poly);
      degsum += fa.mult * (int(fa.poly.size()) - 1);
    }
    CHECK(degsum == 3);
    CHECK(prod == zp.monic(zp.reduce(f)));
  }
}

TEST_CASE("repeated factors detected") {
  // (x-1)^2 (x+2) mod 7
  ZPoly f{Int(2), Int(-3), Int(0), Int(1)};
  auto fac = factor_mod_p(f, 7);
  int tot = 0;
  bool has_double = false;
  for (auto& fa : fac) {
    tot += fa.mult;
    if (fa.mult == 2) has_double = true;
  }
  CHECK(tot == 3);
  CHECK(has_double);
}

TEST_CASE("residue field F_9 arithmetic") {
  // F_9 = F_3[t]/(t^2+1)
  Fq k(3, PPoly{1, 0, 1});
  CHECK(k.q == 9);
  auto t = PPoly{0, 1};
  CHECK(k.mul(t, t) == k.from_int(-1));
  // t has order 4: t^2=-1, t^4=1
  CHECK(k.pow(t, 4) == k.one());
  CHECK(k.pow(t, 2) != k.one());
  // inverse
  auto a = k.add(t, k.one());  // t+1
  auto ai = k.inv(a);
  CHECK(k.mul(a, ai) == k.one());
  // squares: exactly (9-1)/2 = 4 nonzero squares
  int squares = 0;
  for (auto& e : k.elements())
    if (!k.is_zero(e) && k.legendre(e) == 1) squares++;
  CHECK(squares == 4);
  // -1 = t^2 is a square in F_9
  CHECK(k.legendre(k.from_int(-1)) == 1);
}

TEST_CASE("legendre in prime field matches quadratic residues") {
  Fq k(7, PPoly{0, 1});  // F_7 as F_7[t]/(t)
  CHECK(k.d == 1);
  CHECK(k.legendre(k.from_int(2)) == 1);   // 3^2=2 mod 7
  CHECK(k.legendre(k.from_int(3)) == -1);
  CHECK(k.legendre(k.from_int(0)) == 0);
}

TEST_CASE("element enumeration covers the field") {
  Fq k(2, PPoly{1, 1, 1});  // F_4
  auto els = k.elements();
  CHECK(els.size() == 4);
  // multiplicative group has order 3: every nonzero cube is 1
  for (auto& e : els)
    if (!k.is_zero(e)) CHECK(k.pow(e, 3) == k.one());
}
