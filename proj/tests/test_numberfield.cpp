#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmf/config.hpp"
#include "hmf/numberfield.hpp"

using namespace hmf;

#ifndef DATA_DIR
#define DATA_DIR "data"
#endif

static NumberField& field1101() {
  static NumberField F = load_field(std::string(DATA_DIR) + "/field_1101.json");
  return F;
}
static NumberField& field1369() {
  static NumberField F = load_field(std::string(DATA_DIR) + "/field_1369.json");
  return F;
}
static NumberField& field961() {
  static NumberField F = load_field(std::string(DATA_DIR) + "/field_961.json");
  return F;
}

TEST_CASE("fixtures load and validate") {
  CHECK(field1101().disc == 1101);
  CHECK(field1369().disc == 1369);
  CHECK(field961().disc == 961);
  CHECK(field961().index == 2);
}

TEST_CASE("norms of w-2 and w-3 in the 1101 field") {
  auto& F = field1101();
  QVec w = F.gen();
  CHECK(F.norm(F.sub(w, F.from_int(2))) == 2);
  CHECK(F.norm(F.sub(w, F.from_int(3))) == -3);
  CHECK(F.trace(F.one()) == 3);
}

TEST_CASE("arithmetic identities") {
  auto& F = field1369();
  QVec w = F.gen();
  // w satisfies its defining polynomial
  QVec v = F.add(F.sub(F.mul(F.mul(w, w), w), F.mul(w, w)),
                 F.sub(F.from_int(-11), F.scale(Rat(12), w)));
  CHECK(F.is_zero(v));
  QVec x = F.add(F.mul(w, w), F.from_int(5));
  CHECK(F.mul(x, F.inv(x)) == F.one());
  // norm multiplicativity
  QVec y = F.sub(F.scale(Rat(3), w), F.one());
  CHECK(F.norm(F.mul(x, y)) == F.norm(x) * F.norm(y));
  CHECK(F.trace(F.add(x, y)) == F.trace(x) + F.trace(y));
}

TEST_CASE("real embeddings") {
  auto& F = field1101();
  for (int k = 0; k < 3; k++) {
    auto iv = F.embed_interval(F.one(), k, 64);
    CHECK(iv.first <= 1);
    CHECK(iv.second >= 1);
    // w's embeddings are roots of f
    double r = F.embed(F.gen(), k);
    double fr = ((r - 1) * r - 9) * r + 12;
    CHECK(std::fabs(fr) < 1e-9);
    // embedding is a ring map: v(w^2) = v(w)^2
    CHECK(F.embed(F.mul(F.gen(), F.gen()), k) == doctest::Approx(r * r));
  }
  // roots are sorted and distinct
  CHECK(F.embed(F.gen(), 0) < F.embed(F.gen(), 1));
  CHECK(F.embed(F.gen(), 1) < F.embed(F.gen(), 2));
}

TEST_CASE("total positivity") {
  auto& F = field1101();
  CHECK(F.is_totally_positive(F.one()));
  CHECK(!F.is_totally_positive(F.neg(F.one())));
  for (auto& u : F.units) {
    CHECK(F.is_totally_positive(F.mul(u, u)));
  }
  QVec w = F.gen();
  CHECK(!F.is_totally_positive(F.sub(w, F.from_int(3))));  // norm -3 < 0
}

TEST_CASE("prime splitting in the 1101 field") {
  auto& F = field1101();
  auto p2 = F.split_prime(2);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].fdeg == 1);
  CHECK(p2[1].fdeg == 2);
  CHECK(p2[0].norm == 2);
  CHECK(p2[1].norm == 4);
  auto p31 = F.split_prime(31);
  REQUIRE(p31.size() == 3);
  for (auto& P : p31) CHECK(P.fdeg == 1);
}

TEST_CASE("product of primes above p recovers pZ_F") {
  for (NumberField* Fp : {&field1101(), &field1369(), &field961()}) {
    auto& F = *Fp;
    for (long p : {2, 3, 5, 7, 11, 31}) {
      ZIdeal prod = F.unit_ideal();
      for (auto& P : F.split_prime(p))
        prod = F.ideal_mul(prod, F.ideal_pow(F.prime_ideal_lattice(P), P.e));
      CHECK(prod == F.principal_ideal(F.from_int(p)));
    }
  }
}

TEST_CASE("index divisor 2 splits completely in the 961 field") {
  auto& F = field961();
  auto ps = F.split_prime(2);
  REQUIRE(ps.size() == 3);
  for (auto& P : ps) {
    CHECK(P.fdeg == 1);
    CHECK(P.e == 1);
    CHECK(P.norm == 2);
    CHECK(!P.kummer);
    // residue map works and the second generator lies in P
    CHECK(F.reduce_mod(P.gen2, P).empty());
    CHECK(F.reduce_mod(F.one(), P) == PPoly{1});
    // valuation of the second generator is positive, of 3 is zero
    CHECK(F.valuation(P.gen2, P) >= 1);
    CHECK(F.valuation(F.from_int(3), P) == 0);
  }
  // the three primes are distinct
  CHECK(!(ps[0] == ps[1]));
  CHECK(!(ps[1] == ps[2]));
}

TEST_CASE("residue field operations") {
  auto& F = field1101();
  auto ps = F.split_prime(2);
  auto& P2 = ps[0];  // norm 2: (2, w-2) up to choice
  QVec w = F.gen();
  // w - 2 generates the norm-2 prime: N(w-2) = 2
  CHECK(F.valuation(F.sub(w, F.from_int(2)), P2) == 1);
  CHECK(F.reduce_mod(F.sub(w, F.from_int(2)), P2).empty());
  CHECK(F.legendre(F.one(), P2) == 1);

  auto p3 = F.split_prime(3);
  auto& P3 = p3[0];
  REQUIRE(P3.norm == 3);
  // squares mod 3 are {0,1}: find a residue reducing to 2 -> nonsquare
  bool found = false;
  for (long a = 0; a < 20 && !found; a++) {
    QVec x = F.add(w, F.from_int(a));
    if (F.reduce_mod(x, P3) == PPoly{2}) {
      CHECK(F.legendre(x, P3) == -1);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("valuations and uniformizers") {
  auto& F = field1369();
  for (auto& P : F.primes_up_to(30)) {
    QVec pi = F.uniformizer(P);
    CHECK(F.valuation(pi, P) == 1);
    CHECK(F.valuation(F.from_int(P.p), P) == P.e);
    // valuation respects multiplication
    CHECK(F.valuation(F.mul(pi, pi), P) == 2);
  }
}

TEST_CASE("primes_up_to sorted by norm") {
  auto& F = field1101();
  auto ps = F.primes_up_to(50);
  // the paper's table for this field lists 12 primes of norm < 50
  int count = 0;
  for (auto& P : ps)
    if (P.norm < 50) count++;
  CHECK(count == 12);
  for (size_t i = 1; i < ps.size(); i++) CHECK(ps[i - 1].norm <= ps[i].norm);
}

TEST_CASE("totally positive generators") {
  auto& F = field1101();
  QVec w = F.gen();
  QVec wm2 = F.sub(w, F.from_int(2));
  ZIdeal I = F.principal_ideal(wm2);
  QVec pi = F.totally_positive_generator(I);
  CHECK(F.is_totally_positive(pi));
  CHECK(F.principal_ideal(pi) == I);

  // a norm-negative generator must get sign-fixed too
  QVec wm3 = F.sub(w, F.from_int(3));
  ZIdeal J = F.principal_ideal(wm3);
  QVec pj = F.totally_positive_generator(J);
  CHECK(F.is_totally_positive(pj));
  CHECK(F.norm(pj) == 3);

  CHECK(F.totally_positive_generator(F.unit_ideal()).size() == 3);
}

TEST_CASE("totally positive generators in the rationals") {
  NumberField Q(ZPoly{Int(0), Int(1)}, QMat::identity(1), Int(1), {});
  ZIdeal two = Q.principal_ideal(Q.from_int(-2));
  QVec g = Q.totally_positive_generator(two);
  CHECK(g == QVec{Rat(2)});
  auto ps = Q.split_prime(2);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].fdeg == 1);
}

TEST_CASE("bad unit list is rejected") {
  // x^2 - 2 with "unit" 2: N(2) = 4
  CHECK_THROWS_AS(NumberField(ZPoly{Int(-2), Int(0), Int(1)}, QMat::identity(2), Int(8),
                              {QVec{Rat(2), Rat(0)}}),
                  std::invalid_argument);
  // and with the true fundamental unit 1 + sqrt(2) it validates
  NumberField F(ZPoly{Int(-2), Int(0), Int(1)}, QMat::identity(2), Int(8),
                {QVec{Rat(1), Rat(1)}});
  CHECK(F.norm(F.units[0]) == -1);
}

TEST_CASE("unit sign patterns") {
  auto& F = field1101();
  // strict class number 1: every sign pattern is attained by a unit
  for (int mask = 0; mask < 8; mask++) {
    std::vector<int> target{mask & 1 ? -1 : 1, mask & 2 ? -1 : 1, mask & 4 ? -1 : 1};
    auto u = F.unit_with_signs(target);
    REQUIRE(u.has_value());
    CHECK(F.sign_vector(*u) == target);
    Rat nu = F.norm(*u);
    CHECK((nu == 1 || nu == -1));
  }
}
