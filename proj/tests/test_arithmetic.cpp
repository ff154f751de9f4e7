#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmf/arithmetic.hpp"
#include "hmf/config.hpp"

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
static NumberField& rationals() {
  static NumberField Q(ZPoly{Int(0), Int(1)}, QMat::identity(1), Int(1), {});
  return Q;
}

static QuatAlgebra& hamilton() {
  static QuatAlgebra B(rationals(), rationals().from_int(-1), rationals().from_int(-1));
  return B;
}
static Order& hamilton_max() {
  static Order O = maximal_order(hamilton());
  return O;
}
static QuatAlgebra& alg1101() {
  static QuatAlgebra B = find_algebra(field1101(), {});
  return B;
}
static Order& max1101() {
  static Order O = maximal_order(alg1101());
  return O;
}

static QVec poly_elem(const NumberField& F, long c2, long c1, long c0) {
  // c2*w^2 + c1*w + c0 over the power basis
  QVec p(F.n, Rat(0));
  p[0] = c0;
  if (F.n > 1) p[1] = c1;
  if (F.n > 2) p[2] = c2;
  return F.from_power(p);
}

TEST_CASE("lattice arithmetic basics") {
  auto& B = hamilton();
  auto& Q = rationals();
  Order O = standard_order(B);
  CHECK(O.contains(B.one()));
  CHECK(O.contains(B.unit_i()));
  QuatElement half = B.scale(Q.from_rat(Rat(1, 2)),
                             B.add(B.add(B.one(), B.unit_i()), B.add(B.unit_j(), B.unit_ij())));
  CHECK(!O.contains(half));
  CHECK(lattice_mul(B, O.lat, O.lat) == O.lat);
  CHECK(lattice_sum(B, O.lat, O.lat) == O.lat);
  QuatLattice two = lattice_mul_elem(B, O.lat, B.from_field(Q.from_int(2)), true);
  CHECK(lattice_index(B, O.lat, two) == 16);
  CHECK(lattice_nrd(B, O.lat) == Q.unit_ideal());
}

TEST_CASE("standard order discriminant is (4ab)") {
  auto& Q = rationals();
  CHECK(standard_order(hamilton()).rdisc == Q.principal_ideal(Q.from_int(4)));

  auto& F = field1101();
  QVec b = poly_elem(F, -1, 1, 1);  // the norm-16 element -w^2 + w + 1
  QuatAlgebra Bp(F, F.from_int(-1), b);
  CHECK(standard_order(Bp).rdisc ==
        F.principal_ideal(F.scale(Rat(4), F.mul(F.from_int(-1), b))));
}

TEST_CASE("maximal order in the Hamilton quaternions") {
  auto& B = hamilton();
  auto& Q = rationals();
  auto& O = hamilton_max();
  CHECK(O.rdisc == Q.principal_ideal(Q.from_int(2)));
  QuatElement half = B.scale(Q.from_rat(Rat(1, 2)),
                             B.add(B.add(B.one(), B.unit_i()), B.add(B.unit_j(), B.unit_ij())));
  CHECK(O.contains(half));
  // already maximal: rebuilding from the lattice reproduces it
  Order O2 = make_order(B, O.lat);
  CHECK(O2.rdisc == O.rdisc);
  CHECK(O2.lat == O.lat);
  // closure on all 16 basis products
  for (int k = 0; k < 4; k++)
    for (int l = 0; l < 4; l++) CHECK(O.contains(B.mul(O.basis[k], O.basis[l])));
}

TEST_CASE("split matrix algebra over Q saturates to trivial discriminant") {
  auto& Q = rationals();
  QuatAlgebra B(Q, Q.from_int(1), Q.from_int(1));
  Order O = maximal_order(B);
  CHECK(O.rdisc == Q.unit_ideal());
  // trial order already maximal is returned unchanged by the saturation pass
  Order O2 = maximal_order(B);
  CHECK(O2.lat == O.lat);
}

TEST_CASE("paper order for the 1101 algebra") {
  auto& F = field1101();
  QVec b = poly_elem(F, -1, 1, 1);
  QuatAlgebra Bp(F, F.from_int(-1), b);
  Order O = maximal_order(Bp);
  CHECK(O.rdisc == F.unit_ideal());

  // x = ((-8w+14) + (-2w+4) i + (-w+2) j) / 4
  QuatElement x = Bp.elem(F.scale(Rat(1, 4), poly_elem(F, 0, -8, 14)),
                          F.scale(Rat(1, 4), poly_elem(F, 0, -2, 4)),
                          F.scale(Rat(1, 4), poly_elem(F, 0, -1, 2)), F.zero());
  CHECK(F.is_integral(Bp.trd(x)));
  CHECK(F.is_integral(Bp.nrd(x)));
  // the published generators span a maximal order
  auto L = lattice_adjoin(Bp, standard_order(Bp).lat, x);
  QuatLattice Lc = L;
  for (int it = 0; it < 8; it++) {
    QuatLattice L2 = lattice_sum(Bp, Lc, lattice_mul(Bp, Lc, Lc));
    if (L2 == Lc) break;
    Lc = L2;
  }
  Order Opaper = make_order(Bp, Lc);
  CHECK(Opaper.rdisc == F.unit_ideal());
  // and they lie in the computed maximal order
  CHECK(O.contains(Bp.unit_i()));
  CHECK(O.contains(x));
}

TEST_CASE("fixture algebras saturate to maximal orders") {
  CHECK(max1101().rdisc == field1101().unit_ideal());
  QuatAlgebra B1369 = find_algebra(field1369(), {});
  CHECK(maximal_order(B1369).rdisc == field1369().unit_ideal());
  QuatAlgebra B961 = find_algebra(field961(), {});
  CHECK(maximal_order(B961).rdisc == field961().unit_ideal());
}

TEST_CASE("eichler orders") {
  auto& B = hamilton();
  auto& Q = rationals();
  auto& O = hamilton_max();
  ZIdeal five = Q.principal_ideal(Q.from_int(5));
  Order O5 = eichler_order(O, five);
  CHECK(O5.rdisc == Q.principal_ideal(Q.from_int(10)));
  CHECK(lattice_index(B, O.lat, O5.lat) == 5);
  CHECK_THROWS_AS(eichler_order(O, Q.principal_ideal(Q.from_int(2))), NotCoprime);
  Order O1 = eichler_order(O, Q.unit_ideal());
  CHECK(O1.lat == O.lat);

  // cubic field: discriminant of O_0(P) is P
  auto& F = field1101();
  for (auto& P : F.split_prime(7)) {
    Order OP = eichler_order(max1101(), F.prime_ideal_lattice(P));
    CHECK(OP.rdisc == F.prime_ideal_lattice(P));
    break;
  }
}

TEST_CASE("projective line sizes and determinism") {
  auto& F = field1101();
  PrimeIdeal P2, P4;
  for (auto& P : F.split_prime(2)) (P.norm == 2 ? P2 : P4) = P;
  CHECK(p1_points(F, P2).size() == 3);
  CHECK(p1_points(F, P4).size() == 5);
  auto& F9 = field1369();
  auto P27 = F9.split_prime(3);
  REQUIRE(P27.size() == 1);
  CHECK(P27[0].norm == 27);
  CHECK(p1_points(F9, P27[0]).size() == 28);
  // deterministic: last point is (0 : 1), the rest are (1 : t)
  auto pts = p1_points(F, P2);
  CHECK(pts.back().x == F.zero());
  CHECK(pts.back().y == F.one());
  for (size_t i = 0; i + 1 < pts.size(); i++) CHECK(pts[i].x == F.one());
  CHECK(pts == p1_points(F, P2));
}

TEST_CASE("left ideals at a split prime of the Hamilton order") {
  auto& B = hamilton();
  auto& Q = rationals();
  auto& O = hamilton_max();
  auto P5 = Q.split_prime(5)[0];
  auto pts = p1_points(Q, P5);
  REQUIRE(pts.size() == 6);
  std::vector<QuatLattice> ideals;
  for (auto& a : pts) {
    QuatLattice I = left_ideal(O, P5, a);
    CHECK(lattice_nrd(B, I) == Q.principal_ideal(Q.from_int(5)));
    CHECK(lattice_index(B, O.lat, I) == 25);
    for (auto& J : ideals) CHECK(!(J == I));
    ideals.push_back(I);
    QuatElement alpha = principalize(O, I);
    CHECK(lattice_mul_elem(B, O.lat, alpha, true) == I);
    CHECK(Q.principal_ideal(B.nrd(alpha)) == Q.principal_ideal(Q.from_int(5)));
  }
}

TEST_CASE("principalization round-trips on random elements") {
  auto& B = alg1101();
  auto& F = field1101();
  auto& O = max1101();
  CHECK(principalize(O, O.lat).c[0].size() == size_t(F.n));  // unit for I = O
  uint64_t state = 12345;
  int done = 0;
  while (done < 50) {
    QuatElement x = B.zero();
    for (int k = 0; k < 4; k++) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      long c = long(state >> 61) - 4;  // in [-4, 3]
      if (c != 0) x = B.add(x, B.scale(F.from_int(c), O.basis[k]));
    }
    if (F.is_zero(B.nrd(x))) continue;
    QuatLattice I = lattice_mul_elem(B, O.lat, x, true);
    QuatElement alpha = principalize(O, I);
    CHECK(lattice_mul_elem(B, O.lat, alpha, true) == I);
    CHECK(F.principal_ideal(B.nrd(alpha)) == F.principal_ideal(B.nrd(x)));
    done++;
  }
}

TEST_CASE("norm-2 left ideals of the 1101 order principalize to w - 2 associates") {
  auto& B = alg1101();
  auto& F = field1101();
  auto& O = max1101();
  PrimeIdeal P2;
  for (auto& P : F.split_prime(2))
    if (P.norm == 2) P2 = P;
  ZIdeal wm2 = F.principal_ideal(poly_elem(F, 0, 1, -2));
  CHECK(wm2 == F.prime_ideal_lattice(P2));
  for (auto& a : p1_points(F, P2)) {
    QuatElement alpha = principalize(O, left_ideal(O, P2, a));
    CHECK(F.principal_ideal(B.nrd(alpha)) == wm2);
  }
}

TEST_CASE("hecke representatives") {
  auto& B = alg1101();
  auto& F = field1101();
  auto& O = max1101();
  PrimeIdeal P2;
  for (auto& P : F.split_prime(2))
    if (P.norm == 2) P2 = P;
  auto reps = hecke_reps(O, P2);
  auto pts = p1_points(F, P2);
  REQUIRE(reps.size() == pts.size());
  std::vector<QuatLattice> ideals;
  for (size_t i = 0; i < reps.size(); i++) {
    CHECK(F.is_totally_positive(B.nrd(reps[i])));
    CHECK(F.principal_ideal(B.nrd(reps[i])) == F.prime_ideal_lattice(P2));
    QuatLattice I = lattice_mul_elem(B, O.lat, reps[i], true);
    CHECK(I == left_ideal(O, P2, pts[i]));
    for (auto& J : ideals) CHECK(!(J == I));
    ideals.push_back(I);
  }
}

TEST_CASE("find_mu gives a unit of negative split norm") {
  auto& B = alg1101();
  auto& F = field1101();
  auto& O = max1101();
  QuatElement mu = find_mu(O);
  QVec nm = B.nrd(mu);
  Rat nn = F.norm(nm);
  CHECK((nn == 1 || nn == -1));
  CHECK(F.embedding_sign(nm, 0) < 0);
  CHECK(O.contains(mu));
  CHECK(O.contains(B.inv(mu)));
  // nrd(mu^2) is a square, hence totally positive
  CHECK(F.is_totally_positive(B.nrd(B.mul(mu, mu))));
}

TEST_CASE("two-sided ideals") {
  auto& B = hamilton();
  auto& Q = rationals();
  auto& O = hamilton_max();
  auto P2 = Q.split_prime(2)[0];
  auto [J, pi] = twosided_ideal(O, P2, 1);
  CHECK(Q.principal_ideal(B.nrd(pi)) == Q.principal_ideal(Q.from_int(2)));
  CHECK(lattice_mul_elem(B, O.lat, pi, true) == J);
  CHECK(lattice_mul_elem(B, O.lat, pi, false) == J);
  // J^2 = 2 O
  CHECK(lattice_mul(B, J, J) == lattice_mul_elem(B, O.lat, B.from_field(Q.from_int(2)), true));
  CHECK_THROWS_AS(twosided_ideal(O, P2, 2), NotExactDivisor);
  CHECK_THROWS_AS(twosided_ideal(O, Q.split_prime(5)[0], 1), NotExactDivisor);

  // Eichler level case
  auto P5 = Q.split_prime(5)[0];
  Order O5 = eichler_order(O, Q.principal_ideal(Q.from_int(5)));
  auto [J5, pi5] = twosided_ideal(O5, P5, 1);
  CHECK(lattice_mul_elem(B, O5.lat, pi5, true) == J5);
  CHECK(lattice_mul_elem(B, O5.lat, pi5, false) == J5);
  CHECK(lattice_mul(B, J5, J5) ==
        lattice_mul_elem(B, O5.lat, B.from_field(Q.from_int(5)), true));
}
