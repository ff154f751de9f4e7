#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hmf/config.hpp"
#include "hmf/quaternion.hpp"

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

// deterministic small pseudo-random field elements
static QVec rnd_elem(const NumberField& F, uint64_t& state) {
  QVec x(F.n);
  for (int i = 0; i < F.n; i++) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    x[i] = Rat(long(state >> 56) - 128, 1 + long((state >> 40) & 7));
    x[i].canonicalize();
  }
  return x;
}

static QuatElement rnd_quat(const QuatAlgebra& B, uint64_t& state) {
  return B.elem(rnd_elem(*B.F, state), rnd_elem(*B.F, state), rnd_elem(*B.F, state),
                rnd_elem(*B.F, state));
}

TEST_CASE("hilbert symbols over the rationals") {
  auto& Q = rationals();
  auto P2 = Q.split_prime(2)[0];
  auto P3 = Q.split_prime(3)[0];
  auto P5 = Q.split_prime(5)[0];
  auto sym = [&](long a, long b, const PrimeIdeal& P) {
    return hilbert_symbol(Q, Q.from_int(a), Q.from_int(b), P);
  };
  CHECK(sym(-1, -1, P2) == -1);
  CHECK(sym(-1, -1, P3) == 1);
  CHECK(sym(-1, -1, P5) == 1);
  CHECK(sym(-1, 3, P2) == -1);
  CHECK(sym(-1, 3, P3) == -1);
  CHECK(sym(2, 3, P3) == -1);
  CHECK(sym(2, 2, P2) == 1);
  CHECK(sym(-2, -2, P2) == -1);
  CHECK(sym(-1, 5, P2) == 1);
  CHECK(sym(1, 30, P2) == 1);
  CHECK(sym(3, 3, P3) == -1);
  CHECK(sym(5, 5, P5) == 1);  // (5,5) = (5,-1), and -1 is a square mod 5
}

TEST_CASE("hamilton quaternions ramify exactly at 2 and infinity") {
  auto& Q = rationals();
  QuatAlgebra B(Q, Q.from_int(-1), Q.from_int(-1));
  auto ram = B.ramified_primes();
  REQUIRE(ram.size() == 1);
  CHECK(ram[0].p == 2);
  CHECK(B.real_ramified() == std::vector<int>{1});
}

TEST_CASE("a square first parameter gives a totally split algebra") {
  auto& F = field1101();
  QuatAlgebra B(F, F.one(), F.gen());
  CHECK(B.ramified_primes().empty());
  CHECK(B.real_ramified() == std::vector<int>{0, 0, 0});
}

TEST_CASE("reduced norm and trace identities") {
  auto& F = field1101();
  QuatAlgebra B(F, F.neg(F.one()), F.sub(F.gen(), F.from_int(3)));
  uint64_t st = 12345;
  for (int trial = 0; trial < 25; trial++) {
    QuatElement x = rnd_quat(B, st), y = rnd_quat(B, st);
    CHECK(F.is_zero(F.sub(B.nrd(B.mul(x, y)), F.mul(B.nrd(x), B.nrd(y)))));
    // x + conj(x) = trd(x), x * conj(x) = nrd(x)
    QuatElement s = B.add(x, B.conj(x));
    CHECK(s == B.from_field(B.trd(x)));
    CHECK(B.mul(x, B.conj(x)) == B.from_field(B.nrd(x)));
    if (!F.is_zero(B.nrd(x))) CHECK(B.mul(x, B.inv(x)) == B.one());
  }
  // i^2 = a, j^2 = b, ij = -ji
  CHECK(B.mul(B.unit_i(), B.unit_i()) == B.from_field(B.a));
  CHECK(B.mul(B.unit_j(), B.unit_j()) == B.from_field(B.b));
  CHECK(B.mul(B.unit_i(), B.unit_j()) == B.neg(B.mul(B.unit_j(), B.unit_i())));
}

TEST_CASE("the 1101 algebra with unit parameter is everywhere unramified over the finite places") {
  auto& F = field1101();
  // b = -w^2 + w + 1, a unit positive at the first real place only
  QVec b = F.add(F.sub(F.gen(), F.mul(F.gen(), F.gen())), F.one());
  CHECK(F.norm(b) == 16);
  // positive at the middle embedding only (embeddings ordered by the root)
  CHECK(F.embedding_sign(b, 0) == -1);
  CHECK(F.embedding_sign(b, 1) == 1);
  CHECK(F.embedding_sign(b, 2) == -1);
  QuatAlgebra B(F, F.neg(F.one()), b);
  CHECK(B.ramified_primes().empty());
  CHECK(B.real_ramified() == std::vector<int>{1, 0, 1});
}

TEST_CASE("find_algebra with trivial discriminant over the three cubic fields") {
  for (NumberField* Fp : {&field1101(), &field1369(), &field961()}) {
    auto& F = *Fp;
    QuatAlgebra B = find_algebra(F, {});
    CHECK(B.ramified_primes().empty());
    CHECK(B.real_ramified() == std::vector<int>{0, 1, 1});
  }
}

TEST_CASE("find_algebra over the rationals") {
  auto& Q = rationals();
  QuatAlgebra B = find_algebra(Q, {});
  CHECK(B.ramified_primes().empty());
  CHECK(B.real_ramified() == std::vector<int>{0});
  // indefinite with one finite ramified pair is impossible by parity
  auto P3 = Q.split_prime(3)[0];
  CHECK_THROWS_AS(find_algebra(Q, {P3}), std::invalid_argument);
}

TEST_CASE("find_algebra with a prescribed pair of odd primes") {
  auto& F = field1101();
  PrimeIdeal P3 = F.split_prime(3)[0];
  std::vector<PrimeIdeal> P7 = F.split_prime(7);
  std::vector<PrimeIdeal> D{P3, P7[0]};
  QuatAlgebra B = find_algebra(F, D);
  auto ram = B.ramified_primes();
  REQUIRE(ram.size() == 2);
  CHECK((ram[0] == D[0] || ram[0] == D[1]));
  CHECK((ram[1] == D[0] || ram[1] == D[1]));
  CHECK(B.real_ramified() == std::vector<int>{0, 1, 1});
}

TEST_CASE("real splitting of the split matrix algebra over the rationals") {
  auto& Q = rationals();
  QuatAlgebra B(Q, Q.one(), Q.one());
  RealSplitting s = make_real_splitting(B);
  CHECK(s.gen[1][0][0] == doctest::Approx(1));
  CHECK(s.gen[1][1][1] == doctest::Approx(-1));
  CHECK(s.gen[1][0][1] == doctest::Approx(0));
  CHECK(s.gen[2][0][1] == doctest::Approx(1));
  CHECK(s.gen[2][1][0] == doctest::Approx(1));
  CHECK(s.gen[2][0][0] == doctest::Approx(0));
}

TEST_CASE("real splitting is a ring map matching norm and trace") {
  auto& F = field1101();
  QuatAlgebra B = find_algebra(F, {});
  RealSplitting s = make_real_splitting(B);
  uint64_t st = 777;
  for (int trial = 0; trial < 20; trial++) {
    QuatElement x = rnd_quat(B, st), y = rnd_quat(B, st);
    auto mx = real_image(B, s, x), my = real_image(B, s, y);
    auto mxy = real_image(B, s, B.mul(x, y));
    double scale = 1;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) scale = std::max(scale, std::fabs(mx[i][j] * my[i][j]));
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) {
        double prod = mx[i][0] * my[0][j] + mx[i][1] * my[1][j];
        CHECK(mxy[i][j] == doctest::Approx(prod).epsilon(1e-8).scale(scale));
      }
    double det = mx[0][0] * mx[1][1] - mx[0][1] * mx[1][0];
    double tr = mx[0][0] + mx[1][1];
    CHECK(det == doctest::Approx(F.embed(B.nrd(x), 0)).epsilon(1e-8).scale(scale));
    CHECK(tr == doctest::Approx(F.embed(B.trd(x), 0)).epsilon(1e-8).scale(scale));
  }
}

TEST_CASE("real splitting refuses a definite algebra") {
  auto& Q = rationals();
  QuatAlgebra B(Q, Q.from_int(-1), Q.from_int(-1));
  CHECK_THROWS_AS(make_real_splitting(B), RamifiedPlace);
}

static void check_prime_splitting(const QuatAlgebra& B, const PrimeSplitting& s, uint64_t seed) {
  const NumberField& F = *B.F;
  uint64_t st = seed;
  for (int trial = 0; trial < 10; trial++) {
    QuatElement x = rnd_quat(B, st), y = rnd_quat(B, st);
    // clear denominators: the map is defined on integral coordinates
    for (auto& c : x.c)
      for (auto& q : c) q = Rat(q.get_num());
    for (auto& c : y.c)
      for (auto& q : c) q = Rat(q.get_num());
    auto mx = prime_image(B, s, x), my = prime_image(B, s, y);
    auto mxy = prime_image(B, s, B.mul(x, y));
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) {
        QVec prod = s.R.add(s.R.mul(mx[i][0], my[0][j]), s.R.mul(mx[i][1], my[1][j]));
        CHECK(s.R.is_zero(s.R.sub(mxy[i][j], prod)));
      }
    QVec det = s.R.sub(s.R.mul(mx[0][0], mx[1][1]), s.R.mul(mx[0][1], mx[1][0]));
    QVec tr = s.R.add(mx[0][0], mx[1][1]);
    CHECK(s.R.is_zero(s.R.sub(det, s.R.reduce(F.local_rep(B.nrd(x), s.P, s.e)))));
    CHECK(s.R.is_zero(s.R.sub(tr, s.R.reduce(F.local_rep(B.trd(x), s.P, s.e)))));
  }
}

TEST_CASE("prime splitting of the hamilton quaternions at 5") {
  auto& Q = rationals();
  QuatAlgebra B(Q, Q.from_int(-1), Q.from_int(-1));
  auto P5 = Q.split_prime(5)[0];
  for (int e : {1, 3}) {
    PrimeSplitting s = make_prime_splitting(B, P5, e);
    check_prime_splitting(B, s, 42 + e);
  }
  auto P2 = Q.split_prime(2)[0];
  CHECK_THROWS_AS(make_prime_splitting(B, P2, 1), RamifiedPlace);
}

TEST_CASE("prime splittings over the cubic fields") {
  for (NumberField* Fp : {&field1101(), &field1369(), &field961()}) {
    auto& F = *Fp;
    QuatAlgebra B = find_algebra(F, {});
    for (auto& P : F.primes_up_to(12)) {
      if (P.p == 2 || F.valuation(B.a, P) != 0 || F.valuation(B.b, P) != 0) continue;
      PrimeSplitting s = make_prime_splitting(B, P, 2);
      check_prime_splitting(B, s, 1000 + P.norm.get_ui());
    }
  }
}
