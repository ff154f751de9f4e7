#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmf/linalg.hpp"
#include "hmf/lll.hpp"

using namespace hmf;

static QMat qm(int r, int c, std::vector<long> v) {
  QMat m(r, c);
  for (int i = 0; i < r; i++)
    for (int j = 0; j < c; j++) m.at(i, j) = v[i * c + j];
  return m;
}

static ZMat zm(int r, int c, std::vector<long> v) {
  ZMat m(r, c);
  for (int i = 0; i < r; i++)
    for (int j = 0; j < c; j++) m.at(i, j) = v[i * c + j];
  return m;
}

TEST_CASE("rref and rank") {
  QMat m = qm(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto r = rref(m);
  CHECK(r.rank == 2);
  CHECK(r.pivots[0] == 0);
  CHECK(r.pivots[1] == 1);
}

TEST_CASE("kernel of singular matrix") {
  QMat m = qm(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto k = kernel(m);
  REQUIRE(k.size() == 1);
  QVec v = k[0];
  CHECK(v[0] * Rat(-2) == v[1]);
  CHECK(v[0] == v[2]);
  QVec img = qmat_apply(m, v);
  for (auto& x : img) CHECK(x == 0);
}

TEST_CASE("solve linear system") {
  QMat m = qm(2, 2, {2, 1, 1, 1});
  QVec b{Rat(3), Rat(2)};
  auto x = solve(m, b);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 1);
  CHECK((*x)[1] == 1);
  QMat s = qm(2, 2, {1, 2, 2, 4});
  QVec b2{Rat(1), Rat(3)};
  CHECK(!solve(s, b2).has_value());
}

TEST_CASE("determinant and inverse") {
  QMat m = qm(3, 3, {2, 0, 1, 0, 3, 0, 1, 0, 1});
  CHECK(qmat_det(m) == 3);
  auto inv = qmat_inverse(m);
  REQUIRE(inv.has_value());
  QMat p = qmat_mul(m, *inv);
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) CHECK(p.at(i, j) == (i == j ? 1 : 0));
}

TEST_CASE("charpoly of companion matrix") {
  // companion of x^3 - x^2 - 9x + 12: charpoly coeffs low->high {12,-9,-1,1}
  QMat m = qm(3, 3, {0, 0, -12, 1, 0, 9, 0, 1, 1});
  auto cp = charpoly(m);
  REQUIRE(cp.size() == 4);
  CHECK(cp[0] == 12);
  CHECK(cp[1] == -9);
  CHECK(cp[2] == -1);
  CHECK(cp[3] == 1);
}

TEST_CASE("rational roots with multiplicity") {
  // (x-1)^2 (2x+3) = 2x^3 - x^2 - 4x + 3
  QVec p{Rat(3), Rat(-4), Rat(-1), Rat(2)};
  QVec rest;
  auto roots = rational_roots(p, &rest);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == Rat(-3, 2));
  CHECK(roots[1] == 1);
  CHECK(roots[2] == 1);
  REQUIRE(rest.size() == 1);
}

TEST_CASE("irreducible quadratic has no rational roots") {
  QVec p{Rat(1), Rat(1), Rat(1)};  // x^2 + x + 1
  QVec rest;
  auto roots = rational_roots(p, &rest);
  CHECK(roots.empty());
  CHECK(rest.size() == 3);
}

TEST_CASE("hnf canonical form") {
  ZMat m = zm(2, 2, {4, 6, 2, 4});
  ZMat h = hnf(m);
  REQUIRE(h.nr == 2);
  CHECK(h.at(0, 0) == 2);
  CHECK(h.at(0, 1) == 0);
  CHECK(h.at(1, 0) == 0);
  CHECK(h.at(1, 1) == 2);
}

TEST_CASE("hnf transform is unimodular") {
  ZMat m = zm(3, 3, {3, 1, 2, 1, 5, 7, 2, 2, 2});
  auto t = hnf_transform(m);
  CHECK(t.rank == 3);
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) {
      Int s = 0;
      for (int k = 0; k < 3; k++) s += t.U.at(i, k) * m.at(k, j);
      CHECK(s == t.H.at(i, j));
    }
  Int d = zmat_det(t.U);
  CHECK((d == 1 || d == -1));
}

TEST_CASE("hnf membership and solve") {
  ZMat m = zm(2, 2, {2, 0, 1, 3});
  ZMat h = hnf(m);
  std::vector<Int> v{Int(3), Int(3)};
  CHECK(hnf_contains(h, v));
  std::vector<Int> w{Int(1), Int(0)};
  CHECK(!hnf_contains(h, w));
  auto coef = hnf_solve(h, v);
  REQUIRE(coef.has_value());
  for (int j = 0; j < 2; j++) {
    Int s = 0;
    for (int k = 0; k < 2; k++) s += (*coef)[k] * h.at(k, j);
    CHECK(s == v[j]);
  }
}

TEST_CASE("integer left kernel") {
  ZMat m = zm(3, 2, {1, 2, 2, 4, 3, 6});
  auto k = z_left_kernel(m);
  REQUIRE(k.size() == 2);
  for (auto& row : k) {
    for (int j = 0; j < 2; j++) {
      Int s = 0;
      for (int i = 0; i < 3; i++) s += row[i] * m.at(i, j);
      CHECK(s == 0);
    }
  }
}

TEST_CASE("lll reduces a skewed basis of Z^2") {
  DMat g{{1, 1000}, {1000, 1000001}};
  auto U = lll_reduce_gram(g);
  CHECK(g[0][0] == doctest::Approx(1.0));
  CHECK(g[1][1] == doctest::Approx(1.0));
  CHECK(g[0][1] == doctest::Approx(0.0));
  ZMat um = zm(2, 2, {0, 0, 0, 0});
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) um.at(i, j) = U[i][j];
  Int d = zmat_det(um);
  CHECK((d == 1 || d == -1));
}

TEST_CASE("short vector enumeration on hexagonal lattice") {
  // A2 gram {{2,1},{1,2}}: 3 vector pairs of norm 2, none shorter
  DMat g{{2, 1}, {1, 2}};
  int count = 0;
  double minq = 1e18;
  enumerate_short_vectors(g, 2.0, [&](const std::vector<long>&, double q) {
    count++;
    if (q < minq) minq = q;
  });
  CHECK(count == 3);
  CHECK(minq == doctest::Approx(2.0));
}
