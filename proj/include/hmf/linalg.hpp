#pragma once

#include <optional>
#include <vector>

#include "hmf/rational.hpp"

namespace hmf {

// Dense exact rational matrix, row major.
struct QMat {
  int nr = 0, nc = 0;
  std::vector<Rat> a;

  QMat() = default;
  QMat(int r, int c) : nr(r), nc(c), a(size_t(r) * c) {}

  Rat& at(int i, int j) { return a[size_t(i) * nc + j]; }
  const Rat& at(int i, int j) const { return a[size_t(i) * nc + j]; }

  static QMat identity(int n);
  bool operator==(const QMat& o) const { return nr == o.nr && nc == o.nc && a == o.a; }
};

using QVec = std::vector<Rat>;

QMat qmat_mul(const QMat& A, const QMat& B);
QVec qmat_apply(const QMat& A, const QVec& x);
QMat qmat_add(const QMat& A, const QMat& B);
QMat qmat_sub(const QMat& A, const QMat& B);
QMat qmat_transpose(const QMat& A);
bool qmat_is_zero(const QMat& A);

struct Rref {
  QMat R;
  std::vector<int> pivots;  // pivot column per nonzero row
  int rank = 0;
};

Rref rref(const QMat& A);

// Basis of {x : A x = 0}, as columns returned in a list of vectors.
std::vector<QVec> kernel(const QMat& A);

// Solves A x = b; empty optional if inconsistent.
std::optional<QVec> solve(const QMat& A, const QVec& b);

Rat qmat_det(const QMat& A);
std::optional<QMat> qmat_inverse(const QMat& A);

// Characteristic polynomial of a square matrix, coefficients low to high,
// monic of degree n (Faddeev-LeVerrier).
QVec charpoly(const QMat& A);

// Rational roots of a polynomial with rational coefficients, with
// multiplicity (repeated entries). Remaining nontrivial factor (monic,
// no rational roots) is returned through `rest` when non-null.
std::vector<Rat> rational_roots(const QVec& poly, QVec* rest = nullptr);

std::string poly_str(const QVec& poly, const std::string& var = "x");

// ---------------------------------------------------------------------------
// Integer matrices and lattices.

struct ZMat {
  int nr = 0, nc = 0;
  std::vector<Int> a;

  ZMat() = default;
  ZMat(int r, int c) : nr(r), nc(c), a(size_t(r) * c) {}

  Int& at(int i, int j) { return a[size_t(i) * nc + j]; }
  const Int& at(int i, int j) const { return a[size_t(i) * nc + j]; }
  bool operator==(const ZMat& o) const { return nr == o.nr && nc == o.nc && a == o.a; }
};

// Row-style Hermite normal form of the lattice spanned by the rows of A:
// zero rows dropped, pivots positive, entries above a pivot reduced into
// [0, pivot). Canonical for a given row span.
ZMat hnf(const ZMat& A);

// HNF together with a unimodular U such that U*A = [H; 0].
struct HnfTransform {
  ZMat H;      // full nr rows; rows beyond rank are zero
  ZMat U;      // nr x nr unimodular
  int rank = 0;
};
HnfTransform hnf_transform(const ZMat& A);

// Basis for the left integer kernel {x : x A = 0}.
std::vector<std::vector<Int>> z_left_kernel(const ZMat& A);

// Is v in the row span (over Z) of an HNF matrix H?
bool hnf_contains(const ZMat& H, const std::vector<Int>& v);

// Solve x*H = v over Z for HNF H; empty if not in the lattice.
std::optional<std::vector<Int>> hnf_solve(const ZMat& H, const std::vector<Int>& v);

// Determinant of a square integer matrix (via rational elimination).
Int zmat_det(const ZMat& A);

}  // namespace hmf
