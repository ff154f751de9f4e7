#pragma once

#include <array>

#include "hmf/numberfield.hpp"

namespace hmf {

struct RamifiedPlace : std::runtime_error {
  explicit RamifiedPlace(const std::string& m) : std::runtime_error(m) {}
};
struct LiftFailed : std::runtime_error {
  explicit LiftFailed(const std::string& m) : std::runtime_error(m) {}
};
struct SearchExhausted : std::runtime_error {
  explicit SearchExhausted(const std::string& m) : std::runtime_error(m) {}
};

// Element x0 + x1*i + x2*j + x3*ij of a quaternion algebra (a,b | F).
struct QuatElement {
  std::array<QVec, 4> c;
  bool operator==(const QuatElement& o) const { return c == o.c; }
};

// Distinct prime factors of N (trial division, then a primality certificate;
// throws if a large composite cofactor remains).
std::vector<Int> distinct_prime_factors(Int N);

// Hilbert symbol (a,b)_P for nonzero a, b: +1 iff ax^2 + by^2 = z^2 has a
// nontrivial solution over the completion at P. Odd P by the tame formula
// on valuations and residue Legendre symbols; even P by testing solubility
// modulo P^(2e+1+v(a)+v(b)) after stripping square factors.
int hilbert_symbol(const NumberField& F, const QVec& a, const QVec& b, const PrimeIdeal& P);

class QuatAlgebra {
 public:
  const NumberField* F;
  QVec a, b;  // i^2 = a, j^2 = b, ji = -ij

  QuatAlgebra(const NumberField& field, QVec a_, QVec b_);

  QuatElement zero() const;
  QuatElement one() const;
  QuatElement unit_i() const;
  QuatElement unit_j() const;
  QuatElement unit_ij() const;
  QuatElement from_field(const QVec& x) const;
  QuatElement elem(QVec x0, QVec x1, QVec x2, QVec x3) const;

  QuatElement add(const QuatElement& x, const QuatElement& y) const;
  QuatElement sub(const QuatElement& x, const QuatElement& y) const;
  QuatElement neg(const QuatElement& x) const;
  QuatElement scale(const QVec& s, const QuatElement& x) const;
  QuatElement mul(const QuatElement& x, const QuatElement& y) const;
  QuatElement conj(const QuatElement& x) const;
  QuatElement inv(const QuatElement& x) const;  // throws on zero divisors
  QVec nrd(const QuatElement& x) const;
  QVec trd(const QuatElement& x) const;
  bool is_zero(const QuatElement& x) const;
  std::string str(const QuatElement& x) const;

  // Finite primes with symbol -1, sorted by (norm, p); cached.
  const std::vector<PrimeIdeal>& ramified_primes() const;
  bool is_ramified(const PrimeIdeal& P) const;
  // Entry k: is the algebra ramified (definite) at the k-th real place?
  std::vector<int> real_ramified() const;

 private:
  mutable std::vector<PrimeIdeal> ram_;
  mutable bool ram_known_ = false;
};

// Algebra with reduced discriminant exactly the product of the given
// distinct finite primes, ramified at every real place except the first.
// Requires |D| + n - 1 even. The result is re-verified before returning.
QuatAlgebra find_algebra(const NumberField& F, const std::vector<PrimeIdeal>& D);

// Splitting B tensor R -> M_2(R) at the first real place. Throws
// RamifiedPlace if the algebra is definite there.
struct RealSplitting {
  // images of 1, i, j, ij at the split place
  std::array<std::array<std::array<double, 2>, 2>, 4> gen;
};
RealSplitting make_real_splitting(const QuatAlgebra& B);
std::array<std::array<double, 2>, 2> real_image(const QuatAlgebra& B, const RealSplitting& s,
                                                const QuatElement& x);

// Splitting B tensor Z_F/P^e -> M_2(Z_F/P^e) for odd P at which a and b are
// units and B is unramified: a zero divisor of B mod P gives a rank-one
// idempotent, exact since elements satisfy their reduced characteristic
// polynomial; the left ideal it generates is the rank-two module acted on.
struct PrimeSplitting {
  PrimeIdeal P;
  int e;
  ResidueRing R;
  // images of 1, i, j, ij, entries reduced mod P^e
  std::array<std::array<std::array<QVec, 2>, 2>, 4> gen;
};
PrimeSplitting make_prime_splitting(const QuatAlgebra& B, const PrimeIdeal& P, int e);
std::array<std::array<QVec, 2>, 2> prime_image(const QuatAlgebra& B, const PrimeSplitting& s,
                                               const QuatElement& x);

}  // namespace hmf
