#pragma once

#include "hmf/quaternion.hpp"

namespace hmf {

struct SaturationStalled : std::runtime_error {
  explicit SaturationStalled(const std::string& m) : std::runtime_error(m) {}
};
struct EnumerationExhausted : std::runtime_error {
  explicit EnumerationExhausted(const std::string& m) : std::runtime_error(m) {}
};
struct NotCoprime : std::invalid_argument {
  explicit NotCoprime(const std::string& m) : std::invalid_argument(m) {}
};
struct NotExactDivisor : std::invalid_argument {
  explicit NotExactDivisor(const std::string& m) : std::invalid_argument(m) {}
};

// ---------------------------------------------------------------------------
// Full-rank Z-lattices in B, rank 4n. Standard coordinates of a quaternion
// are the 4n rationals [x0 | x1 | x2 | x3] over the integral basis of Z_F;
// a lattice is stored as the canonical HNF of den * lattice with the
// denominator minimal, so equal lattices compare equal.

struct QuatLattice {
  ZMat rows;
  Int den = 1;
  bool operator==(const QuatLattice& o) const { return den == o.den && rows == o.rows; }
};

QVec quat_coords(const QuatAlgebra& B, const QuatElement& x);
QuatElement quat_from_coords(const QuatAlgebra& B, const QVec& v);

// Z_F-module generated by gens; must have full rank 4n.
QuatLattice quat_lattice(const QuatAlgebra& B, const std::vector<QuatElement>& gens);
QuatLattice lattice_sum(const QuatAlgebra& B, const QuatLattice& L, const QuatLattice& M);
// Module product L*M (Z_F-span of pairwise products).
QuatLattice lattice_mul(const QuatAlgebra& B, const QuatLattice& L, const QuatLattice& M);
// L*x or x*L for a single quaternion.
QuatLattice lattice_mul_elem(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x,
                             bool on_right);
// L + Z_F * x.
QuatLattice lattice_adjoin(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x);
bool lattice_contains(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x);
std::vector<QuatElement> lattice_zbasis(const QuatAlgebra& B, const QuatLattice& L);
// Generalized index [M : L] as a positive rational (integer when L <= M).
Rat lattice_index(const QuatAlgebra& B, const QuatLattice& M, const QuatLattice& L);
// Ideal generated by the reduced norms of the elements of L (norms of a
// Z-basis together with the polar values trd(x conj(y))).
ZIdeal lattice_nrd(const QuatAlgebra& B, const QuatLattice& L);
// Free Z_F-basis of a lattice that is a Z_F-module (class number 1).
std::array<QuatElement, 4> lattice_zf_basis(const QuatAlgebra& B, const QuatLattice& L);

// ---------------------------------------------------------------------------
// Splittings O (x) Z_F/P^e -> M_2(Z_F/P^e) adapted to an order maximal at P
// (P coprime to the reduced discriminant; even P and primes dividing a, b
// are fine since the order repairs the bad local structure of (a, b)).
// Self-contained: carries the coordinate data of the order it came from.

using RMat2 = std::array<std::array<QVec, 2>, 2>;

struct OrderSplitting {
  PrimeIdeal P;
  int e;
  ResidueRing R;
  std::array<QuatElement, 4> basis;
  QMat minv_t;
  std::array<RMat2, 4> gen;  // images of basis
};

// ---------------------------------------------------------------------------
// Orders.

class Order {
 public:
  const QuatAlgebra* B;
  QuatLattice lat;
  std::array<QuatElement, 4> basis;  // free Z_F-basis
  ZIdeal rdisc;                      // reduced discriminant
  ZIdeal level;                      // Eichler level (unit ideal if maximal)
  // Splittings of the parent maximal order at the level primes, precision
  // twice the level exponent; empty for maximal orders.
  std::vector<OrderSplitting> level_locals;

  // Z_F-coordinates of x over `basis` (length-n coordinate vector each).
  std::array<QVec, 4> coords(const QuatElement& x) const;
  bool contains(const QuatElement& x) const { return lattice_contains(*B, lat, x); }

  QMat minv_t;  // standard coords -> flattened basis coords
};

// Verifies that the lattice is an order (contains 1, closed under
// multiplication) and computes its basis and reduced discriminant.
Order make_order(const QuatAlgebra& B, const QuatLattice& lat);
// Z_F<1, i, j, ij> after scaling the generators integral.
Order standard_order(const QuatAlgebra& B);
// Saturates the standard order to a maximal order: odd primes via an
// explicit integral enlargement built from a Hensel-lifted square root,
// even primes by enumerating index-p superlattices. Deterministic.
Order maximal_order(const QuatAlgebra& B);
ZIdeal reduced_discriminant(const QuatAlgebra& B, const QuatLattice& lat);

OrderSplitting make_order_splitting(const Order& O, const PrimeIdeal& P, int e);
// Image of x; coordinates of x over the splitting's order basis must be
// integral at P (denominators prime to P are handled).
RMat2 order_image(const QuatAlgebra& B, const OrderSplitting& s, const QuatElement& x);

// Eichler order O_0(N) = O cap iota^-1(upper triangular mod P^e) over the
// prime powers of N; N must be coprime to the discriminant (NotCoprime).
// The order keeps the splittings it was cut out with for later use.
Order eichler_order(const Order& Omax, const ZIdeal& N);
// Splitting (precision 2e) of the parent maximal order at a level prime.
const OrderSplitting& level_splitting(const Order& O, const PrimeIdeal& P);

// ---------------------------------------------------------------------------
// P^1(Z_F/P) and left ideals.

struct P1Point {
  QVec x, y;  // normalized: x = 1, or (x, y) = (0, 1)
  bool operator==(const P1Point& o) const { return x == o.x && y == o.y; }
};

// (1 : t) for t running through the canonical residue enumeration, then
// (0 : 1); size N(P) + 1.
std::vector<P1Point> p1_points(const NumberField& F, const PrimeIdeal& P);

// Left ideal I_a = O u + O P with iota(u) = (x y; 0 0) mod P at a = (x : y);
// reduced norm P, index N(P)^2.
QuatLattice left_ideal(const Order& O, const OrderSplitting& s, const P1Point& a);
QuatLattice left_ideal(const Order& O, const PrimeIdeal& P, const P1Point& a);

// Generator x with O x = I, found as a short vector of the definite form
// Q(x) = sum_{k>=2} v_k(nrd x) + |iota_1(x)|_F^2 on I. Throws
// EnumerationExhausted after the radius doubling cap.
QuatElement principalize(const Order& O, const QuatLattice& I);

// Unit of O whose reduced norm is negative at the split real place.
QuatElement find_mu(const Order& O);

// Hecke representatives at P: alpha_a with O alpha_a = I_a and nrd alpha_a
// totally positive, in P^1 enumeration order.
std::vector<QuatElement> hecke_reps(const Order& O, const PrimeIdeal& P);

// Two-sided ideal above P^e together with a totally positive generator pi.
// For P dividing the discriminant (e = 1): the trace-radical above P. For
// P^e exactly dividing the level: O u + O P^e with iota(u) = antidiag(1,
// pi_P^e) mod P^2e. Throws NotExactDivisor if P^e does not exactly divide
// discriminant * level.
std::pair<QuatLattice, QuatElement> twosided_ideal(const Order& O, const PrimeIdeal& P, int e);

}  // namespace hmf
