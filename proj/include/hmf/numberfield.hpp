#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmf/linalg.hpp"
#include "hmf/poly.hpp"

namespace hmf {

struct PrecisionExhausted : std::runtime_error {
  explicit PrecisionExhausted(const std::string& m) : std::runtime_error(m) {}
};
struct GeneratorNotFound : std::runtime_error {
  explicit GeneratorNotFound(const std::string& m) : std::runtime_error(m) {}
};

// Prime ideal (p, gen2) of Z_F. For p prime to the index [Z_F : Z[w]] the
// second generator is g(w) for an irreducible factor g of f mod p and
// residue arithmetic runs through g ("kummer" form). For index divisors the
// ideal is found by decomposing Z_F/pZ_F directly; only residue degree 1 is
// supported there.
struct PrimeIdeal {
  Int p;
  bool kummer = true;
  PPoly g;      // factor of f mod p (kummer form only)
  QVec gen2;    // second generator as a field element
  ZMat lattice; // canonical HNF over the integral basis
  int e;        // ramification index
  int fdeg;     // residue degree
  Int norm;     // p^fdeg

  bool operator==(const PrimeIdeal& o) const { return p == o.p && lattice == o.lattice; }
};

// Integral Z_F-ideal as a full-rank Z-lattice, rows in canonical HNF over
// the integral basis.
struct ZIdeal {
  ZMat h;
  bool operator==(const ZIdeal& o) const { return h == o.h; }
};

// Totally real number field of degree n. Elements are QVec coordinate
// vectors over the integral basis; integrality is coordinate integrality.
class NumberField {
 public:
  ZPoly poly;       // monic defining polynomial, degree n
  int n = 0;
  Int disc;         // field discriminant
  Int poly_disc;    // disc(poly) = index^2 * disc
  Int index;        // [Z_F : Z[w]]
  QMat basis;       // row i = integral basis element b_i over the power basis
  QMat basis_inv;
  std::vector<QVec> units;  // fundamental units over the integral basis

  NumberField(ZPoly f, QMat basis_rows, Int d_F, std::vector<QVec> unit_list);

  // -- element arithmetic ---------------------------------------------------
  QVec zero() const { return QVec(n, Rat(0)); }
  QVec one() const;
  QVec from_int(const Int& m) const;
  QVec from_rat(const Rat& r) const;
  QVec gen() const;  // the root w, over the integral basis
  QVec add(const QVec& x, const QVec& y) const;
  QVec sub(const QVec& x, const QVec& y) const;
  QVec neg(const QVec& x) const;
  QVec mul(const QVec& x, const QVec& y) const;
  QVec scale(const Rat& c, const QVec& x) const;
  QVec inv(const QVec& x) const;
  QVec div(const QVec& x, const QVec& y) const { return mul(x, inv(y)); }
  QVec pow(const QVec& x, long e) const;
  QMat rep_matrix(const QVec& x) const;  // matrix of y -> x*y on basis coords
  Rat trace(const QVec& x) const;
  Rat norm(const QVec& x) const;
  bool is_zero(const QVec& x) const;
  bool is_integral(const QVec& x) const;
  bool is_rational(const QVec& x) const;
  Rat rational_part(const QVec& x) const;  // requires is_rational
  QVec power_coords(const QVec& x) const;  // coords over 1, w, ..., w^{n-1}
  QVec from_power(const QVec& c) const;
  std::string str(const QVec& x) const;    // e.g. "w^2 - 2*w + 1/3"

  // -- real embeddings ------------------------------------------------------
  // Certified interval [lo, hi] containing v_k(x); width shrinks as bits
  // grows. Throws PrecisionExhausted past the 2^14-bit refinement cap.
  std::pair<Rat, Rat> embed_interval(const QVec& x, int k, long bits) const;
  double embed(const QVec& x, int k) const;
  int embedding_sign(const QVec& x, int k) const;  // exact; 0 iff x == 0
  std::vector<int> sign_vector(const QVec& x) const;
  bool is_totally_positive(const QVec& x) const;

  // -- primes and ideals ----------------------------------------------------
  // Kummer-Dedekind for p prime to the index; otherwise a direct
  // decomposition of Z_F/pZ_F (small p only).
  std::vector<PrimeIdeal> split_prime(const Int& p) const;
  std::vector<PrimeIdeal> primes_up_to(long bound) const;  // sorted by norm
  QVec second_gen(const PrimeIdeal& P) const;              // g(w)
  ZIdeal prime_ideal_lattice(const PrimeIdeal& P) const;
  ZIdeal ideal_from_gens(const std::vector<QVec>& gens) const;  // integral gens
  ZIdeal principal_ideal(const QVec& x) const;
  ZIdeal ideal_mul(const ZIdeal& a, const ZIdeal& b) const;
  ZIdeal ideal_pow(const ZIdeal& a, int k) const;
  ZIdeal unit_ideal() const;
  Int ideal_norm(const ZIdeal& a) const;
  bool ideal_contains(const ZIdeal& a, const QVec& x) const;  // x integral
  int valuation(const QVec& x, const PrimeIdeal& P) const;    // x != 0
  int ideal_valuation(const ZIdeal& a, const PrimeIdeal& P) const;
  QVec uniformizer(const PrimeIdeal& P) const;  // valuation exactly 1
  ZIdeal ideal_intersect(const ZIdeal& a, const ZIdeal& b) const;
  // Solve c*x == y (mod L) for integral x; c, y integral.
  std::optional<QVec> solve_congruence(const QVec& c, const QVec& y, const ZIdeal& L) const;
  // Simultaneous congruences x == r_i (mod L_i) for pairwise comaximal L_i;
  // returns the solution and the intersection modulus.
  std::pair<QVec, ZIdeal> crt(const std::vector<std::pair<ZIdeal, QVec>>& conds) const;
  // Integral representative of x modulo P^j for x with v_P(x) >= 0 whose
  // denominator may meet other primes above p.
  QVec local_rep(const QVec& x, const PrimeIdeal& P, int j = 1) const;

  // -- residue fields ---------------------------------------------------
  Fq residue_field(const PrimeIdeal& P) const;
  // x must be integral at P with power-basis denominators prime to p.
  PPoly reduce_mod(const QVec& x, const PrimeIdeal& P) const;
  QVec lift_residue(const PPoly& a, const PrimeIdeal& P) const;
  int legendre(const QVec& x, const PrimeIdeal& P) const;

  // -- units and generators ---------------------------------------------
  // Totally positive generator of I (strict class number 1 assumed):
  // short vectors under the trace form, then unit sign adjustment.
  QVec totally_positive_generator(const ZIdeal& I) const;
  // Unit (product of fundamental units and -1) with the given sign vector,
  // entries +-1; empty if the sign pattern is not attained.
  std::optional<QVec> unit_with_signs(const std::vector<int>& target) const;

 private:
  std::vector<QMat> mult_;             // multiplication by b_i
  std::vector<QVec> sturm_;            // Sturm chain of poly
  mutable std::vector<std::pair<Rat, Rat>> roots_;  // isolating intervals, ascending
  std::vector<std::vector<int>> unit_sign_bits_;    // rows: sign bits of units, then -1

  QVec second_gen_kummer(const PPoly& g) const;
  int sturm_changes(const Rat& a) const;
  void refine_root(int k, const Rat& max_width) const;
  std::pair<Rat, Rat> eval_interval(const QVec& pc, const std::pair<Rat, Rat>& iv) const;
};

// Arithmetic in Z_F / L for a full-rank integral lattice L. Elements are
// integral coordinate vectors, canonically reduced into the HNF box.
struct ResidueRing {
  const NumberField* F;
  ZIdeal L;

  ResidueRing(const NumberField& field, ZIdeal lat);

  QVec reduce(const QVec& x) const;  // x integral
  QVec add(const QVec& x, const QVec& y) const { return reduce(F->add(x, y)); }
  QVec sub(const QVec& x, const QVec& y) const { return reduce(F->sub(x, y)); }
  QVec neg(const QVec& x) const { return reduce(F->neg(x)); }
  QVec mul(const QVec& x, const QVec& y) const { return reduce(F->mul(x, y)); }
  bool is_zero(const QVec& x) const { return F->is_zero(reduce(x)); }
  std::optional<QVec> inv(const QVec& x) const;
  Int size() const { return F->ideal_norm(L); }
  // All residues (HNF box points); guards against large quotients.
  std::vector<QVec> elements() const;
};

}  // namespace hmf
