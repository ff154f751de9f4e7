#include "hmf/quaternion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>

#include "hmf/lll.hpp"

namespace hmf {

// ---------------------------------------------------------------------------
// Algebra arithmetic.

QuatAlgebra::QuatAlgebra(const NumberField& field, QVec a_, QVec b_)
    : F(&field), a(std::move(a_)), b(std::move(b_)) {
  if (F->is_zero(a) || F->is_zero(b)) throw std::invalid_argument("quaternion parameters must be nonzero");
}

QuatElement QuatAlgebra::zero() const { return {{F->zero(), F->zero(), F->zero(), F->zero()}}; }
QuatElement QuatAlgebra::one() const { return from_field(F->one()); }
QuatElement QuatAlgebra::from_field(const QVec& x) const {
  return {{x, F->zero(), F->zero(), F->zero()}};
}
QuatElement QuatAlgebra::unit_i() const { return {{F->zero(), F->one(), F->zero(), F->zero()}}; }
QuatElement QuatAlgebra::unit_j() const { return {{F->zero(), F->zero(), F->one(), F->zero()}}; }
QuatElement QuatAlgebra::unit_ij() const { return {{F->zero(), F->zero(), F->zero(), F->one()}}; }
QuatElement QuatAlgebra::elem(QVec x0, QVec x1, QVec x2, QVec x3) const {
  return {{std::move(x0), std::move(x1), std::move(x2), std::move(x3)}};
}

QuatElement QuatAlgebra::add(const QuatElement& x, const QuatElement& y) const {
  QuatElement r;
  for (int k = 0; k < 4; k++) r.c[k] = F->add(x.c[k], y.c[k]);
  return r;
}

QuatElement QuatAlgebra::sub(const QuatElement& x, const QuatElement& y) const {
  QuatElement r;
  for (int k = 0; k < 4; k++) r.c[k] = F->sub(x.c[k], y.c[k]);
  return r;
}

QuatElement QuatAlgebra::neg(const QuatElement& x) const {
  QuatElement r;
  for (int k = 0; k < 4; k++) r.c[k] = F->neg(x.c[k]);
  return r;
}

QuatElement QuatAlgebra::scale(const QVec& s, const QuatElement& x) const {
  QuatElement r;
  for (int k = 0; k < 4; k++) r.c[k] = F->mul(s, x.c[k]);
  return r;
}

QuatElement QuatAlgebra::mul(const QuatElement& x, const QuatElement& y) const {
  const QVec &x0 = x.c[0], &x1 = x.c[1], &x2 = x.c[2], &x3 = x.c[3];
  const QVec &y0 = y.c[0], &y1 = y.c[1], &y2 = y.c[2], &y3 = y.c[3];
  auto& f = *F;
  QVec ab = f.mul(a, b);
  QuatElement r;
  r.c[0] = f.add(f.add(f.mul(x0, y0), f.mul(a, f.mul(x1, y1))),
                 f.sub(f.mul(b, f.mul(x2, y2)), f.mul(ab, f.mul(x3, y3))));
  r.c[1] = f.add(f.add(f.mul(x0, y1), f.mul(x1, y0)),
                 f.mul(b, f.sub(f.mul(x3, y2), f.mul(x2, y3))));
  r.c[2] = f.add(f.add(f.mul(x0, y2), f.mul(x2, y0)),
                 f.mul(a, f.sub(f.mul(x1, y3), f.mul(x3, y1))));
  r.c[3] = f.add(f.add(f.mul(x0, y3), f.mul(x3, y0)),
                 f.sub(f.mul(x1, y2), f.mul(x2, y1)));
  return r;
}

QuatElement QuatAlgebra::conj(const QuatElement& x) const {
  return {{x.c[0], F->neg(x.c[1]), F->neg(x.c[2]), F->neg(x.c[3])}};
}

QVec QuatAlgebra::nrd(const QuatElement& x) const {
  auto& f = *F;
  QVec r = f.mul(x.c[0], x.c[0]);
  r = f.sub(r, f.mul(a, f.mul(x.c[1], x.c[1])));
  r = f.sub(r, f.mul(b, f.mul(x.c[2], x.c[2])));
  r = f.add(r, f.mul(f.mul(a, b), f.mul(x.c[3], x.c[3])));
  return r;
}

QVec QuatAlgebra::trd(const QuatElement& x) const { return F->scale(2, x.c[0]); }

QuatElement QuatAlgebra::inv(const QuatElement& x) const {
  QVec n = nrd(x);
  if (F->is_zero(n)) throw std::domain_error("quaternion not invertible (reduced norm zero)");
  return scale(F->inv(n), conj(x));
}

bool QuatAlgebra::is_zero(const QuatElement& x) const {
  for (int k = 0; k < 4; k++)
    if (!F->is_zero(x.c[k])) return false;
  return true;
}

std::string QuatAlgebra::str(const QuatElement& x) const {
  static const char* name[4] = {"", "i", "j", "ij"};
  std::string s;
  for (int k = 0; k < 4; k++) {
    if (F->is_zero(x.c[k])) continue;
    if (!s.empty()) s += " + ";
    s += "(" + F->str(x.c[k]) + ")";
    if (k) s += std::string("*") + name[k];
  }
  return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------------------
// Hilbert symbol.

// x times the square of its coordinate denominator: same square class,
// integral coordinates.
static QVec square_class_integral(const NumberField& F, const QVec& x) {
  Int d = 1;
  for (auto& c : x) d = lcm(d, c.get_den());
  return F.scale(Rat(d * d), x);
}

static int hilbert_odd(const NumberField& F, const QVec& a, const QVec& b, const PrimeIdeal& P) {
  int alpha = F.valuation(a, P), beta = F.valuation(b, P);
  QVec pi = F.totally_positive_generator(F.prime_ideal_lattice(P));
  QVec u = F.mul(a, F.pow(pi, -alpha));
  QVec v = F.mul(b, F.pow(pi, -beta));
  int lu = F.legendre(F.local_rep(u, P), P);
  int lv = F.legendre(F.local_rep(v, P), P);
  assert(lu != 0 && lv != 0);
  int r = 1;
  if ((alpha & 1) && (beta & 1)) r *= F.legendre(F.from_int(-1), P);
  if (beta & 1) r *= lu;
  if (alpha & 1) r *= lv;
  return r;
}

// Even residue characteristic: the form <1,-a,-b> is isotropic iff it has a
// primitive zero mod P^m, m = 2e+1+v(a)+v(b) after normalizing v(a), v(b)
// into {0,1}. A primitive zero has a unit coordinate, so dividing by it
// leaves one of three single-variable membership tests against a set of
// squares, where squares mod P^m only depend on the argument mod P^k.
static int hilbert_even(const NumberField& F, const QVec& a0, const QVec& b0,
                        const PrimeIdeal& P) {
  ZIdeal Plat = F.prime_ideal_lattice(P);
  QVec pi = F.totally_positive_generator(Plat);
  int alpha = F.valuation(a0, P), beta = F.valuation(b0, P);
  QVec a = F.mul(a0, F.pow(pi, -(alpha - (alpha & 1))));
  QVec b = F.mul(b0, F.pow(pi, -(beta - (beta & 1))));
  int e = P.e;
  int m = 2 * e + 1 + (alpha & 1) + (beta & 1);
  int k = std::max(m - e, (m + 1) / 2);
  ResidueRing Rm(F, F.ideal_pow(Plat, m));
  ResidueRing Rk(F, F.ideal_pow(Plat, k));
  QVec A = Rm.reduce(F.local_rep(a, P, m));
  QVec B = Rm.reduce(F.local_rep(b, P, m));
  auto reps = Rk.elements();
  std::set<QVec> sq, asq;
  for (auto& s : reps) {
    QVec t = Rm.mul(s, s);
    sq.insert(t);
    asq.insert(Rm.mul(A, t));
  }
  QVec one = F.one();
  for (auto& t : reps) {
    QVec t2 = Rm.mul(t, t);
    // y unit: s^2 - a t^2 = b
    if (sq.count(Rm.add(B, Rm.mul(A, t2)))) return 1;
    // x unit: s^2 - b t^2 = a
    if (sq.count(Rm.add(A, Rm.mul(B, t2)))) return 1;
    // z unit: a s^2 = 1 - b t^2
    if (asq.count(Rm.sub(one, Rm.mul(B, t2)))) return 1;
  }
  return -1;
}

int hilbert_symbol(const NumberField& F, const QVec& a, const QVec& b, const PrimeIdeal& P) {
  if (F.is_zero(a) || F.is_zero(b)) throw std::invalid_argument("hilbert symbol needs nonzero arguments");
  return P.p == 2 ? hilbert_even(F, a, b, P) : hilbert_odd(F, a, b, P);
}

// ---------------------------------------------------------------------------
// Ramification.

std::vector<Int> distinct_prime_factors(Int N) {
  N = abs(N);
  std::vector<Int> out;
  for (Int p = 2; p * p <= N && p < 1000000; p += (p == 2 ? 1 : 2)) {
    if (N % p == 0) {
      out.push_back(p);
      while (N % p == 0) N /= p;
    }
  }
  if (N > 1) {
    // Large cofactor: accept a prime or a perfect power of a prime.
    if (mpz_perfect_power_p(N.get_mpz_t())) {
      for (unsigned long k = 2; k <= mpz_sizeinbase(N.get_mpz_t(), 2); k++) {
        Int r;
        if (mpz_root(r.get_mpz_t(), N.get_mpz_t(), k)) {
          N = r;
          if (!mpz_perfect_power_p(N.get_mpz_t())) break;
          k = 1;
        }
      }
    }
    if (mpz_probab_prime_p(N.get_mpz_t(), 32) == 0)
      throw std::domain_error("integer factorization bound exceeded");
    out.push_back(N);
  }
  return out;
}

static bool prime_before(const PrimeIdeal& x, const PrimeIdeal& y) {
  if (x.norm != y.norm) return x.norm < y.norm;
  if (x.p != y.p) return x.p < y.p;
  return x.lattice.a < y.lattice.a;
}

const std::vector<PrimeIdeal>& QuatAlgebra::ramified_primes() const {
  if (ram_known_) return ram_;
  QVec ai = square_class_integral(*F, a), bi = square_class_integral(*F, b);
  Rat na = F->norm(ai), nb = F->norm(bi);
  Int M = 2 * na.get_num() * nb.get_num();
  std::vector<PrimeIdeal> r;
  for (auto& p : distinct_prime_factors(M))
    for (auto& P : F->split_prime(p))
      if (hilbert_symbol(*F, a, b, P) == -1) r.push_back(P);
  std::sort(r.begin(), r.end(), prime_before);
  ram_ = std::move(r);
  ram_known_ = true;
  return ram_;
}

bool QuatAlgebra::is_ramified(const PrimeIdeal& P) const {
  for (auto& Q : ramified_primes())
    if (Q == P) return true;
  return false;
}

std::vector<int> QuatAlgebra::real_ramified() const {
  std::vector<int> r(F->n);
  for (int k = 0; k < F->n; k++)
    r[k] = F->embedding_sign(a, k) < 0 && F->embedding_sign(b, k) < 0;
  return r;
}

// ---------------------------------------------------------------------------
// Constructing an algebra with prescribed ramification.

// Lift of a residue field nonsquare.
static QVec nonresidue_lift(const NumberField& F, const PrimeIdeal& P) {
  Fq k = F.residue_field(P);
  for (auto& c : k.elements())
    if (k.legendre(c) == -1) return F.lift_residue(c, P);
  throw std::logic_error("residue field without nonsquares");
}

// Lift u = 1 + 4c with c of absolute residue trace 1, so that the quadratic
// extension by sqrt(u) is unramified at the even prime P.
static QVec unramified_quadratic_unit(const NumberField& F, const PrimeIdeal& P) {
  Fq k = F.residue_field(P);
  for (auto& c : k.elements()) {
    PPoly tr = k.zero();
    PPoly f = c;
    for (int i = 0; i < P.fdeg; i++) {
      tr = k.add(tr, f);
      f = k.mul(f, f);
    }
    if (k.eq(tr, k.one()))
      return F.add(F.one(), F.scale(4, F.lift_residue(c, P)));
  }
  throw std::logic_error("residue field without trace-one elements");
}

static bool ramification_matches(const QuatAlgebra& B, std::vector<PrimeIdeal> D) {
  auto rp = B.ramified_primes();
  std::sort(D.begin(), D.end(), prime_before);
  if (rp.size() != D.size()) return false;
  for (size_t i = 0; i < D.size(); i++)
    if (!(rp[i] == D[i])) return false;
  auto rr = B.real_ramified();
  if (rr[0]) return false;
  for (size_t k = 1; k < rr.size(); k++)
    if (!rr[k]) return false;
  return true;
}

// Elements of the lattice, enumerated by trace-form length, negative at
// every real place but possibly the first (after a sign flip).
static std::vector<QVec> lattice_candidates(const NumberField& F, const ZIdeal& I, size_t want) {
  int n = F.n;
  std::vector<QVec> w(n);
  for (int i = 0; i < n; i++) {
    w[i] = QVec(n);
    for (int c = 0; c < n; c++) w[i][c] = Rat(I.h.at(i, c));
  }
  DMat gram(n, std::vector<double>(n));
  for (int i = 0; i < n; i++)
    for (int j = 0; j <= i; j++) gram[i][j] = gram[j][i] = to_double(F.trace(F.mul(w[i], w[j])));
  auto U = lll_reduce_gram(gram);
  std::vector<QVec> v(n, F.zero());
  for (int i = 0; i < n; i++)
    for (int r = 0; r < n; r++)
      if (U[i][r] != 0) v[i] = F.add(v[i], F.scale(Rat(U[i][r]), w[r]));
  double radius = 1;
  for (int i = 0; i < n; i++) radius = std::max(radius, gram[i][i] * 1.01);
  std::vector<QVec> out;
  std::set<QVec> seen;
  for (int attempt = 0; attempt < 10 && out.size() < want; attempt++, radius *= 2) {
    enumerate_short_vectors(gram, radius, [&](const std::vector<long>& c, double) {
      QVec x = F.zero();
      for (int i = 0; i < n; i++)
        if (c[i]) x = F.add(x, F.scale(Rat(Int(c[i])), v[i]));
      if (F.is_zero(x)) return;
      for (QVec cand : {x, F.neg(x)}) {
        bool ok = true;
        for (int kk = 1; kk < n && ok; kk++) ok = F.embedding_sign(cand, kk) < 0;
        if (ok && seen.insert(cand).second) out.push_back(cand);
      }
    });
  }
  return out;
}

QuatAlgebra find_algebra(const NumberField& F, const std::vector<PrimeIdeal>& D) {
  int n = F.n;
  if ((int(D.size()) + n - 1) % 2 != 0)
    throw std::invalid_argument("need |D| + (number of ramified real places) even");
  for (size_t i = 0; i < D.size(); i++)
    for (size_t j = i + 1; j < D.size(); j++)
      if (D[i] == D[j]) throw std::invalid_argument("discriminant primes must be distinct");

  // Trivial discriminant and a unit that is positive exactly at the first
  // real place: (-1, u) is unramified at odd primes, and a square adjustment
  // taking u to 1 mod 8 kills the even primes too.
  if (D.empty() && !F.units.empty()) {
    std::vector<int> target(n, -1);
    target[0] = 1;
    if (auto u0 = F.unit_with_signs(target)) {
      ZIdeal L8 = F.principal_ideal(F.from_int(8));
      std::vector<QVec> cands;
      int r = int(F.units.size());
      std::vector<int> ex(r, -2);
      while (true) {
        QVec u = *u0;
        for (int i = 0; i < r; i++) u = F.mul(u, F.pow(F.units[i], 2L * ex[i]));
        cands.push_back(u);
        int i = 0;
        while (i < r && ++ex[i] > 2) ex[i++] = -2;
        if (i == r) break;
      }
      std::stable_sort(cands.begin(), cands.end(), [&](const QVec& x, const QVec& y) {
        return F.ideal_contains(L8, F.sub(x, F.one())) >
               F.ideal_contains(L8, F.sub(y, F.one()));
      });
      for (auto& u : cands) {
        QuatAlgebra B(F, F.from_int(-1), u);
        if (ramification_matches(B, D)) return B;
      }
    }
  }

  ZIdeal Dprod = F.unit_ideal();
  for (auto& P : D) Dprod = F.ideal_mul(Dprod, F.prime_ideal_lattice(P));
  auto evens = F.split_prime(2);

  for (auto& a : lattice_candidates(F, Dprod, 40)) {
    // a generates D times an odd cofactor coprime to D
    bool ok = true;
    for (auto& P : D) ok = ok && F.valuation(a, P) == 1;
    for (auto& Q : evens) ok = ok && F.valuation(a, Q) == 0;
    if (!ok) continue;
    Rat na = F.norm(a);
    Int cof = abs(na.get_num()) / F.ideal_norm(Dprod);
    std::vector<PrimeIdeal> bprimes;
    bool factored = true;
    try {
      for (auto& p : distinct_prime_factors(cof))
        for (auto& Q : F.split_prime(p))
          if (F.valuation(a, Q) > F.ideal_valuation(Dprod, Q)) bprimes.push_back(Q);
    } catch (const std::domain_error&) {
      factored = false;
    }
    if (!factored) continue;

    // t: a nonsquare at each prime of D, a square at the cofactor primes,
    // and 1 modulo the part of 8 away from D
    std::vector<std::pair<ZIdeal, QVec>> conds;
    for (auto& P : D) {
      if (P.p == 2)
        conds.push_back({F.ideal_pow(F.prime_ideal_lattice(P), 2 * P.e + 1),
                         unramified_quadratic_unit(F, P)});
      else
        conds.push_back({F.prime_ideal_lattice(P), nonresidue_lift(F, P)});
    }
    for (auto& Q : bprimes) conds.push_back({F.prime_ideal_lattice(Q), F.one()});
    for (auto& r : evens) {
      bool in_D = false;
      for (auto& P : D) in_D = in_D || P == r;
      if (!in_D) conds.push_back({F.ideal_pow(F.prime_ideal_lattice(r), 3 * r.e), F.one()});
    }
    auto [t, Mlat] = F.crt(conds);
    t = ResidueRing(F, Mlat).reduce(t);

    // b = t + 8am with prime norm and the right signs
    QVec a8 = F.scale(8, a);
    bool a_pos = F.embedding_sign(a, 0) > 0;
    for (int R = 0; R <= 12; R++) {
      std::vector<Int> m(n, -R);
      while (true) {
        Int mx = 0;
        for (auto& d : m) mx = std::max(mx, Int(abs(d)));
        if (mx == R || R == 0) {
          QVec mv(n);
          for (int i = 0; i < n; i++) mv[i] = Rat(m[i]);
          QVec b = F.add(t, F.mul(a8, mv));
          if (!F.is_zero(b)) {
            Int nb = abs(F.norm(b).get_num());
            if (nb > 1 && mpz_probab_prime_p(nb.get_mpz_t(), 32) > 0) {
              bool good = true;
              for (int kk = 1; kk < n && good; kk++) good = F.embedding_sign(b, kk) < 0;
              if (good && (a_pos || F.embedding_sign(b, 0) > 0)) {
                QuatAlgebra B(F, a, b);
                if (ramification_matches(B, D)) return B;
              }
            }
          }
        }
        int i = 0;
        while (i < n && ++m[i] > R) m[i++] = -R;
        if (i == n) break;
      }
    }
  }
  throw SearchExhausted("no quaternion algebra found with the requested ramification");
}

// ---------------------------------------------------------------------------
// Splitting at the first real place.

static std::array<std::array<double, 2>, 2> mat2_mul(const std::array<std::array<double, 2>, 2>& x,
                                                     const std::array<std::array<double, 2>, 2>& y) {
  std::array<std::array<double, 2>, 2> r{};
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

RealSplitting make_real_splitting(const QuatAlgebra& B) {
  const NumberField& F = *B.F;
  int sa = F.embedding_sign(B.a, 0), sb = F.embedding_sign(B.b, 0);
  if (sa < 0 && sb < 0) throw RamifiedPlace("algebra is definite at the split real place");
  double av = F.embed(B.a, 0), bv = F.embed(B.b, 0);
  RealSplitting s;
  s.gen[0] = {{{1, 0}, {0, 1}}};
  if (sa > 0) {
    double r = std::sqrt(av);
    s.gen[1] = {{{r, 0}, {0, -r}}};
    s.gen[2] = {{{0, 1}, {bv, 0}}};
  } else {
    double r = std::sqrt(bv);
    s.gen[1] = {{{0, 1}, {av, 0}}};
    s.gen[2] = {{{r, 0}, {0, -r}}};
  }
  s.gen[3] = mat2_mul(s.gen[1], s.gen[2]);
  return s;
}

std::array<std::array<double, 2>, 2> real_image(const QuatAlgebra& B, const RealSplitting& s,
                                                const QuatElement& x) {
  std::array<std::array<double, 2>, 2> r{};
  for (int k = 0; k < 4; k++) {
    double c = B.F->embed(x.c[k], 0);
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) r[i][j] += c * s.gen[k][i][j];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Splitting mod P^e.

// Quaternion arithmetic with coefficients in Z_F/P^e, parameters replaced by
// local representatives so every coordinate stays integral.
namespace {
struct LocalQuat {
  const ResidueRing& R;
  QVec A, B;

  std::array<QVec, 4> mul(const std::array<QVec, 4>& x, const std::array<QVec, 4>& y) const {
    QVec AB = R.mul(A, B);
    std::array<QVec, 4> r;
    r[0] = R.sub(R.add(R.mul(x[0], y[0]), R.mul(A, R.mul(x[1], y[1]))),
                 R.sub(R.mul(AB, R.mul(x[3], y[3])), R.mul(B, R.mul(x[2], y[2]))));
    r[1] = R.add(R.add(R.mul(x[0], y[1]), R.mul(x[1], y[0])),
                 R.mul(B, R.sub(R.mul(x[3], y[2]), R.mul(x[2], y[3]))));
    r[2] = R.add(R.add(R.mul(x[0], y[2]), R.mul(x[2], y[0])),
                 R.mul(A, R.sub(R.mul(x[1], y[3]), R.mul(x[3], y[1]))));
    r[3] = R.add(R.add(R.mul(x[0], y[3]), R.mul(x[3], y[0])),
                 R.sub(R.mul(x[1], y[2]), R.mul(x[2], y[1])));
    return r;
  }
};
}  // namespace

PrimeSplitting make_prime_splitting(const QuatAlgebra& Bq, const PrimeIdeal& P, int e) {
  const NumberField& F = *Bq.F;
  if (e < 1) throw std::invalid_argument("precision must be at least 1");
  if (Bq.is_ramified(P)) throw RamifiedPlace("algebra is ramified at the prime");
  if (P.p == 2) throw std::domain_error("splitting mod even primes needs an adapted order");
  if (F.valuation(Bq.a, P) != 0 || F.valuation(Bq.b, P) != 0)
    throw std::domain_error("parameters must be units at the prime");

  ZIdeal Plat = F.prime_ideal_lattice(P);
  ResidueRing R1(F, Plat), Re(F, F.ideal_pow(Plat, e));
  QVec A = Re.reduce(F.local_rep(Bq.a, P, e));
  QVec B = Re.reduce(F.local_rep(Bq.b, P, e));
  LocalQuat LQ{Re, A, B};

  // trace-zero u with split characteristic polynomial: disc = -4 nrd(u)
  // must be a nonzero residue square
  auto res = R1.elements();
  QVec d;
  std::array<QVec, 4> u;
  bool found = false;
  for (auto& x1 : res) {
    for (auto& x2 : res) {
      for (auto& x3 : res) {
        QVec nr = Re.sub(Re.mul(Re.mul(A, B), Re.mul(x3, x3)),
                         Re.add(Re.mul(A, Re.mul(x1, x1)), Re.mul(B, Re.mul(x2, x2))));
        QVec dc = Re.reduce(F.scale(-4, nr));
        if (R1.is_zero(dc) || F.legendre(dc, P) != 1) continue;
        u = {F.zero(), x1, x2, x3};
        d = dc;
        found = true;
        break;
      }
      if (found) break;
    }
    if (found) break;
  }
  if (!found) throw LiftFailed("no split element found mod the prime");

  // square root of d: search mod P, refine mod P^e by Newton
  QVec r;
  found = false;
  for (auto& s : res)
    if (R1.is_zero(R1.sub(R1.mul(s, s), d))) {
      r = s;
      found = true;
      break;
    }
  if (!found) throw LiftFailed("residue square root not found");
  for (int step = 0; step < e; step++) {
    auto i2r = Re.inv(Re.add(r, r));
    if (!i2r) throw LiftFailed("square root refinement hit a non-unit");
    r = Re.sub(r, Re.mul(Re.sub(Re.mul(r, r), d), *i2r));
  }
  assert(Re.is_zero(Re.sub(Re.mul(r, r), d)));

  // eigenvalues +-r/2; the projector onto the first eigenspace is an exact
  // idempotent because u satisfies u^2 = -nrd(u)
  auto inv2 = Re.inv(F.from_int(2));
  auto invr = Re.inv(r);
  if (!inv2 || !invr) throw LiftFailed("eigenvalue separation not invertible");
  QVec l1 = Re.mul(r, *inv2);
  std::array<QVec, 4> eps = u;
  eps[0] = Re.add(eps[0], l1);
  for (auto& c : eps) c = Re.mul(c, *invr);
  {
    auto e2 = LQ.mul(eps, eps);
    for (int k = 0; k < 4; k++)
      if (!Re.is_zero(Re.sub(e2[k], eps[k]))) throw LiftFailed("projector is not idempotent");
  }

  // left ideal B*eps: free of rank two; row reduce its four generators with
  // unit pivots
  std::array<QVec, 4> basis[4] = {
      {F.one(), F.zero(), F.zero(), F.zero()},
      {F.zero(), F.one(), F.zero(), F.zero()},
      {F.zero(), F.zero(), F.one(), F.zero()},
      {F.zero(), F.zero(), F.zero(), F.one()},
  };
  std::vector<std::array<QVec, 4>> rows;
  for (int k = 0; k < 4; k++) rows.push_back(LQ.mul(basis[k], eps));
  std::vector<std::pair<int, int>> piv;  // (row, col)
  for (int rr = 0; rr < 4; rr++) {
    int pc = -1;
    std::optional<QVec> pinv;
    for (int c = 0; c < 4 && pc < 0; c++) {
      bool used = false;
      for (auto& [pr, qc] : piv) used = used || qc == c;
      if (used) continue;
      pinv = Re.inv(rows[rr][c]);
      if (pinv) pc = c;
    }
    if (pc < 0) continue;
    for (auto& c : rows[rr]) c = Re.mul(c, *pinv);
    for (int r2 = 0; r2 < 4; r2++) {
      if (r2 == rr || Re.is_zero(rows[r2][pc])) continue;
      QVec f = rows[r2][pc];
      for (int c = 0; c < 4; c++) rows[r2][c] = Re.sub(rows[r2][c], Re.mul(f, rows[rr][c]));
    }
    piv.push_back({rr, pc});
  }
  if (piv.size() != 2) throw LiftFailed("left ideal is not locally free of rank two");
  for (int rr = 0; rr < 4; rr++) {
    bool is_piv = false;
    for (auto& [pr, pc] : piv) is_piv = is_piv || pr == rr;
    if (is_piv) continue;
    for (int c = 0; c < 4; c++)
      if (!Re.is_zero(rows[rr][c])) throw LiftFailed("left ideal has excess generators");
  }
  std::sort(piv.begin(), piv.end(),
            [](const std::pair<int, int>& x, const std::pair<int, int>& y) { return x.second < y.second; });
  auto v1 = rows[piv[0].first];
  auto v2 = rows[piv[1].first];
  int p1 = piv[0].second, p2 = piv[1].second;

  PrimeSplitting S{P, e, Re, {}};
  std::array<QVec, 4> gens[4] = {basis[0], basis[1], basis[2], basis[3]};
  for (int k = 0; k < 4; k++) {
    for (int mcol = 0; mcol < 2; mcol++) {
      auto w = LQ.mul(gens[k], mcol == 0 ? v1 : v2);
      S.gen[k][0][mcol] = w[p1];
      S.gen[k][1][mcol] = w[p2];
      // w must reproduce from its pivot coordinates
      for (int c = 0; c < 4; c++) {
        QVec chk = Re.add(Re.mul(w[p1], v1[c]), Re.mul(w[p2], v2[c]));
        if (!Re.is_zero(Re.sub(chk, w[c]))) throw LiftFailed("ideal basis is not free");
      }
    }
  }

  // ring homomorphism sanity on the generators
  auto m2mul = [&](const auto& x, const auto& y) {
    std::array<std::array<QVec, 2>, 2> r;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++)
        r[i][j] = Re.add(Re.mul(x[i][0], y[0][j]), Re.mul(x[i][1], y[1][j]));
    return r;
  };
  auto ii = m2mul(S.gen[1], S.gen[1]);
  auto jj = m2mul(S.gen[2], S.gen[2]);
  auto ij = m2mul(S.gen[1], S.gen[2]);
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      QVec da = i == j ? A : F.zero(), db = i == j ? B : F.zero();
      if (!Re.is_zero(Re.sub(ii[i][j], da)) || !Re.is_zero(Re.sub(jj[i][j], db)) ||
          !Re.is_zero(Re.sub(ij[i][j], S.gen[3][i][j])))
        throw LiftFailed("splitting images fail the defining relations");
    }
  return S;
}

std::array<std::array<QVec, 2>, 2> prime_image(const QuatAlgebra& B, const PrimeSplitting& s,
                                               const QuatElement& x) {
  const NumberField& F = *B.F;
  std::array<std::array<QVec, 2>, 2> r = {{{F.zero(), F.zero()}, {F.zero(), F.zero()}}};
  for (int k = 0; k < 4; k++) {
    QVec c = s.R.reduce(F.local_rep(x.c[k], s.P, s.e));
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) r[i][j] = s.R.add(r[i][j], s.R.mul(c, s.gen[k][i][j]));
  }
  return r;
}

}  // namespace hmf
