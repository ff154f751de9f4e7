#include "hmf/arithmetic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "hmf/lll.hpp"

namespace hmf {

namespace {

QVec basis_unit(const NumberField& F, int r) {
  QVec v = F.zero();
  v[r] = 1;
  return v;
}

// Canonical lattice from a rational generating set of row vectors.
QuatLattice canonical_lattice(const QuatAlgebra& B, const std::vector<QVec>& rows) {
  int m = 4 * B.F->n;
  Int den = 1;
  for (auto& r : rows)
    for (auto& c : r) den = lcm(den, c.get_den());
  ZMat A(int(rows.size()), m);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < m; j++) {
      Rat s = rows[i][j] * den;
      A.at(i, j) = s.get_num();
    }
  ZMat H = hnf(A);
  if (H.nr != m) throw std::invalid_argument("lattice does not have full rank");
  Int g = den;
  for (auto& e : H.a) {
    g = gcd(g, e);
    if (g == 1) break;
  }
  if (g > 1) {
    for (auto& e : H.a) e /= g;
    den /= g;
  }
  return {H, den};
}

std::vector<QVec> lattice_rows_rat(const QuatLattice& L) {
  std::vector<QVec> out;
  for (int i = 0; i < L.rows.nr; i++) {
    QVec v(L.rows.nc);
    for (int j = 0; j < L.rows.nc; j++) v[j] = Rat(L.rows.at(i, j)) / Rat(L.den);
    out.push_back(std::move(v));
  }
  return out;
}

Int int_coord(const Rat& r) {
  if (r.get_den() != 1) throw std::logic_error("expected an integral coordinate");
  return r.get_num();
}

std::vector<Int> int_coords(const QVec& v) {
  std::vector<Int> out;
  out.reserve(v.size());
  for (auto& c : v) out.push_back(int_coord(c));
  return out;
}

// Solve sum_r c_r A_row_r == target modulo the lattice spanned by the rows
// of M, over the integers; empty if unsolvable.
std::optional<std::vector<Int>> solve_rows_mod(const ZMat& A, const ZMat& M,
                                               const std::vector<Int>& target) {
  ZMat S(A.nr + M.nr, A.nc);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < A.nc; j++) S.at(i, j) = A.at(i, j);
  for (int i = 0; i < M.nr; i++)
    for (int j = 0; j < A.nc; j++) S.at(A.nr + i, j) = M.at(i, j);
  auto t = hnf_transform(S);
  ZMat H(t.rank, A.nc);
  for (int i = 0; i < t.rank; i++)
    for (int j = 0; j < A.nc; j++) H.at(i, j) = t.H.at(i, j);
  auto sol = hnf_solve(H, target);
  if (!sol) return std::nullopt;
  std::vector<Int> w(A.nr, Int(0));
  for (int i = 0; i < t.rank; i++)
    for (int j = 0; j < A.nr; j++) w[j] += (*sol)[i] * t.U.at(i, j);
  return w;
}

// Generators of {c : sum_r c_r A_row_r == 0 modulo the row span of M}.
std::vector<std::vector<Int>> kernel_rows_mod(const ZMat& A, const ZMat& M) {
  ZMat S(A.nr + M.nr, A.nc);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < A.nc; j++) S.at(i, j) = A.at(i, j);
  for (int i = 0; i < M.nr; i++)
    for (int j = 0; j < A.nc; j++) S.at(A.nr + i, j) = M.at(i, j);
  auto ker = z_left_kernel(S);
  std::vector<std::vector<Int>> out;
  for (auto& k : ker) out.emplace_back(k.begin(), k.begin() + A.nr);
  return out;
}

// Block-diagonal stack of `blocks` copies of M.
ZMat block_diag(const ZMat& M, int blocks) {
  ZMat D(M.nr * blocks, M.nc * blocks);
  for (int b = 0; b < blocks; b++)
    for (int i = 0; i < M.nr; i++)
      for (int j = 0; j < M.nc; j++) D.at(b * M.nr + i, b * M.nc + j) = M.at(i, j);
  return D;
}

// Nearest integral element coordinate-wise.
QVec round_field(const NumberField& F, const QVec& x) {
  QVec q = F.zero();
  for (int i = 0; i < F.n; i++) {
    Int num = x[i].get_num(), den = x[i].get_den();
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), Int(2 * num + den).get_mpz_t(), Int(2 * den).get_mpz_t());
    q[i] = r;
  }
  return q;
}

std::string norm_str(const PrimeIdeal& P) {
  std::ostringstream os;
  os << P.norm;
  return os.str();
}

}  // namespace

QVec quat_coords(const QuatAlgebra& B, const QuatElement& x) {
  QVec v;
  v.reserve(4 * B.F->n);
  for (int k = 0; k < 4; k++)
    for (auto& c : x.c[k]) v.push_back(c);
  return v;
}

QuatElement quat_from_coords(const QuatAlgebra& B, const QVec& v) {
  int n = B.F->n;
  QuatElement x = B.zero();
  for (int k = 0; k < 4; k++)
    for (int r = 0; r < n; r++) x.c[k][r] = v[size_t(k) * n + r];
  return x;
}

QuatLattice quat_lattice(const QuatAlgebra& B, const std::vector<QuatElement>& gens) {
  const NumberField& F = *B.F;
  std::vector<QVec> rows;
  for (auto& g : gens)
    for (int r = 0; r < F.n; r++) rows.push_back(quat_coords(B, B.scale(basis_unit(F, r), g)));
  return canonical_lattice(B, rows);
}

QuatLattice lattice_sum(const QuatAlgebra& B, const QuatLattice& L, const QuatLattice& M) {
  auto rows = lattice_rows_rat(L);
  for (auto& r : lattice_rows_rat(M)) rows.push_back(r);
  return canonical_lattice(B, rows);
}

QuatLattice lattice_mul(const QuatAlgebra& B, const QuatLattice& L, const QuatLattice& M) {
  auto ys = lattice_zbasis(B, L), zs = lattice_zbasis(B, M);
  std::vector<QVec> rows;
  for (auto& y : ys)
    for (auto& z : zs) rows.push_back(quat_coords(B, B.mul(y, z)));
  return canonical_lattice(B, rows);
}

QuatLattice lattice_mul_elem(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x,
                             bool on_right) {
  std::vector<QVec> rows;
  for (auto& y : lattice_zbasis(B, L))
    rows.push_back(quat_coords(B, on_right ? B.mul(y, x) : B.mul(x, y)));
  return canonical_lattice(B, rows);
}

QuatLattice lattice_adjoin(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x) {
  const NumberField& F = *B.F;
  auto rows = lattice_rows_rat(L);
  for (int r = 0; r < F.n; r++) rows.push_back(quat_coords(B, B.scale(basis_unit(F, r), x)));
  return canonical_lattice(B, rows);
}

bool lattice_contains(const QuatAlgebra& B, const QuatLattice& L, const QuatElement& x) {
  QVec v = quat_coords(B, x);
  std::vector<Int> w(v.size());
  for (size_t j = 0; j < v.size(); j++) {
    Rat s = v[j] * L.den;
    if (s.get_den() != 1) return false;
    w[j] = s.get_num();
  }
  return hnf_contains(L.rows, w);
}

std::vector<QuatElement> lattice_zbasis(const QuatAlgebra& B, const QuatLattice& L) {
  std::vector<QuatElement> out;
  for (auto& v : lattice_rows_rat(L)) out.push_back(quat_from_coords(B, v));
  return out;
}

Rat lattice_index(const QuatAlgebra& B, const QuatLattice& M, const QuatLattice& L) {
  int m = 4 * B.F->n;
  auto hdet = [&](const QuatLattice& X) {
    Rat d(1);
    for (int i = 0; i < m; i++) d *= Rat(X.rows.at(i, i)) / Rat(X.den);
    return d;
  };
  Rat r = hdet(L) / hdet(M);
  return r > 0 ? r : Rat(-1) * r;
}

ZIdeal lattice_nrd(const QuatAlgebra& B, const QuatLattice& L) {
  const NumberField& F = *B.F;
  auto ys = lattice_zbasis(B, L);
  std::vector<QVec> gens;
  for (size_t m = 0; m < ys.size(); m++) {
    gens.push_back(B.nrd(ys[m]));
    for (size_t l = m + 1; l < ys.size(); l++)
      gens.push_back(B.trd(B.mul(ys[m], B.conj(ys[l]))));
  }
  for (auto& g : gens)
    if (!F.is_integral(g)) throw std::invalid_argument("lattice has non-integral norms");
  return F.ideal_from_gens(gens);
}

std::array<QuatElement, 4> lattice_zf_basis(const QuatAlgebra& B, const QuatLattice& L) {
  const NumberField& F = *B.F;
  std::vector<std::array<QVec, 4>> R;
  for (auto& q : lattice_zbasis(B, L)) R.push_back(q.c);
  std::array<QuatElement, 4> out;
  int pos = 0;
  for (int c = 0; c < 4; c++) {
    int piv = -1;
    for (int r = pos; r < int(R.size()); r++)
      if (!F.is_zero(R[r][c])) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::invalid_argument("lattice is not a full Z_F-module");
    std::swap(R[pos], R[piv]);
    for (int r = pos + 1; r < int(R.size()); r++) {
      if (F.is_zero(R[r][c])) continue;
      QVec alpha = R[pos][c], beta = R[r][c];
      QVec q = F.div(beta, alpha);
      if (F.is_integral(q)) {
        for (int k = c; k < 4; k++) R[r][k] = F.sub(R[r][k], F.mul(q, R[pos][k]));
        continue;
      }
      QVec q2 = F.div(alpha, beta);
      if (F.is_integral(q2)) {
        std::swap(R[pos], R[r]);
        for (int k = c; k < 4; k++) R[r][k] = F.sub(R[r][k], F.mul(q2, R[pos][k]));
        continue;
      }
      // Bezout step: g = u*A + v*Bb over Z_F with (A, Bb) = (g).
      Int d0 = 1;
      for (auto& cc : alpha) d0 = lcm(d0, cc.get_den());
      for (auto& cc : beta) d0 = lcm(d0, cc.get_den());
      QVec A = F.scale(Rat(d0), alpha), Bb = F.scale(Rat(d0), beta);
      QVec g = F.totally_positive_generator(F.ideal_from_gens({A, Bb}));
      QMat ra = F.rep_matrix(A), rb = F.rep_matrix(Bb);
      ZMat M(2 * F.n, F.n);
      // row i of each block: coordinates of A*b_i resp. Bb*b_i
      for (int i = 0; i < F.n; i++)
        for (int j = 0; j < F.n; j++) {
          M.at(i, j) = int_coord(ra.at(j, i));
          M.at(F.n + i, j) = int_coord(rb.at(j, i));
        }
      auto t = hnf_transform(M);
      ZMat H(t.rank, F.n);
      for (int i = 0; i < t.rank; i++)
        for (int j = 0; j < F.n; j++) H.at(i, j) = t.H.at(i, j);
      auto sol = hnf_solve(H, int_coords(g));
      if (!sol) throw std::logic_error("gcd generator not in the generator module");
      std::vector<Int> w(2 * F.n, Int(0));
      for (int i = 0; i < t.rank; i++)
        for (int j = 0; j < 2 * F.n; j++) w[j] += (*sol)[i] * t.U.at(i, j);
      QVec u = F.zero();
      for (int i = 0; i < F.n; i++) u[i] = Rat(w[i]);
      // size-reduce the cofactor: u is only defined modulo Bb/g
      QVec bg = F.div(Bb, g);
      u = F.sub(u, F.mul(round_field(F, F.div(u, bg)), bg));
      QVec v = F.div(F.sub(g, F.mul(u, A)), Bb);
      if (!F.is_integral(v)) throw std::logic_error("cofactor reduction left a fraction");
      QVec c1 = F.neg(F.div(Bb, g)), c2 = F.div(A, g);
      for (int k = c; k < 4; k++) {
        QVec pk = R[pos][k], rk = R[r][k];
        R[pos][k] = F.add(F.mul(u, pk), F.mul(v, rk));
        R[r][k] = F.add(F.mul(c1, pk), F.mul(c2, rk));
      }
    }
    out[c] = QuatElement{R[pos]};
    pos++;
  }
  for (int r = pos; r < int(R.size()); r++)
    for (int k = 0; k < 4; k++)
      if (!F.is_zero(R[r][k])) throw std::logic_error("module reduction left a residue");
  // size-reduce the triangular basis
  for (int c = 2; c >= 0; c--)
    for (int k = c + 1; k < 4; k++) {
      QVec q = round_field(F, F.div(out[c].c[k], out[k].c[k]));
      if (F.is_zero(q)) continue;
      for (int l = k; l < 4; l++) out[c].c[l] = F.sub(out[c].c[l], F.mul(q, out[k].c[l]));
    }
  if (!(quat_lattice(B, {out[0], out[1], out[2], out[3]}) == L))
    throw std::invalid_argument("lattice is not a Z_F-module");
  return out;
}

// ---------------------------------------------------------------------------
// Orders.

ZIdeal reduced_discriminant(const QuatAlgebra& B, const QuatLattice& lat) {
  const NumberField& F = *B.F;
  auto basis = lattice_zf_basis(B, lat);
  // Gram of the trace pairing trd(x_i x_j) over F; determinant by cofactor
  // expansion on the first column.
  std::vector<std::vector<QVec>> G(4, std::vector<QVec>(4));
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++) G[i][j] = B.trd(B.mul(basis[i], basis[j]));
  std::function<QVec(const std::vector<std::vector<QVec>>&)> det =
      [&](const std::vector<std::vector<QVec>>& M) -> QVec {
    int m = int(M.size());
    if (m == 1) return M[0][0];
    QVec acc = F.zero();
    for (int i = 0; i < m; i++) {
      std::vector<std::vector<QVec>> S;
      for (int r = 0; r < m; r++) {
        if (r == i) continue;
        std::vector<QVec> row(M[r].begin() + 1, M[r].end());
        S.push_back(std::move(row));
      }
      QVec term = F.mul(M[i][0], det(S));
      acc = (i % 2 == 0) ? F.add(acc, term) : F.sub(acc, term);
    }
    return acc;
  };
  QVec d = det(G);
  if (!F.is_integral(d)) throw std::invalid_argument("trace form is not integral");
  if (F.is_zero(d)) throw std::invalid_argument("degenerate trace form");
  Rat nd = F.norm(d);
  ZIdeal out = F.unit_ideal();
  for (auto& p : distinct_prime_factors(nd.get_num()))
    for (auto& P : F.split_prime(p)) {
      int v = F.valuation(d, P);
      if (v % 2 != 0) throw std::logic_error("trace form determinant is not a square ideal");
      if (v > 0) out = F.ideal_mul(out, F.ideal_pow(F.prime_ideal_lattice(P), v / 2));
    }
  return out;
}

std::array<QVec, 4> Order::coords(const QuatElement& x) const {
  QVec u = qmat_apply(minv_t, quat_coords(*B, x));
  int n = B->F->n;
  std::array<QVec, 4> out;
  for (int k = 0; k < 4; k++) out[k] = QVec(u.begin() + k * n, u.begin() + (k + 1) * n);
  return out;
}

Order make_order(const QuatAlgebra& B, const QuatLattice& lat) {
  const NumberField& F = *B.F;
  Order O;
  O.B = &B;
  O.lat = lat;
  if (!lattice_contains(B, lat, B.one())) throw std::invalid_argument("order must contain 1");
  O.basis = lattice_zf_basis(B, lat);
  for (int k = 0; k < 4; k++) {
    if (!F.is_integral(B.trd(O.basis[k])) || !F.is_integral(B.nrd(O.basis[k])))
      throw std::invalid_argument("order has non-integral elements");
    for (int l = 0; l < 4; l++)
      if (!lattice_contains(B, lat, B.mul(O.basis[k], O.basis[l])))
        throw std::invalid_argument("lattice is not closed under multiplication");
  }
  QMat M(4 * F.n, 4 * F.n);
  for (int k = 0; k < 4; k++)
    for (int r = 0; r < F.n; r++) {
      QVec row = quat_coords(B, B.scale(basis_unit(F, r), O.basis[k]));
      for (int j = 0; j < 4 * F.n; j++) M.at(k * F.n + r, j) = row[j];
    }
  auto inv = qmat_inverse(M);
  if (!inv) throw std::logic_error("degenerate order basis");
  O.minv_t = qmat_transpose(*inv);
  O.rdisc = reduced_discriminant(B, lat);
  O.level = F.unit_ideal();
  return O;
}

Order standard_order(const QuatAlgebra& B) {
  const NumberField& F = *B.F;
  Int da = 1, db = 1;
  for (auto& c : B.a) da = lcm(da, c.get_den());
  for (auto& c : B.b) db = lcm(db, c.get_den());
  QuatElement i = B.scale(F.from_int(da), B.unit_i());
  QuatElement j = B.scale(F.from_int(db), B.unit_j());
  return make_order(B, quat_lattice(B, {B.one(), i, j, B.mul(i, j)}));
}

namespace {

// Iterated L <- L + L*L; empty if it fails to stabilize.
std::optional<QuatLattice> ring_closure(const QuatAlgebra& B, QuatLattice L) {
  for (int it = 0; it < 8; it++) {
    QuatLattice L2 = lattice_sum(B, L, lattice_mul(B, L, L));
    if (L2 == L) return L;
    L = std::move(L2);
  }
  return std::nullopt;
}

// Square root of a P-adic unit c modulo P^prec (odd P, c a residue square).
QVec sqrt_lift(const NumberField& F, const QVec& c, const PrimeIdeal& P, int prec) {
  ResidueRing R1(F, F.prime_ideal_lattice(P));
  QVec c1 = R1.reduce(F.local_rep(c, P, 1));
  QVec s;
  bool found = false;
  for (auto& t : R1.elements())
    if (R1.is_zero(R1.sub(R1.mul(t, t), c1))) {
      s = t;
      found = true;
      break;
    }
  if (!found) throw std::logic_error("element is not a residue square");
  ResidueRing R(F, F.ideal_pow(F.prime_ideal_lattice(P), prec));
  QVec cc = R.reduce(F.local_rep(c, P, prec));
  for (int it = 0; it < prec; it++) {
    auto d = R.inv(F.scale(Rat(2), s));
    if (!d) throw std::logic_error("Newton step not invertible");
    s = R.sub(s, R.mul(R.sub(R.mul(s, s), cc), *d));
  }
  if (!R.is_zero(R.sub(R.mul(s, s), cc))) throw std::logic_error("square root lift failed");
  return s;
}

// One enlargement of O at P: strictly larger order, discriminant drops.
Order enlarge_at(const QuatAlgebra& B, const Order& O, const PrimeIdeal& P) {
  const NumberField& F = *B.F;
  QVec pi = F.totally_positive_generator(F.prime_ideal_lattice(P));
  QVec pinv = F.inv(pi);
  std::vector<QuatElement> cand;
  if (P.p != 2) {
    // Pure anticommuting generators with square valuations in {0, 1}.
    int va = F.valuation(B.a, P), vb = F.valuation(B.b, P);
    QVec ia = F.pow(pinv, va / 2), ib = F.pow(pinv, vb / 2);
    QuatElement e1 = B.scale(ia, B.unit_i()), e2 = B.scale(ib, B.unit_j());
    QVec q1 = F.mul(B.a, F.mul(ia, ia)), q2 = F.mul(B.b, F.mul(ib, ib));
    QuatElement e3 = B.mul(e1, e2);
    QVec q3 = F.neg(F.mul(q1, q2));
    int v1 = va % 2, v2 = vb % 2;
    if (v1 + v2 == 2) {
      e3 = B.scale(pinv, e3);
      q3 = F.mul(q3, F.mul(pinv, pinv));
    }
    cand.push_back(e1);
    cand.push_back(e2);
    cand.push_back(e3);
    if (v1 + v2 > 0) {
      // Exactly one of the squares is a unit at P; if it is a residue
      // square the algebra splits and (s + e_u) e_v / pi is integral.
      QuatElement eu = e1, ev = e2;
      QVec qu = q1;
      if (v1 == 1 && v2 == 0) {
        eu = e2;
        ev = e1;
        qu = q2;
      } else if (v1 == 1 && v2 == 1) {
        eu = e3;
        ev = e1;
        qu = q3;
      }
      if (F.legendre(F.local_rep(qu, P, 1), P) == 1) {
        QVec s = sqrt_lift(F, qu, P, 3);
        cand.push_back(B.scale(pinv, B.mul(B.add(B.from_field(s), eu), ev)));
      }
    }
  }
  auto try_adjoin = [&](const QuatElement& x) -> std::optional<Order> {
    auto L = ring_closure(B, lattice_adjoin(B, O.lat, x));
    if (!L || *L == O.lat) return std::nullopt;
    try {
      return make_order(B, *L);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  };
  for (auto& x : cand)
    if (auto O2 = try_adjoin(x)) return *O2;
  if (P.p == 2) {
    // Index-p superlattices (1/pi) z for z over the Z-basis mod p.
    auto ys = lattice_zbasis(B, O.lat);
    int m = int(ys.size());
    long p = P.p.get_si();
    std::vector<int> dig(m, 0);
    while (true) {
      int c = 0;
      while (c < m && ++dig[c] == p) dig[c++] = 0;
      if (c == m) break;
      QuatElement z = B.zero();
      for (int r = 0; r < m; r++)
        if (dig[r] != 0) z = B.add(z, B.scale(F.from_int(dig[r]), ys[r]));
      QuatElement x = B.scale(pinv, z);
      bool ok = F.is_integral(B.trd(x)) && F.is_integral(B.nrd(x));
      for (int k = 0; ok && k < 4; k++) {
        QuatElement xk = B.mul(x, O.basis[k]);
        ok = F.is_integral(B.trd(xk)) && F.is_integral(B.nrd(xk));
      }
      if (!ok) continue;
      if (auto O2 = try_adjoin(x)) return *O2;
    }
  }
  throw SaturationStalled("saturation stalled at the prime of norm " + norm_str(P));
}

}  // namespace

Order maximal_order(const QuatAlgebra& B) {
  const NumberField& F = *B.F;
  Order O = standard_order(B);
  Int nd = F.ideal_norm(O.rdisc);
  for (auto& p : distinct_prime_factors(nd))
    for (auto& P : F.split_prime(p)) {
      int target = B.is_ramified(P) ? 1 : 0;
      while (F.ideal_valuation(O.rdisc, P) > target) O = enlarge_at(B, O, P);
    }
  return O;
}

// ---------------------------------------------------------------------------
// Splittings adapted to an order.

OrderSplitting make_order_splitting(const Order& O, const PrimeIdeal& P, int e) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  if (B.is_ramified(P)) throw RamifiedPlace("algebra is ramified at the prime");
  if (F.ideal_valuation(O.rdisc, P) != 0)
    throw std::invalid_argument("order is not maximal at the prime");
  OrderSplitting S{P, e, ResidueRing(F, F.ideal_pow(F.prime_ideal_lattice(P), e)), O.basis,
                   O.minv_t, {}};
  const ResidueRing& R = S.R;
  ResidueRing R1(F, F.prime_ideal_lattice(P));

  // Structure data over the order basis.
  std::array<std::array<std::array<QVec, 4>, 4>, 4> sc;
  std::array<QVec, 4> tr, nr;
  std::array<std::array<QVec, 4>, 4> pol;
  for (int k = 0; k < 4; k++) {
    tr[k] = B.trd(O.basis[k]);
    nr[k] = B.nrd(O.basis[k]);
    for (int l = 0; l < 4; l++) {
      auto c = O.coords(B.mul(O.basis[k], O.basis[l]));
      for (int mth = 0; mth < 4; mth++) {
        if (!F.is_integral(c[mth])) throw std::logic_error("non-integral structure constants");
        sc[k][l][mth] = c[mth];
      }
      pol[k][l] = B.trd(B.mul(O.basis[k], B.conj(O.basis[l])));
    }
  }
  using Vec4 = std::array<QVec, 4>;
  auto mul4 = [&](const ResidueRing& Rr, const Vec4& x, const Vec4& y) {
    Vec4 out{Rr.reduce(F.zero()), Rr.reduce(F.zero()), Rr.reduce(F.zero()), Rr.reduce(F.zero())};
    for (int k = 0; k < 4; k++)
      for (int l = 0; l < 4; l++) {
        if (F.is_zero(x[k]) || F.is_zero(y[l])) continue;
        QVec w = Rr.mul(x[k], y[l]);
        for (int mth = 0; mth < 4; mth++)
          out[mth] = Rr.add(out[mth], Rr.mul(w, sc[k][l][mth]));
      }
    return out;
  };
  auto trd4 = [&](const ResidueRing& Rr, const Vec4& x) {
    QVec t = Rr.reduce(F.zero());
    for (int k = 0; k < 4; k++) t = Rr.add(t, Rr.mul(x[k], tr[k]));
    return t;
  };
  auto nrd4 = [&](const ResidueRing& Rr, const Vec4& x) {
    QVec v = Rr.reduce(F.zero());
    for (int k = 0; k < 4; k++) {
      v = Rr.add(v, Rr.mul(Rr.mul(x[k], x[k]), nr[k]));
      for (int l = k + 1; l < 4; l++) v = Rr.add(v, Rr.mul(Rr.mul(x[k], x[l]), pol[k][l]));
    }
    return v;
  };

  // Split element mod P: residue charpoly with two distinct roots.
  auto residues = R1.elements();
  Vec4 u;
  QVec lam;
  bool found = false;
  std::vector<size_t> idx(4, 0);
  while (!found) {
    size_t c = 0;
    while (c < 4 && ++idx[c] == residues.size()) idx[c++] = 0;
    if (c == 4) break;
    Vec4 cu{residues[idx[0]], residues[idx[1]], residues[idx[2]], residues[idx[3]]};
    QVec t = trd4(R1, cu), nv = nrd4(R1, cu);
    for (auto& l0 : residues) {
      QVec val = R1.add(R1.sub(R1.mul(l0, l0), R1.mul(t, l0)), nv);
      if (!R1.is_zero(val)) continue;
      if (!R1.inv(R1.sub(R1.add(l0, l0), t))) continue;
      u = cu;
      lam = l0;
      found = true;
      break;
    }
  }
  if (!found) throw LiftFailed("no split element at the prime");

  // Hensel-lift the eigenvalue against the exact reduced charpoly of u.
  for (auto& c : u) c = R.reduce(c);
  QVec t = trd4(R, u), nv = nrd4(R, u);
  lam = R.reduce(lam);
  for (int it = 0; it < e; it++) {
    QVec g = R.add(R.sub(R.mul(lam, lam), R.mul(t, lam)), nv);
    auto d = R.inv(R.sub(R.add(lam, lam), t));
    if (!d) throw LiftFailed("eigenvalue lift lost invertibility");
    lam = R.sub(lam, R.mul(g, *d));
  }
  if (!R.is_zero(R.add(R.sub(R.mul(lam, lam), R.mul(t, lam)), nv)))
    throw LiftFailed("eigenvalue lift did not converge");
  QVec lam2 = R.sub(t, lam);
  auto dinv = R.inv(R.sub(lam, lam2));
  if (!dinv) throw LiftFailed("eigenvalues collide");

  // Idempotent and the rank-two left module O * eps.
  auto one_c = O.coords(B.one());
  Vec4 eps;
  for (int k = 0; k < 4; k++)
    eps[k] = R.mul(R.sub(u[k], R.mul(lam2, one_c[k])), *dinv);
  std::vector<Vec4> rows;
  for (int k = 0; k < 4; k++) {
    Vec4 ek{F.zero(), F.zero(), F.zero(), F.zero()};
    ek[k] = F.one();
    rows.push_back(mul4(R, ek, eps));
  }
  std::vector<Vec4> red;
  std::vector<int> piv;
  std::vector<bool> used(rows.size(), false);
  for (int col = 0; col < 4; col++) {
    int sel = -1;
    std::optional<QVec> inv;
    for (int r = 0; r < int(rows.size()); r++) {
      if (used[r]) continue;
      inv = R.inv(rows[r][col]);
      if (inv) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    used[sel] = true;
    Vec4 v;
    for (int k = 0; k < 4; k++) v[k] = R.mul(rows[sel][k], *inv);
    for (int r = 0; r < int(rows.size()); r++) {
      if (r == sel) continue;
      QVec f = rows[r][col];
      if (R.is_zero(f)) continue;
      for (int k = 0; k < 4; k++) rows[r][k] = R.sub(rows[r][k], R.mul(f, v[k]));
    }
    for (auto& w : red) {
      QVec f = w[col];
      if (R.is_zero(f)) continue;
      for (int k = 0; k < 4; k++) w[k] = R.sub(w[k], R.mul(f, v[k]));
    }
    red.push_back(v);
    piv.push_back(col);
  }
  if (int(red.size()) != 2) throw LiftFailed("left module is not free of rank two");
  for (int r = 0; r < int(rows.size()); r++)
    if (!used[r])
      for (int k = 0; k < 4; k++)
        if (!R.is_zero(rows[r][k])) throw LiftFailed("left module reduction has residue");

  // Matrix of left multiplication on the module basis.
  auto act = [&](int k) {
    RMat2 out;
    Vec4 ek{F.zero(), F.zero(), F.zero(), F.zero()};
    ek[k] = F.one();
    for (int mcol = 0; mcol < 2; mcol++) {
      Vec4 w = mul4(R, ek, red[mcol]);
      out[0][mcol] = w[piv[0]];
      out[1][mcol] = w[piv[1]];
      // membership check: w == sum_i out[i][mcol] * red[i]
      for (int kk = 0; kk < 4; kk++) {
        QVec rec = R.add(R.mul(out[0][mcol], red[0][kk]), R.mul(out[1][mcol], red[1][kk]));
        if (!R.is_zero(R.sub(w[kk], rec))) throw LiftFailed("module is not stable");
      }
    }
    return out;
  };
  for (int k = 0; k < 4; k++) S.gen[k] = act(k);

  // Verify the ring map on structure constants, identity, trace and norm.
  auto madd = [&](const RMat2& X, const RMat2& Y) {
    RMat2 Z;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) Z[i][j] = R.add(X[i][j], Y[i][j]);
    return Z;
  };
  auto mscale = [&](const QVec& c, const RMat2& X) {
    RMat2 Z;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) Z[i][j] = R.mul(c, X[i][j]);
    return Z;
  };
  auto mmul = [&](const RMat2& X, const RMat2& Y) {
    RMat2 Z;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++)
        Z[i][j] = R.add(R.mul(X[i][0], Y[0][j]), R.mul(X[i][1], Y[1][j]));
    return Z;
  };
  auto mzero = [&]() {
    RMat2 Z;
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) Z[i][j] = R.reduce(F.zero());
    return Z;
  };
  auto mequal = [&](const RMat2& X, const RMat2& Y) {
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++)
        if (!R.is_zero(R.sub(X[i][j], Y[i][j]))) return false;
    return true;
  };
  RMat2 id = mzero();
  for (int k = 0; k < 4; k++) id = madd(id, mscale(one_c[k], S.gen[k]));
  RMat2 want = mzero();
  want[0][0] = R.reduce(F.one());
  want[1][1] = R.reduce(F.one());
  if (!mequal(id, want)) throw LiftFailed("identity does not map to the identity");
  for (int k = 0; k < 4; k++)
    for (int l = 0; l < 4; l++) {
      RMat2 lhs = mmul(S.gen[k], S.gen[l]);
      RMat2 rhs = mzero();
      for (int mth = 0; mth < 4; mth++) rhs = madd(rhs, mscale(sc[k][l][mth], S.gen[mth]));
      if (!mequal(lhs, rhs)) throw LiftFailed("splitting is not multiplicative");
    }
  for (int k = 0; k < 4; k++) {
    QVec dk = R.sub(R.mul(S.gen[k][0][0], S.gen[k][1][1]), R.mul(S.gen[k][0][1], S.gen[k][1][0]));
    if (!R.is_zero(R.sub(dk, R.reduce(nr[k])))) throw LiftFailed("determinant mismatch");
    QVec tk = R.add(S.gen[k][0][0], S.gen[k][1][1]);
    if (!R.is_zero(R.sub(tk, R.reduce(tr[k])))) throw LiftFailed("trace mismatch");
  }
  return S;
}

RMat2 order_image(const QuatAlgebra& B, const OrderSplitting& s, const QuatElement& x) {
  const NumberField& F = *B.F;
  QVec u = qmat_apply(s.minv_t, quat_coords(B, x));
  int n = F.n;
  RMat2 out;
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) out[i][j] = s.R.reduce(F.zero());
  for (int k = 0; k < 4; k++) {
    QVec ck(u.begin() + k * n, u.begin() + (k + 1) * n);
    if (F.is_zero(ck)) continue;
    if (!F.is_integral(ck)) ck = F.local_rep(ck, s.P, s.e);
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++) out[i][j] = s.R.add(out[i][j], s.R.mul(ck, s.gen[k][i][j]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eichler orders.

Order eichler_order(const Order& Omax, const ZIdeal& N) {
  const QuatAlgebra& B = *Omax.B;
  const NumberField& F = *B.F;
  Int nn = F.ideal_norm(N);
  if (nn == 1) {
    Order O = Omax;
    O.level = N;
    return O;
  }
  QuatLattice lat = Omax.lat;
  std::vector<OrderSplitting> locals;
  for (auto& p : distinct_prime_factors(nn))
    for (auto& P : F.split_prime(p)) {
      int e = F.ideal_valuation(N, P);
      if (e == 0) continue;
      if (F.ideal_valuation(Omax.rdisc, P) > 0)
        throw NotCoprime("level shares the prime of norm " + norm_str(P) +
                         " with the discriminant");
      OrderSplitting S = make_order_splitting(Omax, P, 2 * e);
      ZIdeal Pe = F.ideal_pow(F.prime_ideal_lattice(P), e);
      auto ys = lattice_zbasis(B, lat);
      int m = int(ys.size());
      ZMat T(m, F.n);
      for (int r = 0; r < m; r++) {
        QVec entry = order_image(B, S, ys[r])[1][0];
        // reduce into the P^e box before taking coordinates
        entry = ResidueRing(F, Pe).reduce(entry);
        for (int j = 0; j < F.n; j++) T.at(r, j) = int_coord(entry[j]);
      }
      auto ker = kernel_rows_mod(T, Pe.h);
      auto rat = lattice_rows_rat(lat);
      std::vector<QVec> rows;
      for (auto& kv : ker) {
        QVec row(4 * F.n, Rat(0));
        for (int r = 0; r < m; r++) {
          if (kv[r] == 0) continue;
          for (int j = 0; j < 4 * F.n; j++) row[j] += Rat(kv[r]) * rat[r][j];
        }
        rows.push_back(std::move(row));
      }
      lat = canonical_lattice(B, rows);
      locals.push_back(std::move(S));
    }
  Order out = make_order(B, lat);
  out.level = N;
  out.level_locals = std::move(locals);
  if (!(out.rdisc == F.ideal_mul(Omax.rdisc, N)))
    throw std::logic_error("Eichler order has the wrong discriminant");
  return out;
}

const OrderSplitting& level_splitting(const Order& O, const PrimeIdeal& P) {
  for (auto& S : O.level_locals)
    if (S.P == P) return S;
  throw std::invalid_argument("no stored splitting at the prime");
}

// ---------------------------------------------------------------------------
// P^1 and left ideals.

std::vector<P1Point> p1_points(const NumberField& F, const PrimeIdeal& P) {
  ResidueRing R1(F, F.prime_ideal_lattice(P));
  std::vector<P1Point> out;
  for (auto& t : R1.elements()) out.push_back({F.one(), t});
  out.push_back({F.zero(), F.one()});
  return out;
}

namespace {

// u in O with iota(u) == target modulo P^e over the splitting s.
QuatElement solve_image(const Order& O, const OrderSplitting& s, const RMat2& target) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  auto ys = lattice_zbasis(B, O.lat);
  int m = int(ys.size()), n = F.n;
  ZMat A(m, 4 * n);
  for (int r = 0; r < m; r++) {
    RMat2 img = order_image(B, s, ys[r]);
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++)
        for (int c = 0; c < n; c++) A.at(r, (2 * i + j) * n + c) = int_coord(img[i][j][c]);
  }
  std::vector<Int> tgt(4 * n);
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      QVec entry = s.R.reduce(target[i][j]);
      for (int c = 0; c < n; c++) tgt[(2 * i + j) * n + c] = int_coord(entry[c]);
    }
  auto sol = solve_rows_mod(A, block_diag(s.R.L.h, 4), tgt);
  if (!sol) throw std::logic_error("image is not attained on the order");
  QuatElement u = B.zero();
  for (int r = 0; r < m; r++)
    if ((*sol)[r] != 0) u = B.add(u, B.scale(F.from_int((*sol)[r]), ys[r]));
  return u;
}

// O*u + O*J for an integral ideal J of Z_F.
QuatLattice orbit_lattice(const Order& O, const QuatElement& u, const ZIdeal& J) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  auto ys = lattice_zbasis(B, O.lat);
  std::vector<QVec> rows;
  for (auto& y : ys) rows.push_back(quat_coords(B, B.mul(y, u)));
  for (int i = 0; i < J.h.nr; i++) {
    QVec g(F.n);
    for (int j = 0; j < F.n; j++) g[j] = Rat(J.h.at(i, j));
    for (auto& y : ys) rows.push_back(quat_coords(B, B.scale(g, y)));
  }
  return canonical_lattice(B, rows);
}

}  // namespace

QuatLattice left_ideal(const Order& O, const OrderSplitting& s, const P1Point& a) {
  const NumberField& F = *O.B->F;
  RMat2 target;
  target[0][0] = a.x;
  target[0][1] = a.y;
  target[1][0] = F.zero();
  target[1][1] = F.zero();
  QuatElement u = solve_image(O, s, target);
  return orbit_lattice(O, u, F.prime_ideal_lattice(s.P));
}

QuatLattice left_ideal(const Order& O, const PrimeIdeal& P, const P1Point& a) {
  return left_ideal(O, make_order_splitting(O, P, 1), a);
}

// ---------------------------------------------------------------------------
// Principalization.

namespace {

// Short-vector search on a lattice under the definite form
// Q(x) = sum_{k >= 2} v_k(nrd x) + Frobenius norm of the split real image.
// sqrt of a positive rational, truncated to roughly `bits` fractional bits.
Rat rat_sqrt(const Rat& v, long bits) {
  assert(v > 0);
  const Int scale = Int(1) << (bits + 8);
  Rat x(std::sqrt(to_double(v)));
  if (!(x > 0)) x = 1;
  for (int it = 0; it < 20; it++) {
    Rat nx = (x + v / x) / 2;
    nx = Rat(round_rat(nx * Rat(scale)), scale);
    nx.canonicalize();
    Rat err = nx - x;
    x = nx;
    if (4 * abs(err.get_num()) * scale < err.get_den()) break;
  }
  return x;
}

std::optional<QuatElement> definite_search(
    const QuatAlgebra& B, const QuatLattice& L,
    const std::function<bool(const QuatElement&)>& accept) {
  const NumberField& F = *B.F;
  // Split at the first real place: Frobenius norm of the matrix image there
  // plus the reduced norm at the ramified places. Totally definite: the
  // reduced norm alone is already positive definite.
  //
  // The basis vectors coming out of the HNF can be hundreds of digits long, so
  // the Gram matrix is built exactly (interval embeddings plus a rational
  // square root), scaled to integers, and reduced with the exact LLL; only the
  // reduced Gram, whose entries are small, is handed to the float enumerator.
  bool split0 = B.real_ramified()[0] == 0;
  auto ys = lattice_zbasis(B, L);
  int m = int(ys.size());
  const long kBits = 420;  // interval width 2^-210: absorbs coordinate blowup
  const long kScaleBits = 192;
  const Int S = Int(1) << kScaleBits;
  auto emb = [&](const QVec& x, int k) -> Rat {
    auto iv = F.embed_interval(x, k, kBits);
    return (iv.first + iv.second) / 2;
  };
  using RatMat2 = std::array<std::array<Rat, 2>, 2>;
  std::vector<RatMat2> imgs;
  if (split0) {
    Rat av = emb(B.a, 0), bv = emb(B.b, 0);
    std::array<RatMat2, 4> gen{};
    gen[0] = {{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}};
    if (F.embedding_sign(B.a, 0) > 0) {
      Rat r = rat_sqrt(av, kBits);
      gen[1] = {{{r, Rat(0)}, {Rat(0), -r}}};
      gen[2] = {{{Rat(0), Rat(1)}, {bv, Rat(0)}}};
    } else {
      Rat r = rat_sqrt(bv, kBits);
      gen[1] = {{{Rat(0), Rat(1)}, {av, Rat(0)}}};
      gen[2] = {{{r, Rat(0)}, {Rat(0), -r}}};
    }
    for (int i = 0; i < 2; i++)
      for (int j = 0; j < 2; j++)
        gen[3][i][j] = gen[1][i][0] * gen[2][0][j] + gen[1][i][1] * gen[2][1][j];
    for (auto& y : ys) {
      RatMat2 img{};
      for (int k = 0; k < 4; k++) {
        if (F.is_zero(y.c[k])) continue;
        Rat c = emb(y.c[k], 0);
        for (int i = 0; i < 2; i++)
          for (int j = 0; j < 2; j++) img[i][j] += c * gen[k][i][j];
      }
      imgs.push_back(img);
    }
  }
  std::vector<std::vector<Int>> G(m, std::vector<Int>(m));
  for (int r = 0; r < m; r++)
    for (int l = r; l < m; l++) {
      QVec tpol = B.trd(B.mul(ys[r], B.conj(ys[l])));
      Rat val(0);
      for (int k = split0 ? 1 : 0; k < F.n; k++) val += emb(tpol, k) / 2;
      if (split0)
        for (int i = 0; i < 2; i++)
          for (int j = 0; j < 2; j++) val += imgs[r][i][j] * imgs[l][i][j];
      G[r][l] = G[l][r] = round_rat(val * Rat(S));
    }
  auto U = lll_reduce_gram_exact(G);
  std::vector<QuatElement> rb(m, B.zero());
  for (int i = 0; i < m; i++)
    for (int j = 0; j < m; j++)
      if (U[i][j] != 0) rb[i] = B.add(rb[i], B.scale(F.from_int(U[i][j]), ys[j]));
  DMat Gd(m, std::vector<double>(m));
  for (int i = 0; i < m; i++)
    for (int j = 0; j < m; j++) {
      Rat e(G[i][j], S);
      e.canonicalize();
      Gd[i][j] = to_double(e);
    }
  double radius = 1.0;
  for (int i = 0; i < m; i++) radius = std::max(radius, Gd[i][i]);
  radius *= 1.01;
  for (int round = 0; round < 9; round++, radius *= 2) {
    std::vector<std::pair<double, std::vector<long>>> hits;
    enumerate_short_vectors(Gd, radius,
                            [&](const std::vector<long>& v, double q) { hits.push_back({q, v}); });
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [q, v] : hits) {
      QuatElement x = B.zero();
      for (int i = 0; i < m; i++)
        if (v[i] != 0) x = B.add(x, B.scale(F.from_int(v[i]), rb[i]));
      if (B.is_zero(x)) continue;
      if (accept(x)) return x;
    }
  }
  return std::nullopt;
}

}  // namespace

QuatElement principalize(const Order& O, const QuatLattice& I) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  ZIdeal nI = lattice_nrd(B, I);
  auto hit = definite_search(B, I, [&](const QuatElement& x) {
    QVec nx = B.nrd(x);
    if (F.is_zero(nx) || !F.is_integral(nx)) return false;
    if (!(F.principal_ideal(nx) == nI)) return false;
    return lattice_mul_elem(B, O.lat, x, true) == I;
  });
  if (!hit) throw EnumerationExhausted("no principal generator in the search radius");
  return *hit;
}

QuatElement find_mu(const Order& O) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  auto hit = definite_search(B, O.lat, [&](const QuatElement& x) {
    QVec nx = B.nrd(x);
    if (F.is_zero(nx)) return false;
    Rat nn = F.norm(nx);
    if (!(nn == 1 || nn == -1)) return false;
    return F.embedding_sign(nx, 0) < 0;
  });
  if (!hit) throw EnumerationExhausted("no unit of negative split norm in the search radius");
  return *hit;
}

std::vector<QuatElement> hecke_reps(const Order& O, const PrimeIdeal& P) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  auto s = make_order_splitting(O, P, 1);
  std::vector<QuatElement> out;
  std::optional<QuatElement> mu;
  for (auto& a : p1_points(F, P)) {
    QuatLattice I = left_ideal(O, s, a);
    QuatElement x = principalize(O, I);
    if (F.embedding_sign(B.nrd(x), 0) < 0) {
      if (!mu) mu = find_mu(O);
      x = B.mul(*mu, x);
    }
    if (!F.is_totally_positive(B.nrd(x)))
      throw std::logic_error("Hecke representative norm is not totally positive");
    out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-sided ideals.

std::pair<QuatLattice, QuatElement> twosided_ideal(const Order& O, const PrimeIdeal& P, int e) {
  const QuatAlgebra& B = *O.B;
  const NumberField& F = *B.F;
  int v = F.ideal_valuation(O.rdisc, P);
  if (v == 0 || e != v) throw NotExactDivisor("exponent does not exactly divide the discriminant");
  QuatLattice J;
  if (B.is_ramified(P)) {
    // Radical above P: kernel of the trace pairing mod P.
    auto ys = lattice_zbasis(B, O.lat);
    int m = int(ys.size()), n = F.n;
    ZMat T(m, m * n);
    for (int r = 0; r < m; r++)
      for (int l = 0; l < m; l++) {
        QVec t = B.trd(B.mul(ys[r], B.conj(ys[l])));
        for (int j = 0; j < n; j++) T.at(r, l * n + j) = int_coord(t[j]);
      }
    auto ker = kernel_rows_mod(T, block_diag(F.prime_ideal_lattice(P).h, m));
    auto rat = lattice_rows_rat(O.lat);
    std::vector<QVec> rows;
    for (auto& kv : ker) {
      QVec row(4 * n, Rat(0));
      for (int r = 0; r < m; r++) {
        if (kv[r] == 0) continue;
        for (int j = 0; j < 4 * n; j++) row[j] += Rat(kv[r]) * rat[r][j];
      }
      rows.push_back(std::move(row));
    }
    J = canonical_lattice(B, rows);
  } else {
    const OrderSplitting& s = level_splitting(O, P);
    QVec pie = F.pow(F.totally_positive_generator(F.prime_ideal_lattice(P)), e);
    RMat2 target;
    target[0][0] = F.zero();
    target[0][1] = F.one();
    target[1][0] = pie;
    target[1][1] = F.zero();
    QuatElement u = solve_image(O, s, target);
    J = orbit_lattice(O, u, F.ideal_pow(F.prime_ideal_lattice(P), e));
  }
  QuatElement pi = principalize(O, J);
  if (F.embedding_sign(B.nrd(pi), 0) < 0) pi = B.mul(find_mu(O), pi);
  if (!(lattice_mul_elem(B, O.lat, pi, true) == J && lattice_mul_elem(B, O.lat, pi, false) == J))
    throw std::logic_error("generator is not two-sided");
  return {J, pi};
}

}  // namespace hmf
