#include "hmf/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hmf {

QMat QMat::identity(int n) {
  QMat I(n, n);
  for (int i = 0; i < n; i++) I.at(i, i) = 1;
  return I;
}

QMat qmat_mul(const QMat& A, const QMat& B) {
  assert(A.nc == B.nr);
  QMat C(A.nr, B.nc);
  for (int i = 0; i < A.nr; i++)
    for (int k = 0; k < A.nc; k++) {
      const Rat& aik = A.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < B.nc; j++)
        if (B.at(k, j) != 0) C.at(i, j) += aik * B.at(k, j);
    }
  return C;
}

QVec qmat_apply(const QMat& A, const QVec& x) {
  assert(int(x.size()) == A.nc);
  QVec y(A.nr);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < A.nc; j++)
      if (A.at(i, j) != 0 && x[j] != 0) y[i] += A.at(i, j) * x[j];
  return y;
}

QMat qmat_add(const QMat& A, const QMat& B) {
  assert(A.nr == B.nr && A.nc == B.nc);
  QMat C = A;
  for (size_t i = 0; i < C.a.size(); i++) C.a[i] += B.a[i];
  return C;
}

QMat qmat_sub(const QMat& A, const QMat& B) {
  assert(A.nr == B.nr && A.nc == B.nc);
  QMat C = A;
  for (size_t i = 0; i < C.a.size(); i++) C.a[i] -= B.a[i];
  return C;
}

QMat qmat_transpose(const QMat& A) {
  QMat T(A.nc, A.nr);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < A.nc; j++) T.at(j, i) = A.at(i, j);
  return T;
}

bool qmat_is_zero(const QMat& A) {
  for (const Rat& x : A.a)
    if (x != 0) return false;
  return true;
}

Rref rref(const QMat& A) {
  Rref out;
  out.R = A;
  QMat& R = out.R;
  int row = 0;
  for (int col = 0; col < R.nc && row < R.nr; col++) {
    int piv = -1;
    for (int i = row; i < R.nr; i++)
      if (R.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < R.nc; j++) std::swap(R.at(piv, j), R.at(row, j));
    Rat inv = 1 / R.at(row, col);
    for (int j = col; j < R.nc; j++) R.at(row, j) *= inv;
    for (int i = 0; i < R.nr; i++) {
      if (i == row || R.at(i, col) == 0) continue;
      Rat f = R.at(i, col);
      for (int j = col; j < R.nc; j++) R.at(i, j) -= f * R.at(row, j);
    }
    out.pivots.push_back(col);
    row++;
  }
  out.rank = row;
  return out;
}

std::vector<QVec> kernel(const QMat& A) {
  Rref r = rref(A);
  std::vector<bool> is_pivot(A.nc, false);
  for (int c : r.pivots) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (int free = 0; free < A.nc; free++) {
    if (is_pivot[free]) continue;
    QVec v(A.nc);
    v[free] = 1;
    for (int i = 0; i < r.rank; i++) v[r.pivots[i]] = -r.R.at(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QVec> solve(const QMat& A, const QVec& b) {
  QMat aug(A.nr, A.nc + 1);
  for (int i = 0; i < A.nr; i++) {
    for (int j = 0; j < A.nc; j++) aug.at(i, j) = A.at(i, j);
    aug.at(i, A.nc) = b[i];
  }
  Rref r = rref(aug);
  QVec x(A.nc);
  for (int i = 0; i < r.rank; i++) {
    if (r.pivots[i] == A.nc) return std::nullopt;  // inconsistent
    x[r.pivots[i]] = r.R.at(i, A.nc);
  }
  return x;
}

Rat qmat_det(const QMat& A) {
  assert(A.nr == A.nc);
  QMat M = A;
  Rat det = 1;
  int n = A.nr;
  for (int col = 0; col < n; col++) {
    int piv = -1;
    for (int i = col; i < n; i++)
      if (M.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < n; j++) std::swap(M.at(piv, j), M.at(col, j));
      det = -det;
    }
    det *= M.at(col, col);
    Rat inv = 1 / M.at(col, col);
    for (int i = col + 1; i < n; i++) {
      if (M.at(i, col) == 0) continue;
      Rat f = M.at(i, col) * inv;
      for (int j = col; j < n; j++) M.at(i, j) -= f * M.at(col, j);
    }
  }
  return det;
}

std::optional<QMat> qmat_inverse(const QMat& A) {
  assert(A.nr == A.nc);
  int n = A.nr;
  QMat aug(n, 2 * n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) aug.at(i, j) = A.at(i, j);
    aug.at(i, n + i) = 1;
  }
  Rref r = rref(aug);
  if (r.rank < n || r.pivots[n - 1] != n - 1) return std::nullopt;
  QMat inv(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) inv.at(i, j) = r.R.at(i, n + j);
  return inv;
}

QVec charpoly(const QMat& A) {
  assert(A.nr == A.nc);
  int n = A.nr;
  // Faddeev-LeVerrier: M_0 = I, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I,
  // c_{n-k} = -tr(A M_k)/k.
  QVec c(n + 1);
  c[n] = 1;
  QMat M = QMat::identity(n);
  for (int k = 1; k <= n; k++) {
    if (k > 1) {
      M = qmat_mul(A, M);
      for (int i = 0; i < n; i++) M.at(i, i) += c[n - k + 1];
    }
    QMat AM = qmat_mul(A, M);
    Rat tr = 0;
    for (int i = 0; i < n; i++) tr += AM.at(i, i);
    c[n - k] = -tr / k;
  }
  return c;
}

static Rat poly_eval(const QVec& p, const Rat& x) {
  Rat v = 0;
  for (int i = int(p.size()) - 1; i >= 0; i--) v = v * x + p[i];
  return v;
}

static std::vector<Int> divisors(Int n) {
  n = abs(n);
  std::vector<Int> ds;
  for (Int d = 1; d * d <= n; d++) {
    if (n % d == 0) {
      ds.push_back(d);
      if (d * d != n) ds.push_back(n / d);
    }
  }
  return ds;
}

std::vector<Rat> rational_roots(const QVec& poly, QVec* rest) {
  // Normalize to primitive integer coefficients.
  QVec p = poly;
  while (!p.empty() && p.back() == 0) p.pop_back();
  std::vector<Rat> roots;
  if (p.empty()) { if (rest) *rest = {Rat(1)}; return roots; }
  Int lcmden = 1;
  for (const Rat& q : p) lcmden = lcm(lcmden, q.get_den());
  std::vector<Int> ip;
  for (const Rat& q : p) ip.push_back(Int(q * lcmden));

  // Strip zero roots.
  size_t lowest = 0;
  while (lowest < ip.size() && ip[lowest] == 0) lowest++;
  for (size_t k = 0; k < lowest; k++) roots.push_back(0);
  ip.erase(ip.begin(), ip.begin() + lowest);
  p.assign(ip.begin(), ip.end());

  bool found = true;
  while (p.size() > 1 && found) {
    found = false;
    Int a0(p.front()), an(p.back());
    for (const Int& num : divisors(a0)) {
      for (const Int& den : divisors(an)) {
        for (int sgn : {1, -1}) {
          Rat cand(sgn * num, den);
          cand.canonicalize();
          if (poly_eval(p, cand) == 0) {
            roots.push_back(cand);
            // Deflate by (x - cand) via synthetic division.
            QVec q(p.size() - 1);
            Rat carry = 0;
            for (int i = int(p.size()) - 1; i >= 1; i--) {
              carry = p[i] + carry * cand;
              q[i - 1] = carry;
            }
            p = q;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
  }
  if (rest) {
    // Make remaining factor monic.
    QVec r = p;
    if (!r.empty() && r.back() != 0) {
      Rat lead = r.back();
      for (Rat& q : r) q /= lead;
    }
    *rest = r;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::string poly_str(const QVec& poly, const std::string& var) {
  std::ostringstream os;
  bool first = true;
  for (int i = int(poly.size()) - 1; i >= 0; i--) {
    const Rat& c = poly[i];
    if (c == 0) continue;
    Rat ac = abs(c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool coef1 = (ac == 1) && i > 0;
    if (!coef1) os << ac.get_str();
    if (i > 0) {
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------

ZMat hnf(const ZMat& A) {
  HnfTransform t = hnf_transform(A);
  ZMat H(t.rank, A.nc);
  for (int i = 0; i < t.rank; i++)
    for (int j = 0; j < A.nc; j++) H.at(i, j) = t.H.at(i, j);
  return H;
}

HnfTransform hnf_transform(const ZMat& A) {
  HnfTransform out;
  out.H = A;
  out.U = ZMat(A.nr, A.nr);
  for (int i = 0; i < A.nr; i++) out.U.at(i, i) = 1;
  ZMat& H = out.H;
  ZMat& U = out.U;
  int nr = A.nr, nc = A.nc;
  auto swap_rows = [&](int i, int k) {
    if (i == k) return;
    for (int j = 0; j < nc; j++) std::swap(H.at(i, j), H.at(k, j));
    for (int j = 0; j < nr; j++) std::swap(U.at(i, j), U.at(k, j));
  };
  auto addmul_row = [&](int dst, int src, const Int& f) {
    if (f == 0) return;
    for (int j = 0; j < nc; j++) H.at(dst, j) += f * H.at(src, j);
    for (int j = 0; j < nr; j++) U.at(dst, j) += f * U.at(src, j);
  };
  auto negate_row = [&](int i) {
    for (int j = 0; j < nc; j++) H.at(i, j) = -H.at(i, j);
    for (int j = 0; j < nr; j++) U.at(i, j) = -U.at(i, j);
  };

  int row = 0;
  for (int col = 0; col < nc && row < nr; col++) {
    // Euclidean reduction in this column below `row`.
    while (true) {
      int piv = -1;
      for (int i = row; i < nr; i++)
        if (H.at(i, col) != 0) {
          if (piv < 0 || abs(H.at(i, col)) < abs(H.at(piv, col))) piv = i;
        }
      if (piv < 0) break;
      swap_rows(row, piv);
      if (H.at(row, col) < 0) negate_row(row);
      bool done = true;
      for (int i = row + 1; i < nr; i++) {
        if (H.at(i, col) == 0) continue;
        Int q = floor_div(H.at(i, col), H.at(row, col));
        addmul_row(i, row, -q);
        if (H.at(i, col) != 0) done = false;
      }
      if (done) break;
    }
    if (row < nr && H.at(row, col) != 0) {
      // Reduce entries above the pivot into [0, pivot).
      for (int i = 0; i < row; i++) {
        Int q = floor_div(H.at(i, col), H.at(row, col));
        addmul_row(i, row, -q);
      }
      row++;
    }
  }
  out.rank = row;
  return out;
}

std::vector<std::vector<Int>> z_left_kernel(const ZMat& A) {
  HnfTransform t = hnf_transform(A);
  std::vector<std::vector<Int>> ker;
  for (int i = t.rank; i < A.nr; i++) {
    std::vector<Int> row(A.nr);
    for (int j = 0; j < A.nr; j++) row[j] = t.U.at(i, j);
    ker.push_back(std::move(row));
  }
  return ker;
}

std::optional<std::vector<Int>> hnf_solve(const ZMat& H, const std::vector<Int>& v) {
  // H is in HNF (rank rows). Back-substitute greedily by pivot columns.
  std::vector<Int> rem(v);
  std::vector<Int> x(H.nr);
  int col = 0;
  for (int i = 0; i < H.nr; i++) {
    while (col < H.nc && H.at(i, col) == 0) col++;
    if (col >= H.nc) break;
    if (rem[col] % H.at(i, col) != 0) {
      // may still be nonzero from earlier columns; handled below
    }
    Int q = rem[col] / H.at(i, col);
    if (q * H.at(i, col) != rem[col]) return std::nullopt;
    x[i] = q;
    for (int j = col; j < H.nc; j++) rem[j] -= q * H.at(i, j);
  }
  for (const Int& r : rem)
    if (r != 0) return std::nullopt;
  return x;
}

bool hnf_contains(const ZMat& H, const std::vector<Int>& v) {
  return hnf_solve(H, v).has_value();
}

Int zmat_det(const ZMat& A) {
  assert(A.nr == A.nc);
  QMat Q(A.nr, A.nc);
  for (int i = 0; i < A.nr; i++)
    for (int j = 0; j < A.nc; j++) Q.at(i, j) = Rat(A.at(i, j));
  Rat d = qmat_det(Q);
  assert(is_integer(d));
  return d.get_num();
}

}  // namespace hmf
