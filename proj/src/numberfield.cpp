#include "hmf/numberfield.hpp"

#include "hmf/lll.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <cmath>
#include <sstream>

namespace hmf {

namespace {

Rat eval_poly(const QVec& p, const Rat& x) {
  Rat v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

QVec qpoly_trim(QVec p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

// remainder of a by b over Q, b nonzero
QVec qpoly_rem(QVec a, const QVec& b) {
  a = qpoly_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat c = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); i++) a[shift + i] -= c * b[i];
    a = qpoly_trim(a);
  }
  return a;
}

int sgn(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

using IV = std::pair<Rat, Rat>;

IV iv_add(const IV& a, const IV& b) { return {a.first + b.first, a.second + b.second}; }

IV iv_mul(const IV& a, const IV& b) {
  Rat p1 = a.first * b.first, p2 = a.first * b.second;
  Rat p3 = a.second * b.first, p4 = a.second * b.second;
  return {std::min(std::min(p1, p2), std::min(p3, p4)),
          std::max(std::max(p1, p2), std::max(p3, p4))};
}

Rat pow2_inv(long bits) {
  Int d = 1;
  d <<= bits;
  return Rat(Int(1), d);
}

bool is_prime_small(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; d++)
    if (p % d == 0) return false;
  return true;
}

// Solve A eps = b over F_2 (A given by columns); empty if inconsistent.
std::optional<std::vector<int>> f2_solve(std::vector<std::vector<int>> cols,
                                         std::vector<int> b) {
  int rows = int(b.size()), nc = int(cols.size());
  // build augmented row-major matrix
  std::vector<std::vector<int>> m(rows, std::vector<int>(nc + 1, 0));
  for (int j = 0; j < nc; j++)
    for (int i = 0; i < rows; i++) m[i][j] = cols[j][i] & 1;
  for (int i = 0; i < rows; i++) m[i][nc] = b[i] & 1;
  std::vector<int> pivot_col(rows, -1);
  int r = 0;
  for (int c = 0; c < nc && r < rows; c++) {
    int piv = -1;
    for (int i = r; i < rows; i++)
      if (m[i][c]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    for (int i = 0; i < rows; i++)
      if (i != r && m[i][c])
        for (int j = c; j <= nc; j++) m[i][j] ^= m[r][j];
    pivot_col[r] = c;
    r++;
  }
  for (int i = r; i < rows; i++)
    if (m[i][nc]) return std::nullopt;
  std::vector<int> eps(nc, 0);
  for (int i = 0; i < r; i++) eps[pivot_col[i]] = m[i][nc];
  return eps;
}

}  // namespace

NumberField::NumberField(ZPoly f, QMat basis_rows, Int d_F, std::vector<QVec> unit_list)
    : poly(zpoly_trim(std::move(f))), disc(std::move(d_F)), basis(std::move(basis_rows)),
      units(std::move(unit_list)) {
  n = int(poly.size()) - 1;
  if (n < 1 || poly.back() != 1) throw std::invalid_argument("defining polynomial must be monic");
  poly_disc = zpoly_discriminant(poly);
  if (poly_disc == 0) throw std::invalid_argument("defining polynomial not squarefree");
  Int isq = poly_disc / disc;
  if (isq * disc != poly_disc) throw std::invalid_argument("field discriminant incompatible");
  index = sqrt(isq);
  if (index * index != isq) throw std::invalid_argument("disc(f)/d_F is not a square");

  if (basis.nr != n || basis.nc != n) throw std::invalid_argument("bad basis shape");
  auto bi = qmat_inverse(basis);
  if (!bi) throw std::invalid_argument("basis is singular");
  basis_inv = *bi;

  if (n >= 2) {
    QVec qf(poly.size());
    for (size_t i = 0; i < poly.size(); i++) qf[i] = Rat(poly[i]);
    if (!rational_roots(qf).empty())
      throw std::invalid_argument("defining polynomial is reducible");
  }

  // multiplication tables over the integral basis; closure = integrality
  mult_.assign(n, QMat(n, n));
  for (int i = 0; i < n; i++) {
    QVec bi_pow(n);
    for (int k = 0; k < n; k++) bi_pow[k] = basis.at(i, k);
    for (int j = 0; j < n; j++) {
      // product b_i * b_j in power coords, reduced mod poly
      QVec prod(2 * n - 1, Rat(0));
      for (int s = 0; s < n; s++)
        for (int t = 0; t < n; t++) prod[s + t] += bi_pow[s] * basis.at(j, t);
      for (int d = 2 * n - 2; d >= n; d--) {
        Rat c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        for (int k = 0; k < n; k++) prod[d - n + k] -= c * poly[k];
      }
      prod.resize(n);
      QVec coords = from_power(prod);
      for (int k = 0; k < n; k++) {
        if (!is_integer(coords[k]))
          throw std::invalid_argument("basis not closed under multiplication");
        mult_[i].at(k, j) = coords[k];
      }
    }
  }

  // the trace form on the basis must have determinant d_F
  QMat tf(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      QVec ei = zero(), ej = zero();
      ei[i] = 1;
      ej[j] = 1;
      tf.at(i, j) = trace(mul(ei, ej));
    }
  if (qmat_det(tf) != disc) throw std::invalid_argument("basis discriminant != d_F");

  // isolate the n real roots (totally real check)
  sturm_.clear();
  {
    QVec p0(poly.size()), p1;
    for (size_t i = 0; i < poly.size(); i++) p0[i] = Rat(poly[i]);
    for (size_t i = 1; i < p0.size(); i++) p1.push_back(Rat(long(i)) * p0[i]);
    sturm_.push_back(p0);
    sturm_.push_back(qpoly_trim(p1));
    while (sturm_.back().size() > 1) {
      QVec r = qpoly_rem(sturm_[sturm_.size() - 2], sturm_.back());
      for (auto& c : r) c = -c;
      if (r.empty()) break;
      sturm_.push_back(r);
    }
  }
  if (n == 1) {
    Rat r = Rat(-poly[0]);
    roots_.push_back({r, r});
  } else {
    Rat bound = 1;
    for (int i = 0; i < n; i++) {
      Rat a = Rat(poly[i] >= 0 ? poly[i] : -poly[i]);
      if (a + 1 > bound) bound = a + 1;
    }
    std::vector<std::pair<IV, int>> stack{{{-bound, bound},
                                           sturm_changes(-bound) - sturm_changes(bound)}};
    if (stack[0].second != n) throw std::invalid_argument("polynomial is not totally real");
    while (!stack.empty()) {
      auto [iv, cnt] = stack.back();
      stack.pop_back();
      if (cnt == 0) continue;
      if (cnt == 1) {
        roots_.push_back(iv);
        continue;
      }
      Rat mid = (iv.first + iv.second) / 2;
      int left = sturm_changes(iv.first) - sturm_changes(mid);
      stack.push_back({{iv.first, mid}, left});
      stack.push_back({{mid, iv.second}, cnt - left});
    }
    std::sort(roots_.begin(), roots_.end());
    if (int(roots_.size()) != n) throw std::invalid_argument("polynomial is not totally real");
  }

  // verify the supplied units (an empty list is allowed for bootstrap use;
  // sign-dependent operations then only have -1 available)
  if (!units.empty() && int(units.size()) != std::max(n - 1, 0))
    throw std::invalid_argument("expected n-1 fundamental units");
  for (auto& u : units) {
    if (int(u.size()) != n || !is_integral(u)) throw std::invalid_argument("unit not integral");
    Rat nu = norm(u);
    if (nu != 1 && nu != -1) throw std::invalid_argument("unit has norm != +-1");
  }
  if (n >= 2 && !units.empty()) {
    // multiplicative independence: log-embedding matrix has full rank n-1
    std::vector<std::vector<double>> lm(n - 1, std::vector<double>(n - 1));
    for (int j = 0; j < n - 1; j++)
      for (int k = 0; k < n - 1; k++) lm[j][k] = std::log(std::fabs(embed(units[j], k)));
    // determinant by elimination
    double det = 1;
    for (int c = 0; c < n - 1; c++) {
      int piv = -1;
      for (int r2 = c; r2 < n - 1; r2++)
        if (std::fabs(lm[r2][c]) > 1e-12) {
          piv = r2;
          break;
        }
      if (piv < 0) {
        det = 0;
        break;
      }
      std::swap(lm[c], lm[piv]);
      det *= lm[c][c];
      for (int r2 = c + 1; r2 < n - 1; r2++) {
        double fct = lm[r2][c] / lm[c][c];
        for (int k = c; k < n - 1; k++) lm[r2][k] -= fct * lm[c][k];
      }
    }
    if (std::fabs(det) < 1e-8)
      throw std::invalid_argument("units not multiplicatively independent");
  }
  for (auto& u : units) {
    auto sv = sign_vector(u);
    std::vector<int> bits(n);
    for (int k = 0; k < n; k++) bits[k] = sv[k] < 0 ? 1 : 0;
    unit_sign_bits_.push_back(bits);
  }
  unit_sign_bits_.push_back(std::vector<int>(n, 1));  // -1
}

QVec NumberField::one() const { return from_int(1); }

QVec NumberField::from_int(const Int& m) const { return from_rat(Rat(m)); }

QVec NumberField::from_rat(const Rat& r) const {
  QVec pc(n, Rat(0));
  pc[0] = r;
  return from_power(pc);
}

QVec NumberField::gen() const {
  QVec pc(n, Rat(0));
  if (n >= 2)
    pc[1] = 1;
  else
    pc[0] = Rat(-poly[0]);
  return from_power(pc);
}

QVec NumberField::add(const QVec& x, const QVec& y) const {
  QVec z(n);
  for (int i = 0; i < n; i++) z[i] = x[i] + y[i];
  return z;
}

QVec NumberField::sub(const QVec& x, const QVec& y) const {
  QVec z(n);
  for (int i = 0; i < n; i++) z[i] = x[i] - y[i];
  return z;
}

QVec NumberField::neg(const QVec& x) const {
  QVec z(n);
  for (int i = 0; i < n; i++) z[i] = -x[i];
  return z;
}

QVec NumberField::scale(const Rat& c, const QVec& x) const {
  QVec z(n);
  for (int i = 0; i < n; i++) z[i] = c * x[i];
  return z;
}

QVec NumberField::mul(const QVec& x, const QVec& y) const {
  QVec z(n, Rat(0));
  for (int i = 0; i < n; i++) {
    if (x[i] == 0) continue;
    for (int k = 0; k < n; k++) {
      if (y[k] == 0) continue;
      // column k of mult_[i] = coords of b_i * b_k
      for (int r = 0; r < n; r++) z[r] += x[i] * y[k] * mult_[i].at(r, k);
    }
  }
  return z;
}

QMat NumberField::rep_matrix(const QVec& x) const {
  QMat m(n, n);
  for (int i = 0; i < n; i++) {
    if (x[i] == 0) continue;
    for (int r = 0; r < n; r++)
      for (int c = 0; c < n; c++) m.at(r, c) += x[i] * mult_[i].at(r, c);
  }
  return m;
}

Rat NumberField::trace(const QVec& x) const {
  QMat m = rep_matrix(x);
  Rat t = 0;
  for (int i = 0; i < n; i++) t += m.at(i, i);
  return t;
}

Rat NumberField::norm(const QVec& x) const { return qmat_det(rep_matrix(x)); }

QVec NumberField::inv(const QVec& x) const {
  auto s = solve(rep_matrix(x), one());
  if (!s) throw std::domain_error("division by zero field element");
  return *s;
}

QVec NumberField::pow(const QVec& x, long e) const {
  QVec b = e < 0 ? inv(x) : x;
  if (e < 0) e = -e;
  QVec r = one();
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

bool NumberField::is_zero(const QVec& x) const {
  for (auto& c : x)
    if (c != 0) return false;
  return true;
}

bool NumberField::is_integral(const QVec& x) const {
  for (auto& c : x)
    if (!is_integer(c)) return false;
  return true;
}

bool NumberField::is_rational(const QVec& x) const {
  QVec pc = power_coords(x);
  for (int i = 1; i < n; i++)
    if (pc[i] != 0) return false;
  return true;
}

Rat NumberField::rational_part(const QVec& x) const {
  QVec pc = power_coords(x);
  return pc[0];
}

QVec NumberField::power_coords(const QVec& x) const {
  return qmat_apply(qmat_transpose(basis), x);
}

QVec NumberField::from_power(const QVec& c) const {
  return qmat_apply(qmat_transpose(basis_inv), c);
}

std::string NumberField::str(const QVec& x) const { return poly_str(power_coords(x), "w"); }

// ---------------------------------------------------------------------------

int NumberField::sturm_changes(const Rat& a) const {
  int last = 0, changes = 0;
  for (auto& p : sturm_) {
    int s = sgn(eval_poly(p, a));
    if (s == 0) continue;
    if (last != 0 && s != last) changes++;
    last = s;
  }
  return changes;
}

void NumberField::refine_root(int k, const Rat& max_width) const {
  auto& [lo, hi] = roots_[k];
  if (lo == hi) return;
  int slo = sgn(eval_poly(sturm_[0], lo));
  while (hi - lo > max_width) {
    Rat mid = (lo + hi) / 2;
    int sm = sgn(eval_poly(sturm_[0], mid));
    if (sm == 0) {
      lo = hi = mid;
      return;
    }
    if (sm == slo)
      lo = mid;
    else
      hi = mid;
  }
}

std::pair<Rat, Rat> NumberField::eval_interval(const QVec& pc, const IV& iv) const {
  IV acc{Rat(0), Rat(0)};
  for (size_t i = pc.size(); i-- > 0;) {
    acc = iv_mul(acc, iv);
    acc = iv_add(acc, {pc[i], pc[i]});
  }
  return acc;
}

std::pair<Rat, Rat> NumberField::embed_interval(const QVec& x, int k, long bits) const {
  QVec pc = power_coords(x);
  Rat target = pow2_inv(std::max(bits / 2, 1L));
  for (long b = std::max(bits, 8L); b <= (1L << 14); b *= 2) {
    refine_root(k, pow2_inv(b));
    IV r = eval_interval(pc, roots_[k]);
    if (r.second - r.first <= target) return r;
  }
  throw PrecisionExhausted("embedding interval did not shrink below target width");
}

double NumberField::embed(const QVec& x, int k) const {
  auto iv = embed_interval(x, k, 120);
  return to_double((iv.first + iv.second) / 2);
}

int NumberField::embedding_sign(const QVec& x, int k) const {
  if (is_zero(x)) return 0;
  QVec pc = power_coords(x);
  for (long b = 16; b <= (1L << 14); b *= 2) {
    refine_root(k, pow2_inv(b));
    IV r = eval_interval(pc, roots_[k]);
    if (r.first > 0) return 1;
    if (r.second < 0) return -1;
  }
  throw PrecisionExhausted("sign of embedding undecided at precision cap");
}

std::vector<int> NumberField::sign_vector(const QVec& x) const {
  std::vector<int> s(n);
  for (int k = 0; k < n; k++) s[k] = embedding_sign(x, k);
  return s;
}

bool NumberField::is_totally_positive(const QVec& x) const {
  if (is_zero(x)) throw std::domain_error("total positivity of zero");
  for (int k = 0; k < n; k++)
    if (embedding_sign(x, k) <= 0) return false;
  return true;
}

// ---------------------------------------------------------------------------

std::vector<PrimeIdeal> NumberField::split_prime(const Int& p) const {
  std::vector<PrimeIdeal> out;
  if (index % p != 0) {
    auto fac = factor_mod_p(poly, p.get_si());
    for (auto& fa : fac) {
      PrimeIdeal P;
      P.p = p;
      P.g = fa.poly;
      P.e = fa.mult;
      P.fdeg = int(fa.poly.size()) - 1;
      Int nm = 1;
      for (int i = 0; i < P.fdeg; i++) nm *= p;
      P.norm = nm;
      P.gen2 = second_gen_kummer(P.g);
      P.lattice = ideal_from_gens({from_int(p), P.gen2}).h;
      assert(ideal_norm(ZIdeal{P.lattice}) == P.norm);
      out.push_back(P);
    }
  } else {
    // p divides the index: decompose the finite F_p-algebra R = Z_F/pZ_F.
    // Only workable for small p; residue operations are restricted to
    // residue degree 1 in this form.
    long pl = p.get_si();
    if (pl > 7) throw std::domain_error("index divisor too large to decompose directly");
    // elements of R are coordinate vectors mod p; ideal generated by v is the
    // span of {v * b_j}
    auto vec_of = [&](long code) {
      QVec x = zero();
      for (int i = 0; i < n; i++) {
        x[i] = Rat(code % pl);
        code /= pl;
      }
      return x;
    };
    auto code_of = [&](const QVec& x) {
      long code = 0;
      for (int i = n; i-- > 0;) {
        Int c = x[i].get_num() % pl;
        long v = c.get_si();
        if (v < 0) v += pl;
        code = code * pl + v;
      }
      return code;
    };
    long total = 1;
    for (int i = 0; i < n; i++) total *= pl;
    auto ideal_span = [&](long code) {
      // ideal generated by v in R: close {0} under + and multiplication by
      // the basis images
      std::vector<char> in(total, 0);
      in[0] = 1;
      std::vector<long> queue{code};
      while (!queue.empty()) {
        long w = queue.back();
        queue.pop_back();
        if (in[w]) continue;
        std::vector<long> cur;
        for (long t = 0; t < total; t++)
          if (in[t]) cur.push_back(t);
        std::vector<long> fresh;
        for (long m = 1; m < pl; m++) {
          QVec wm = scale(Rat(m), vec_of(w));
          for (long t : cur) {
            long u = code_of(add(vec_of(t), wm));
            if (!in[u]) {
              in[u] = 1;
              fresh.push_back(u);
            }
          }
        }
        for (long u : fresh)
          for (int j = 0; j < n; j++) {
            QVec bj = zero();
            bj[j] = 1;
            long prod = code_of(mul(vec_of(u), bj));
            if (!in[prod]) queue.push_back(prod);
          }
      }
      std::vector<long> members;
      for (long t = 0; t < total; t++)
        if (in[t]) members.push_back(t);
      return members;
    };
    // collect proper ideals generated by single elements, then close the
    // family under ideal sums
    std::map<std::vector<long>, long> ideals;  // members -> a generator code
    for (long c = 1; c < total; c++) {
      auto m = ideal_span(c);
      if (long(m.size()) < total) ideals.emplace(m, c);
    }
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<std::vector<long>> keys;
      for (auto& kv : ideals) keys.push_back(kv.first);
      for (size_t i = 0; i < keys.size(); i++)
        for (size_t j = i + 1; j < keys.size(); j++) {
          std::vector<char> in(total, 0);
          for (long a : keys[i])
            for (long b : keys[j]) in[code_of(add(vec_of(a), vec_of(b)))] = 1;
          std::vector<long> sum;
          for (long t = 0; t < total; t++)
            if (in[t]) sum.push_back(t);
          if (long(sum.size()) < total && !ideals.count(sum)) {
            ideals.emplace(sum, -1);
            grew = true;
          }
        }
    }
    // maximal ideals: proper ideals not strictly contained in another
    for (auto& kv : ideals) {
      bool maximal = true;
      for (auto& kv2 : ideals) {
        if (kv2.first.size() <= kv.first.size()) continue;
        if (std::includes(kv2.first.begin(), kv2.first.end(), kv.first.begin(), kv.first.end()))
          maximal = false;
      }
      if (!maximal) continue;
      PrimeIdeal P;
      P.p = p;
      P.kummer = false;
      // lattice: pZ_F plus lifts of the ideal members
      std::vector<QVec> gens{from_int(p)};
      for (long t : kv.first)
        if (t) gens.push_back(vec_of(t));
      P.lattice = ideal_from_gens(gens).h;
      Int nm = ideal_norm(ZIdeal{P.lattice});
      P.norm = nm;
      P.fdeg = 0;
      Int q = 1;
      while (q < nm) {
        q *= p;
        P.fdeg++;
      }
      assert(q == nm);
      // a single generator of the ideal in R gives the second generator
      P.gen2 = zero();
      for (long t : kv.first) {
        if (!t) continue;
        if (ideal_span(t) == kv.first) {
          P.gen2 = vec_of(t);
          break;
        }
      }
      if (is_zero(P.gen2)) throw std::logic_error("no principal generator mod p");
      P.e = ideal_valuation(principal_ideal(from_int(p)), P);
      out.push_back(P);
    }
  }
  int efsum = 0;
  for (auto& P : out) efsum += P.e * P.fdeg;
  if (efsum != n) throw std::logic_error("prime splitting is inconsistent");
  std::sort(out.begin(), out.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
    if (a.fdeg != b.fdeg) return a.fdeg < b.fdeg;
    return a.lattice.a < b.lattice.a;
  });
  return out;
}

std::vector<PrimeIdeal> NumberField::primes_up_to(long bound) const {
  std::vector<PrimeIdeal> out;
  for (long p = 2; p <= bound; p++) {
    if (!is_prime_small(p)) continue;
    for (auto& P : split_prime(p))
      if (P.norm <= bound) out.push_back(P);
  }
  std::sort(out.begin(), out.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    if (a.p != b.p) return a.p < b.p;
    return a.g < b.g;
  });
  return out;
}

QVec NumberField::second_gen_kummer(const PPoly& g) const {
  QVec pc(n, Rat(0));
  for (size_t i = 0; i < g.size() && int(i) < n; i++) pc[i] = Rat(Int(g[i]));
  QVec x = from_power(pc);
  // degree-n factor (inert prime): g == f mod p, so g(w) = (g - f)(w)
  if (int(g.size()) - 1 == n) {
    QVec pc2(n, Rat(0));
    for (int i = 0; i < n; i++) pc2[i] = Rat(Int(g[i]) - poly[i]);
    x = from_power(pc2);
  }
  return x;
}

QVec NumberField::second_gen(const PrimeIdeal& P) const { return P.gen2; }

ZIdeal NumberField::prime_ideal_lattice(const PrimeIdeal& P) const { return ZIdeal{P.lattice}; }

ZIdeal NumberField::ideal_from_gens(const std::vector<QVec>& gens) const {
  ZMat rows(int(gens.size()) * n, n);
  int r = 0;
  for (auto& g : gens) {
    if (!is_integral(g)) throw std::invalid_argument("ideal generator not integral");
    QMat m = rep_matrix(g);
    for (int j = 0; j < n; j++) {
      for (int c = 0; c < n; c++) {
        assert(is_integer(m.at(c, j)));
        rows.at(r, c) = m.at(c, j).get_num();
      }
      r++;
    }
  }
  return ZIdeal{hnf(rows)};
}

ZIdeal NumberField::principal_ideal(const QVec& x) const { return ideal_from_gens({x}); }

ZIdeal NumberField::unit_ideal() const { return principal_ideal(one()); }

ZIdeal NumberField::ideal_mul(const ZIdeal& a, const ZIdeal& b) const {
  if (a.h.nr != n || b.h.nr != n) throw std::invalid_argument("ideal lattice not full rank");
  ZMat rows(n * n, n);
  int r = 0;
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      QVec u(n), v(n);
      for (int c = 0; c < n; c++) {
        u[c] = Rat(a.h.at(i, c));
        v[c] = Rat(b.h.at(j, c));
      }
      QVec w = mul(u, v);
      for (int c = 0; c < n; c++) rows.at(r, c) = w[c].get_num();
      r++;
    }
  return ZIdeal{hnf(rows)};
}

ZIdeal NumberField::ideal_pow(const ZIdeal& a, int k) const {
  ZIdeal r = unit_ideal();
  for (int i = 0; i < k; i++) r = ideal_mul(r, a);
  return r;
}

Int NumberField::ideal_norm(const ZIdeal& a) const {
  if (a.h.nr != n) throw std::invalid_argument("ideal lattice not full rank");
  Int d = 1;
  for (int i = 0; i < n; i++) d *= a.h.at(i, i);
  return d;
}

bool NumberField::ideal_contains(const ZIdeal& a, const QVec& x) const {
  if (!is_integral(x)) return false;
  std::vector<Int> v(n);
  for (int i = 0; i < n; i++) v[i] = x[i].get_num();
  return hnf_contains(a.h, v);
}

int NumberField::valuation(const QVec& x, const PrimeIdeal& P) const {
  if (is_zero(x)) throw std::domain_error("valuation of zero");
  Int den = 1;
  for (auto& c : x) den = lcm(den, c.get_den());
  QVec y = scale(Rat(den), x);
  int vden = 0;
  Int d = den;
  while (d % P.p == 0) {
    d /= P.p;
    vden++;
  }
  ZIdeal L = prime_ideal_lattice(P);
  ZIdeal Pk = L;
  int v = 0;
  while (ideal_contains(Pk, y)) {
    v++;
    Pk = ideal_mul(Pk, L);
  }
  return v - P.e * vden;
}

int NumberField::ideal_valuation(const ZIdeal& a, const PrimeIdeal& P) const {
  ZIdeal L = prime_ideal_lattice(P);
  ZIdeal Pk = L;
  int v = 0;
  while (true) {
    bool inside = true;
    for (int i = 0; i < n && inside; i++) {
      std::vector<Int> row(n);
      for (int c = 0; c < n; c++) row[c] = a.h.at(i, c);
      inside = hnf_contains(Pk.h, row);
    }
    if (!inside) return v;
    v++;
    Pk = ideal_mul(Pk, L);
  }
}

QVec NumberField::uniformizer(const PrimeIdeal& P) const {
  ZIdeal L = prime_ideal_lattice(P);
  ZIdeal L2 = ideal_mul(L, L);
  for (int i = 0; i < n; i++) {
    std::vector<Int> row(n);
    for (int c = 0; c < n; c++) row[c] = L.h.at(i, c);
    if (!hnf_contains(L2.h, row)) {
      QVec x(n);
      for (int c = 0; c < n; c++) x[c] = Rat(row[c]);
      return x;
    }
  }
  throw std::logic_error("prime lattice equals its square");
}

ZIdeal NumberField::ideal_intersect(const ZIdeal& a, const ZIdeal& b) const {
  if (a.h.nr != n || b.h.nr != n) throw std::invalid_argument("ideal lattice not full rank");
  // Rows (x, y) with x*A = y*B give intersection vectors x*A.
  ZMat M(2 * n, n);
  for (int i = 0; i < n; i++)
    for (int c = 0; c < n; c++) {
      M.at(i, c) = a.h.at(i, c);
      M.at(n + i, c) = -b.h.at(i, c);
    }
  auto ker = z_left_kernel(M);
  ZMat rows(int(ker.size()), n);
  for (int r = 0; r < int(ker.size()); r++)
    for (int c = 0; c < n; c++) {
      Int s = 0;
      for (int i = 0; i < n; i++) s += ker[r][i] * a.h.at(i, c);
      rows.at(r, c) = s;
    }
  return ZIdeal{hnf(rows)};
}

std::optional<QVec> NumberField::solve_congruence(const QVec& c, const QVec& y,
                                                  const ZIdeal& L) const {
  if (!is_integral(c) || !is_integral(y)) throw std::invalid_argument("congruence data not integral");
  if (L.h.nr != n) throw std::invalid_argument("ideal lattice not full rank");
  // Want integral x, z with rep(c)*x + L^T*z = y: row solve against the
  // stacked matrix whose first n rows are the columns of rep(c).
  QMat rc = rep_matrix(c);
  ZMat M(2 * n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      M.at(i, j) = rc.at(j, i).get_num();
      M.at(n + i, j) = L.h.at(i, j);
    }
  auto t = hnf_transform(M);
  ZMat H(t.rank, n);
  for (int i = 0; i < t.rank; i++)
    for (int j = 0; j < n; j++) H.at(i, j) = t.H.at(i, j);
  std::vector<Int> target(n);
  for (int i = 0; i < n; i++) target[i] = y[i].get_num();
  auto v = hnf_solve(H, target);
  if (!v) return std::nullopt;
  QVec x(n, Rat(0));
  for (int i = 0; i < n; i++) {
    Int s = 0;
    for (int r = 0; r < t.rank; r++) s += (*v)[r] * t.U.at(r, i);
    x[i] = Rat(s);
  }
  return x;
}

std::pair<QVec, ZIdeal> NumberField::crt(
    const std::vector<std::pair<ZIdeal, QVec>>& conds) const {
  if (conds.empty()) return {zero(), unit_ideal()};
  QVec r = conds[0].second;
  ZIdeal L = conds[0].first;
  for (size_t k = 1; k < conds.size(); k++) {
    const ZIdeal& L2 = conds[k].first;
    QVec diff = sub(conds[k].second, r);
    // Find delta in L with delta == diff (mod L2).
    ZMat M(2 * n, n);
    for (int i = 0; i < n; i++)
      for (int c = 0; c < n; c++) {
        M.at(i, c) = L.h.at(i, c);
        M.at(n + i, c) = L2.h.at(i, c);
      }
    auto t = hnf_transform(M);
    ZMat H(t.rank, n);
    for (int i = 0; i < t.rank; i++)
      for (int j = 0; j < n; j++) H.at(i, j) = t.H.at(i, j);
    std::vector<Int> target(n);
    for (int i = 0; i < n; i++) {
      if (!is_integer(diff[i])) throw std::invalid_argument("crt residue not integral");
      target[i] = diff[i].get_num();
    }
    auto v = hnf_solve(H, target);
    if (!v) throw std::invalid_argument("crt moduli not comaximal");
    // diff = u*L + v*L2; shifting r by the u*L part keeps r mod L and makes
    // it congruent to the new residue mod L2.
    std::vector<Int> w(2 * n, 0);
    for (int i = 0; i < 2 * n; i++) {
      Int s = 0;
      for (int rr = 0; rr < t.rank; rr++) s += (*v)[rr] * t.U.at(rr, i);
      w[i] = s;
    }
    QVec part(n, Rat(0));
    for (int c = 0; c < n; c++) {
      Int s = 0;
      for (int i = 0; i < n; i++) s += w[i] * L.h.at(i, c);
      part[c] = Rat(s);
    }
    r = add(r, part);
    L = ideal_intersect(L, L2);
  }
  for (auto& [Li, ri] : conds)
    if (!ideal_contains(Li, sub(r, ri))) throw std::logic_error("crt verification failed");
  return {r, L};
}

QVec NumberField::local_rep(const QVec& x, const PrimeIdeal& P, int j) const {
  Int den = 1;
  for (auto& c : x) den = lcm(den, c.get_den());
  QVec y = scale(Rat(den), x);
  QVec d = from_int(den);
  int vd = valuation(d, P);
  ZIdeal L = ideal_pow(prime_ideal_lattice(P), vd + j);
  auto z = solve_congruence(d, y, L);
  if (!z) throw std::domain_error("element has a pole at the prime");
  return *z;
}

// ---------------------------------------------------------------------------

Fq NumberField::residue_field(const PrimeIdeal& P) const {
  if (!P.kummer) {
    if (P.fdeg != 1)
      throw std::domain_error("residue field above an index divisor only for degree 1");
    return Fq(P.p.get_si(), PPoly{0, 1});
  }
  return Fq(P.p.get_si(), P.g);
}

PPoly NumberField::reduce_mod(const QVec& x, const PrimeIdeal& P) const {
  if (!P.kummer) {
    if (P.fdeg != 1)
      throw std::domain_error("reduction above an index divisor only for degree 1");
    if (!is_integral(x)) throw std::domain_error("reduction of a non-integral element");
    long pl = P.p.get_si();
    ZIdeal L{P.lattice};
    for (long r = 0; r < pl; r++)
      if (ideal_contains(L, sub(x, from_int(r)))) return r ? PPoly{r} : PPoly{};
    throw std::logic_error("element has no residue mod P");
  }
  QVec pc = power_coords(x);
  int64_t p = P.p.get_si();
  PolyModP zp(p);
  PPoly r(pc.size());
  for (size_t i = 0; i < pc.size(); i++) {
    Int num = pc[i].get_num() % p, den = pc[i].get_den() % p;
    if (den == 0) throw std::domain_error("residue denominator divisible by p");
    int64_t dn = den.get_si();
    if (dn < 0) dn += p;
    int64_t nu = num.get_si() % p;
    if (nu < 0) nu += p;
    r[i] = (nu * zp.inv(dn)) % p;
  }
  return zp.mod(zp.trim(r), P.g);
}

QVec NumberField::lift_residue(const PPoly& a, const PrimeIdeal& P) const {
  QVec pc(n, Rat(0));
  for (size_t i = 0; i < a.size(); i++) pc[i] = Rat(a[i]);
  return from_power(pc);
}

int NumberField::legendre(const QVec& x, const PrimeIdeal& P) const {
  return residue_field(P).legendre(reduce_mod(x, P));
}

// ---------------------------------------------------------------------------

std::optional<QVec> NumberField::unit_with_signs(const std::vector<int>& target) const {
  std::vector<int> b(n);
  for (int k = 0; k < n; k++) b[k] = target[k] < 0 ? 1 : 0;
  auto eps = f2_solve(unit_sign_bits_, b);
  if (!eps) return std::nullopt;
  QVec u = one();
  for (size_t j = 0; j < units.size(); j++)
    if ((*eps)[j]) u = mul(u, units[j]);
  if ((*eps)[units.size()]) u = neg(u);
  return u;
}

QVec NumberField::totally_positive_generator(const ZIdeal& I) const {
  Int N = ideal_norm(I);
  // Gram matrix of the trace form on the lattice basis
  std::vector<QVec> w(n);
  for (int i = 0; i < n; i++) {
    w[i] = QVec(n);
    for (int c = 0; c < n; c++) w[i][c] = Rat(I.h.at(i, c));
  }
  DMat gram(n, std::vector<double>(n));
  for (int i = 0; i < n; i++)
    for (int j = 0; j <= i; j++) {
      Rat t = trace(mul(w[i], w[j]));
      gram[i][j] = gram[j][i] = to_double(t);
    }
  auto U = lll_reduce_gram(gram);
  std::vector<QVec> v(n, zero());
  for (int i = 0; i < n; i++)
    for (int r = 0; r < n; r++)
      if (U[i][r] != 0) v[i] = add(v[i], scale(Rat(U[i][r]), w[r]));

  double radius = n * std::pow(to_double(Rat(N * N)), 1.0 / n) * 1.5;
  for (int i = 0; i < n; i++) radius = std::max(radius, gram[i][i] * 1.01);

  for (int attempt = 0; attempt <= 8; attempt++, radius *= 2) {
    std::optional<QVec> found;
    enumerate_short_vectors(gram, radius, [&](const std::vector<long>& c, double) {
      if (found) return;
      QVec x = zero();
      for (int i = 0; i < n; i++)
        if (c[i]) x = add(x, scale(Rat(Int(c[i])), v[i]));
      Rat nx = norm(x);
      if (nx != N && nx != -N) return;
      auto sv = sign_vector(x);
      auto u = unit_with_signs(sv);  // unit with the SAME signs, so u*x >> 0
      if (!u) return;
      QVec cand = mul(*u, x);
      if (is_totally_positive(cand) && principal_ideal(cand) == I) found = cand;
    });
    if (found) return *found;
  }
  throw GeneratorNotFound("no totally positive generator within enumeration bound");
}

// ---------------------------------------------------------------------------

ResidueRing::ResidueRing(const NumberField& field, ZIdeal lat) : F(&field), L(std::move(lat)) {
  if (L.h.nr != F->n) throw std::invalid_argument("residue ring lattice not full rank");
}

QVec ResidueRing::reduce(const QVec& x) const {
  if (!F->is_integral(x)) throw std::domain_error("residue reduction of a non-integral element");
  int n = F->n;
  std::vector<Int> v(n);
  for (int i = 0; i < n; i++) v[i] = x[i].get_num();
  // HNF rows are upper triangular with pivot i on row i; ascending passes
  // leave already-normalized coordinates untouched.
  for (int i = 0; i < n; i++) {
    Int q = floor_div(v[i], L.h.at(i, i));
    if (q != 0)
      for (int c = i; c < n; c++) v[c] -= q * L.h.at(i, c);
  }
  QVec r(n);
  for (int i = 0; i < n; i++) r[i] = Rat(v[i]);
  return r;
}

std::optional<QVec> ResidueRing::inv(const QVec& x) const {
  auto s = F->solve_congruence(reduce(x), F->one(), L);
  if (!s) return std::nullopt;
  return reduce(*s);
}

std::vector<QVec> ResidueRing::elements() const {
  int n = F->n;
  Int count = size();
  if (count > 2000000) throw std::domain_error("residue ring too large to enumerate");
  std::vector<QVec> out;
  out.reserve(count.get_ui());
  std::vector<Int> digit(n, 0);
  while (true) {
    QVec x(n);
    for (int i = 0; i < n; i++) x[i] = Rat(digit[i]);
    out.push_back(reduce(x));
    int i = 0;
    while (i < n) {
      digit[i] += 1;
      if (digit[i] < L.h.at(i, i)) break;
      digit[i] = 0;
      i++;
    }
    if (i == n) break;
  }
  return out;
}

}  // namespace hmf
