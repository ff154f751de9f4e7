#include "hmf/poly.hpp"

#include <cassert>
#include <random>
#include <stdexcept>

#include "hmf/linalg.hpp"

namespace hmf {

ZPoly zpoly_trim(ZPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < b.size(); j++) c[i + j] += a[i] * b[j];
  return zpoly_trim(c);
}

ZPoly zpoly_derivative(const ZPoly& p) {
  ZPoly d;
  for (size_t i = 1; i < p.size(); i++) d.push_back(Int(long(i)) * p[i]);
  return zpoly_trim(d);
}

Int zpoly_eval(const ZPoly& p, const Int& x) {
  Int v = 0;
  for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
  return v;
}

Int zpoly_resultant(const ZPoly& a, const ZPoly& b) {
  int m = int(a.size()) - 1, n = int(b.size()) - 1;
  if (m < 0 || n < 0) return 0;
  if (m == 0) {
    Int r = 1;
    for (int i = 0; i < n; i++) r *= a[0];
    return r;
  }
  if (n == 0) {
    Int r = 1;
    for (int i = 0; i < m; i++) r *= b[0];
    return r;
  }
  int N = m + n;
  ZMat s(N, N);
  for (int i = 0; i < n; i++)
    for (int j = 0; j <= m; j++) s.at(i, i + j) = a[m - j];
  for (int i = 0; i < m; i++)
    for (int j = 0; j <= n; j++) s.at(n + i, i + j) = b[n - j];
  return zmat_det(s);
}

Int zpoly_discriminant(const ZPoly& p) {
  int n = int(p.size()) - 1;
  if (n < 1) throw std::invalid_argument("discriminant of constant");
  Int res = zpoly_resultant(p, zpoly_derivative(p));
  Int d;
  mpz_divexact(d.get_mpz_t(), res.get_mpz_t(), p.back().get_mpz_t());
  if ((Int(n) * (n - 1) / 2) % 2 != 0) d = -d;
  return d;
}

// ---------------------------------------------------------------------------

static int64_t mod_pos(int64_t x, int64_t p) {
  int64_t r = x % p;
  return r < 0 ? r + p : r;
}

PPoly PolyModP::trim(PPoly a) const {
  while (!a.empty() && a.back() % p == 0) a.pop_back();
  for (auto& c : a) c = mod_pos(c, p);
  return a;
}

PPoly PolyModP::reduce(const ZPoly& a) const {
  PPoly r(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    Int m = a[i] % p;
    r[i] = mod_pos(m.get_si(), p);
  }
  return trim(r);
}

PPoly PolyModP::add(const PPoly& a, const PPoly& b) const {
  PPoly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); i++) c[i] += a[i];
  for (size_t i = 0; i < b.size(); i++) c[i] += b[i];
  return trim(c);
}

PPoly PolyModP::sub(const PPoly& a, const PPoly& b) const {
  PPoly c(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); i++) c[i] += a[i];
  for (size_t i = 0; i < b.size(); i++) c[i] -= b[i];
  return trim(c);
}

PPoly PolyModP::mul(const PPoly& a, const PPoly& b) const {
  if (a.empty() || b.empty()) return {};
  PPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < b.size(); j++) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return trim(c);
}

int64_t PolyModP::inv(int64_t x) const {
  x = mod_pos(x, p);
  if (x == 0) throw std::domain_error("inverse of zero mod p");
  // extended Euclid
  int64_t a = x, b = p, u = 1, v = 0;
  while (b) {
    int64_t q = a / b;
    a -= q * b;
    std::swap(a, b);
    u -= q * v;
    std::swap(u, v);
  }
  assert(a == 1);
  return mod_pos(u, p);
}

void PolyModP::divmod(const PPoly& a, const PPoly& b, PPoly& q, PPoly& r) const {
  if (b.empty()) throw std::domain_error("division by zero polynomial");
  r = trim(a);
  q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, 0);
  int64_t lcinv = inv(b.back());
  while (r.size() >= b.size()) {
    int64_t c = (r.back() * lcinv) % p;
    size_t shift = r.size() - b.size();
    q[shift] = c;
    for (size_t i = 0; i < b.size(); i++) r[shift + i] = mod_pos(r[shift + i] - c * b[i], p);
    while (!r.empty() && r.back() == 0) r.pop_back();
  }
  q = trim(q);
}

PPoly PolyModP::mod(const PPoly& a, const PPoly& b) const {
  PPoly q, r;
  divmod(a, b, q, r);
  return r;
}

PPoly PolyModP::gcd(PPoly a, PPoly b) const {
  a = trim(a);
  b = trim(b);
  while (!b.empty()) {
    PPoly r = mod(a, b);
    a = b;
    b = r;
  }
  return monic(a);
}

PPoly PolyModP::monic(PPoly a) const {
  a = trim(a);
  if (a.empty()) return a;
  int64_t c = inv(a.back());
  for (auto& x : a) x = (x * c) % p;
  return a;
}

PPoly PolyModP::derivative(const PPoly& a) const {
  PPoly d;
  for (size_t i = 1; i < a.size(); i++) d.push_back((int64_t(i) % p) * a[i] % p);
  return trim(d);
}

PPoly PolyModP::pow_mod(PPoly base, Int e, const PPoly& m) const {
  PPoly r{1};
  base = mod(base, m);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mod(mul(r, base), m);
    base = mod(mul(base, base), m);
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Equal-degree splitting (Cantor-Zassenhaus), f monic squarefree product of
// irreducibles of degree d.
void equal_degree(const PolyModP& zp, const PPoly& f, int d, std::vector<PPoly>& out,
                  std::mt19937_64& rng) {
  int n = int(f.size()) - 1;
  if (n == d) {
    out.push_back(f);
    return;
  }
  PPoly factor;
  while (factor.empty()) {
    PPoly a(n);
    for (int i = 0; i < n; i++) a[i] = int64_t(rng() % uint64_t(zp.p));
    a = zp.trim(a);
    if (a.size() <= 1) continue;
    PPoly g = zp.gcd(a, f);
    if (g.size() > 1 && g.size() < f.size()) {
      factor = g;
      break;
    }
    PPoly b;
    if (zp.p == 2) {
      // trace map: a + a^2 + a^4 + ... + a^{2^{d-1}}
      b = a;
      PPoly t = a;
      for (int i = 1; i < d; i++) {
        t = zp.mod(zp.mul(t, t), f);
        b = zp.add(b, t);
      }
    } else {
      Int e = 1;
      for (int i = 0; i < d; i++) e *= zp.p;
      e = (e - 1) / 2;
      b = zp.pow_mod(a, e, f);
      b = zp.sub(b, PPoly{1});
    }
    PPoly g2 = zp.gcd(b, f);
    if (g2.size() > 1 && g2.size() < f.size()) factor = g2;
  }
  PPoly q, r;
  zp.divmod(f, factor, q, r);
  assert(r.empty());
  equal_degree(zp, factor, d, out, rng);
  equal_degree(zp, zp.monic(q), d, out, rng);
}

void factor_squarefree(const PolyModP& zp, PPoly f, std::vector<PPoly>& out,
                       std::mt19937_64& rng) {
  // distinct-degree: gcd(f, x^{p^d} - x)
  PPoly x{0, 1};
  PPoly h = zp.mod(x, f);
  int d = 0;
  while (int(f.size()) - 1 > 0) {
    d++;
    if (2 * d > int(f.size()) - 1) {
      out.push_back(f);  // remaining factor is irreducible
      return;
    }
    h = zp.pow_mod(h, Int(zp.p), f);
    PPoly g = zp.gcd(zp.sub(h, x), f);
    if (g.size() > 1) {
      equal_degree(zp, g, d, out, rng);
      PPoly q, r;
      zp.divmod(f, g, q, r);
      f = zp.monic(q);
      h = zp.mod(h, f);
    }
  }
}

}  // namespace

std::vector<PFactor> factor_mod_p(const ZPoly& f0, int64_t p) {
  PolyModP zp(p);
  PPoly f = zp.monic(zp.reduce(f0));
  if (f.size() <= 1) throw std::invalid_argument("degree drops mod p");
  std::mt19937_64 rng(0x5eed1234u ^ uint64_t(p));
  std::vector<PFactor> result;

  // squarefree decomposition via repeated gcd with derivative
  while (f.size() > 1) {
    PPoly df = zp.derivative(f);
    if (df.empty()) {
      // f = g(x^p); replace f by g (p-th roots of coefficients = identity on F_p)
      PPoly g((f.size() - 1) / p + 1, 0);
      for (size_t i = 0; i < f.size(); i += p) g[i / p] = f[i];
      f = zp.trim(g);
      // factors of g appear with multiplicity p in original; handle by
      // recursing and scaling multiplicities
      auto sub = factor_mod_p(ZPoly(f.begin(), f.end()), p);
      for (auto& s : sub) {
        bool found = false;
        for (auto& r : result)
          if (r.poly == s.poly) {
            r.mult += s.mult * int(p);
            found = true;
          }
        if (!found) result.push_back({s.poly, s.mult * int(p)});
      }
      return result;
    }
    PPoly g = zp.gcd(f, df);
    PPoly sqfree;
    {
      PPoly q, r;
      zp.divmod(f, g, q, r);
      assert(r.empty());
      sqfree = zp.monic(q);
    }
    std::vector<PPoly> irr;
    factor_squarefree(zp, sqfree, irr, rng);
    for (auto& u : irr) {
      // multiplicity = exact power of u dividing f
      int m = 0;
      PPoly rem = f;
      while (true) {
        PPoly q, r;
        zp.divmod(rem, u, q, r);
        if (!r.empty()) break;
        rem = q;
        m++;
      }
      bool found = false;
      for (auto& r : result)
        if (r.poly == u) {
          r.mult += m;
          found = true;
        }
      if (!found) result.push_back({u, m});
    }
    // strip all found factors and loop (handles leftover repeated part)
    PPoly stripped = f;
    for (auto& u : irr) {
      while (true) {
        PPoly q, r;
        zp.divmod(stripped, u, q, r);
        if (!r.empty()) break;
        stripped = q;
      }
    }
    f = zp.monic(stripped);
  }
  return result;
}

// ---------------------------------------------------------------------------

Fq::Fq(int64_t p_, PPoly g_) : p(p_), g(std::move(g_)), zp(p_) {
  g = zp.monic(g);
  d = int(g.size()) - 1;
  if (d < 1) throw std::invalid_argument("residue field modulus must be nonconstant");
  q = 1;
  for (int i = 0; i < d; i++) q *= p;
}

PPoly Fq::from_int(const Int& n) const {
  Int m = n % p;
  int64_t v = mod_pos(m.get_si(), p);
  return v ? PPoly{v} : PPoly{};
}

PPoly Fq::neg(const PPoly& a) const { return zp.sub({}, a); }

PPoly Fq::mul(const PPoly& a, const PPoly& b) const { return zp.mod(zp.mul(a, b), g); }

PPoly Fq::inv(const PPoly& a) const {
  if (a.empty()) throw std::domain_error("inverse of zero in residue field");
  return pow(a, q - 2);
}

PPoly Fq::pow(PPoly a, Int e) const {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  return zp.pow_mod(a, e, g);
}

int Fq::legendre(const PPoly& a) const {
  if (a.empty()) return 0;
  if (p == 2) return 1;  // every element of a field of characteristic 2 is a square
  PPoly r = pow(a, (q - 1) / 2);
  if (r == one()) return 1;
  return -1;
}

std::vector<PPoly> Fq::elements() const {
  std::vector<PPoly> out;
  std::vector<int64_t> c(d, 0);
  while (true) {
    PPoly e(c.begin(), c.end());
    out.push_back(zp.trim(e));
    int i = 0;
    while (i < d && ++c[i] == p) c[i++] = 0;
    if (i == d) break;
  }
  return out;
}

}  // namespace hmf
