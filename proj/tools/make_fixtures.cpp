// Generates the number-field fixture files in data/: defining polynomial,
// integral basis, discriminant, and a verified pair of fundamental units for
// each of the three totally real cubic fields used by the test suite and CLI.
//
// Units are found by enumerating short vectors of Z_F under the trace form,
// keeping those of norm +-1, reducing the generated logarithmic lattice with
// exact verification (every enumerated unit must reduce to +-1 against the
// chosen pair), and saturating at k = 2, 3 by exact k-th-root tests.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include <json.hpp>

#include "hmf/lll.hpp"
#include "hmf/numberfield.hpp"

using namespace hmf;
using nlohmann::json;

namespace {

double lv0(const NumberField& F, const QVec& u, int k) {
  return std::log(std::fabs(F.embed(u, k)));
}

bool is_pm_one(const NumberField& F, const QVec& u) {
  return u == F.one() || u == F.neg(F.one());
}

// Collect units |N(u)| = 1 with trace-form length <= radius.
std::vector<QVec> enumerate_units(const NumberField& F, double radius) {
  int n = F.n;
  DMat gram(n, std::vector<double>(n));
  std::vector<QVec> basis(n, F.zero());
  for (int i = 0; i < n; i++) basis[i][i] = 1;
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) gram[i][j] = to_double(F.trace(F.mul(basis[i], basis[j])));
  auto U = lll_reduce_gram(gram);
  std::vector<QVec> red(n, F.zero());
  for (int i = 0; i < n; i++)
    for (int r = 0; r < n; r++)
      if (U[i][r] != 0) red[i] = F.add(red[i], F.scale(Rat(U[i][r]), basis[r]));
  std::vector<QVec> out;
  enumerate_short_vectors(gram, radius, [&](const std::vector<long>& c, double) {
    QVec x = F.zero();
    for (int i = 0; i < n; i++)
      if (c[i]) x = F.add(x, F.scale(Rat(Int(c[i])), red[i]));
    Rat nx = F.norm(x);
    if ((nx == 1 || nx == -1) && !is_pm_one(F, x)) out.push_back(x);
  });
  return out;
}

// Exact test: does +-(u) have a k-th root in Z_F? If so return the root.
std::optional<QVec> kth_root(const NumberField& F, const QVec& u, int k) {
  int n = F.n;
  std::vector<double> emb(n);
  for (int i = 0; i < n; i++) emb[i] = F.embed(u, i);
  int combos = (k % 2 == 0) ? (1 << n) : 1;
  for (int sign_u = 0; sign_u < 2; sign_u++) {
    QVec target = sign_u ? F.neg(u) : u;
    std::vector<double> te(n);
    bool ok = true;
    for (int i = 0; i < n; i++) {
      te[i] = sign_u ? -emb[i] : emb[i];
      if (k % 2 == 0 && te[i] < 0) ok = false;
    }
    if (!ok) continue;
    for (int mask = 0; mask < combos; mask++) {
      // candidate root embeddings
      std::vector<double> re(n);
      for (int i = 0; i < n; i++) {
        double r = std::pow(std::fabs(te[i]), 1.0 / k);
        if (k % 2 != 0 && te[i] < 0) r = -r;
        if (k % 2 == 0 && (mask >> i & 1)) r = -r;
        re[i] = r;
      }
      // solve for integer coords over the integral basis from embeddings
      int sz = n;
      std::vector<std::vector<double>> M(sz, std::vector<double>(sz + 1));
      for (int i = 0; i < sz; i++) {
        for (int j = 0; j < sz; j++) {
          QVec bj = F.zero();
          bj[j] = 1;
          M[i][j] = F.embed(bj, i);
        }
        M[i][sz] = re[i];
      }
      for (int c = 0; c < sz; c++) {
        int piv = c;
        for (int r = c + 1; r < sz; r++)
          if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
        std::swap(M[c], M[piv]);
        for (int r = 0; r < sz; r++) {
          if (r == c) continue;
          double f = M[r][c] / M[c][c];
          for (int j = c; j <= sz; j++) M[r][j] -= f * M[c][j];
        }
      }
      QVec cand = F.zero();
      bool sane = true;
      for (int i = 0; i < sz; i++) {
        double v = M[i][sz] / M[i][i];
        double r = std::round(v);
        if (std::fabs(v - r) > 0.05 || std::fabs(r) > 1e15) {
          sane = false;
          break;
        }
        cand[i] = Rat(Int(long(r)));
      }
      if (!sane || F.is_zero(cand)) continue;
      if (F.pow(cand, k) == target) return cand;
    }
  }
  return std::nullopt;
}

struct UnitPair {
  QVec u1, u2;
};

UnitPair fundamental_units(const NumberField& F) {
  double radius = 40;
  for (int attempt = 0; attempt < 10; attempt++, radius *= 2.5) {
    auto pool = enumerate_units(F, radius);
    if (pool.size() < 4) continue;
    // pick the two independent units minimizing |det| of the log matrix
    auto det2 = [&](const QVec& a, const QVec& b) {
      return lv0(F, a, 0) * lv0(F, b, 1) - lv0(F, a, 1) * lv0(F, b, 0);
    };
    int bi = -1, bj = -1;
    double best = 1e18;
    for (size_t i = 0; i < pool.size(); i++)
      for (size_t j = i + 1; j < pool.size(); j++) {
        double d = std::fabs(det2(pool[i], pool[j]));
        if (d > 1e-6 && d < best) {
          best = d;
          bi = int(i);
          bj = int(j);
        }
      }
    if (bi < 0) continue;
    QVec u1 = pool[bi], u2 = pool[bj];
    // saturate at k = 2, 3: a k-th root of any u1^a u2^b is a new unit;
    // grow the pool with it and re-pick the minimal independent pair
    bool changed = true;
    while (changed) {
      changed = false;
      for (int k : {2, 3}) {
        for (int a = 0; a < k && !changed; a++)
          for (int b = 0; b < k && !changed; b++) {
            if (a == 0 && b == 0) continue;
            QVec w = F.mul(F.pow(u1, a), F.pow(u2, b));
            auto r = kth_root(F, w, k);
            if (r && !is_pm_one(F, *r)) {
              bool known = false;
              for (auto& q : pool)
                if (q == *r || q == F.neg(*r)) known = true;
              if (known) continue;
              pool.push_back(*r);
              changed = true;
            }
          }
        if (changed) break;
      }
      if (changed) {
        best = 1e18;
        bi = bj = -1;
        for (size_t i = 0; i < pool.size(); i++)
          for (size_t j = i + 1; j < pool.size(); j++) {
            double d = std::fabs(det2(pool[i], pool[j]));
            if (d > 1e-6 && d < best) {
              best = d;
              bi = int(i);
              bj = int(j);
            }
          }
        u1 = pool[bi];
        u2 = pool[bj];
      }
    }
    // every enumerated unit must reduce to +-1 against (u1, u2), exactly
    bool all_ok = true;
    for (auto& w : pool) {
      double a0 = lv0(F, w, 0), a1 = lv0(F, w, 1);
      double d = det2(u1, u2);
      double alpha = (a0 * lv0(F, u2, 1) - a1 * lv0(F, u2, 0)) / d;
      double beta = (lv0(F, u1, 0) * a1 - lv0(F, u1, 1) * a0) / d;
      long a = std::lround(alpha), b = std::lround(beta);
      QVec r = F.mul(w, F.pow(u1, -a));
      r = F.mul(r, F.pow(u2, -b));
      if (!is_pm_one(F, r)) {
        all_ok = false;
        break;
      }
    }
    if (!all_ok) continue;  // inconsistent pair; retry at a larger radius
    return {u1, u2};
  }
  throw std::runtime_error("fundamental unit search failed");
}

json rat_json(const Rat& r) { return rat_str(r); }

json vec_json(const QVec& v) {
  json a = json::array();
  for (auto& c : v) a.push_back(rat_json(c));
  return a;
}

void write_fixture(const std::string& path, const ZPoly& poly, const QMat& basis,
                   const Int& disc, const std::vector<QVec>& units) {
  json j;
  j["poly"] = json::array();
  for (auto& c : poly) j["poly"].push_back(c.get_str());
  j["basis"] = json::array();
  for (int i = 0; i < basis.nr; i++) {
    QVec row(basis.nc);
    for (int c = 0; c < basis.nc; c++) row[c] = basis.at(i, c);
    j["basis"].push_back(vec_json(row));
  }
  j["disc"] = disc.get_str();
  j["units"] = json::array();
  for (auto& u : units) j["units"].push_back(vec_json(u));
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
}

QMat identity_basis(int n) { return QMat::identity(n); }

// For the square-discriminant field: x^3 - x^2 - 10x + 8 has polynomial
// discriminant 4 * 961, and the field has no power integral basis at all
// (2 splits completely, so 2 divides every index). Enlarge Z[w] by a
// half-integral element to get the maximal order and freeze that basis.
void make_961() {
  ZPoly f{Int(8), Int(-10), Int(-1), Int(1)};
  NumberField F0(f, QMat::identity(3), zpoly_discriminant(f), {});  // disc(f) as "d_F": index 1 view

  // find x = (a0 + a1 w + a2 w^2)/2 such that Z[w] + Zx is the maximal order
  std::optional<NumberField> Fm;
  for (int a0 = 0; a0 < 2 && !Fm; a0++)
    for (int a1 = 0; a1 < 2 && !Fm; a1++)
      for (int a2 = 0; a2 < 2 && !Fm; a2++) {
        if (!a0 && !a1 && !a2) continue;
        QVec x{Rat(a0, 2), Rat(a1, 2), Rat(a2, 2)};
        auto cp = charpoly(F0.rep_matrix(x));
        bool integral = true;
        for (auto& c : cp)
          if (!is_integer(c)) integral = false;
        if (!integral) continue;
        // basis over the power basis: HNF of {1, w, w^2, x}, denominator 2
        ZMat rows(4, 3);
        for (int i = 0; i < 3; i++) rows.at(i, i) = 2;
        for (int c = 0; c < 3; c++) rows.at(3, c) = Rat(x[c] * 2).get_num();
        ZMat h = hnf(rows);
        QMat basis(3, 3);
        for (int i = 0; i < 3; i++)
          for (int c = 0; c < 3; c++) {
            basis.at(i, c) = Rat(h.at(i, c), 2);
            basis.at(i, c).canonicalize();  // mpq_class(n, d) is not normalized
          }
        try {
          Fm.emplace(f, basis, Int(961), std::vector<QVec>{});
          std::cout << "961: order enlarged by (" << poly_str(x, "w") << ")\n";
        } catch (const std::invalid_argument&) {
          // not a ring or wrong discriminant; keep looking
        }
      }
  if (!Fm) throw std::runtime_error("no index-2 enlargement found");
  NumberField& F = *Fm;
  auto up = fundamental_units(F);
  std::cout << "disc 961: u1 = " << F.str(up.u1) << " (N=" << F.norm(up.u1)
            << "), u2 = " << F.str(up.u2) << " (N=" << F.norm(up.u2) << ")\n";
  write_fixture("data/field_961.json", f, F.basis, Int(961), {up.u1, up.u2});
}

}  // namespace

int main() {
  struct Simple {
    ZPoly poly;
    long disc;
    const char* path;
  };
  std::vector<Simple> fields{
      {{Int(12), Int(-9), Int(-1), Int(1)}, 1101, "data/field_1101.json"},
      {{Int(-11), Int(-12), Int(-1), Int(1)}, 1369, "data/field_1369.json"},
  };
  for (auto& fd : fields) {
    NumberField F(fd.poly, QMat::identity(3), Int(fd.disc), {});
    auto up = fundamental_units(F);
    std::cout << "disc " << fd.disc << ": u1 = " << F.str(up.u1) << " (N=" << F.norm(up.u1)
              << "), u2 = " << F.str(up.u2) << " (N=" << F.norm(up.u2) << ")\n";
    write_fixture(fd.path, fd.poly, QMat::identity(3), Int(fd.disc), {up.u1, up.u2});
  }

  make_961();
  return 0;
}
