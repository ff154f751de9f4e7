#include "hmf/lll.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace hmf {

namespace {

// Gram-Schmidt data for a Gram matrix: mu coefficients and squared norms B.
struct Gso {
  DMat mu;
  std::vector<double> B;
};

Gso gso_from_gram(const DMat& g) {
  int n = int(g.size());
  Gso s;
  s.mu.assign(n, std::vector<double>(n, 0.0));
  s.B.assign(n, 0.0);
  // r[i][j] = <b_i, b*_j>
  DMat r(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; i++) {
    for (int j = 0; j <= i; j++) {
      double v = g[i][j];
      for (int k = 0; k < j; k++) v -= s.mu[j][k] * r[i][k];
      r[i][j] = v;
      if (j < i) s.mu[i][j] = v / s.B[j];
    }
    s.B[i] = r[i][i];
    s.mu[i][i] = 1.0;
  }
  return s;
}

void gram_swap(DMat& g, std::vector<std::vector<Int>>& U, int i, int k) {
  std::swap(g[i], g[k]);
  int n = int(g.size());
  for (int j = 0; j < n; j++) std::swap(g[j][i], g[j][k]);
  std::swap(U[i], U[k]);
}

}  // namespace

std::vector<std::vector<Int>> lll_reduce_gram(DMat& gram, double delta) {
  int n = int(gram.size());
  std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; i++) U[i][i] = 1;
  if (n <= 1) return U;

  // Keep the Gram matrix in sync with U by recomputing against a saved copy;
  // exactness of U is what matters, the floats only steer the reduction.
  DMat g0 = gram;
  auto recompute = [&]() {
    for (int i = 0; i < n; i++)
      for (int j = 0; j <= i; j++) {
        double v = 0;
        for (int a = 0; a < n; a++) {
          double ua = U[i][a].get_d();
          if (ua == 0) continue;
          for (int b = 0; b < n; b++) {
            double ub = U[j][b].get_d();
            if (ub != 0) v += ua * ub * g0[a][b];
          }
        }
        gram[i][j] = gram[j][i] = v;
      }
  };

  int k = 1;
  int iters = 0;
  const int max_iters = 20000;
  Gso s = gso_from_gram(gram);
  while (k < n && iters++ < max_iters) {
    // Size reduction of b_k against b_{k-1},...,b_0.
    bool changed = false;
    for (int j = k - 1; j >= 0; j--) {
      double m = s.mu[k][j];
      if (std::fabs(m) > 0.5) {
        long q = std::lround(m);
        for (size_t t = 0; t < U[k].size(); t++) U[k][t] -= q * U[j][t];
        changed = true;
      }
    }
    if (changed) {
      recompute();
      s = gso_from_gram(gram);
    }
    if (s.B[k] >= (delta - s.mu[k][k - 1] * s.mu[k][k - 1]) * s.B[k - 1]) {
      k++;
    } else {
      gram_swap(gram, U, k, k - 1);
      recompute();
      s = gso_from_gram(gram);
      k = std::max(k - 1, 1);
    }
  }
  recompute();
  return U;
}

std::vector<std::vector<Int>> lll_reduce_gram_exact(std::vector<std::vector<Int>>& gram) {
  int n = int(gram.size());
  std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; i++) U[i][i] = 1;
  if (n <= 1) return U;
  const Rat delta(99, 100);

  std::vector<std::vector<Rat>> mu(n, std::vector<Rat>(n, Rat(0)));
  std::vector<Rat> B(n, Rat(0));
  auto gso = [&]() {
    // r[i][j] = <b_i, b*_j>
    std::vector<std::vector<Rat>> r(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; i++) {
      for (int j = 0; j <= i; j++) {
        Rat v(gram[i][j]);
        for (int k = 0; k < j; k++) v -= mu[j][k] * r[i][k];
        r[i][j] = v;
        if (j < i) mu[i][j] = v / B[j];
      }
      B[i] = r[i][i];
      assert(B[i] > 0);
    }
  };
  // b_k -= q * b_j, applied to the Gram matrix and the transform.
  auto rowop = [&](int k, int j, const Int& q) {
    Int dkk = gram[k][k] - 2 * q * gram[k][j] + q * q * gram[j][j];
    for (int t = 0; t < n; t++)
      if (t != k) {
        gram[k][t] -= q * gram[j][t];
        gram[t][k] = gram[k][t];
      }
    gram[k][k] = dkk;
    for (int t = 0; t < n; t++) U[k][t] -= q * U[j][t];
  };

  gso();
  int k = 1;
  long iters = 0;
  while (k < n) {
    assert(iters++ < 100000);
    bool changed = false;
    for (int j = k - 1; j >= 0; j--) {
      if (2 * abs(mu[k][j].get_num()) <= mu[k][j].get_den()) continue;
      Int q = round_rat(mu[k][j]);
      rowop(k, j, q);
      // Keep row k of mu current for the remaining j; gso() refreshes the rest.
      for (int t = 0; t < j; t++) mu[k][t] -= Rat(q) * mu[j][t];
      mu[k][j] -= Rat(q);
      changed = true;
    }
    if (changed) gso();
    Rat m = mu[k][k - 1];
    if (B[k] >= (delta - m * m) * B[k - 1]) {
      k++;
    } else {
      std::swap(gram[k], gram[k - 1]);
      for (int t = 0; t < n; t++) std::swap(gram[t][k], gram[t][k - 1]);
      std::swap(U[k], U[k - 1]);
      gso();
      k = std::max(k - 1, 1);
    }
  }
  return U;
}

void enumerate_short_vectors(const DMat& gram, double radius,
                             const std::function<void(const std::vector<long>&, double)>& visit) {
  int n = int(gram.size());
  // Cholesky: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2.
  DMat q(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) q[i][j] = gram[i][j];
  for (int i = 0; i < n; i++) {
    for (int j = i + 1; j < n; j++) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (int k = i + 1; k < n; k++)
      for (int l = k; l < n; l++) q[k][l] -= q[k][i] * q[i][l];
  }

  std::vector<long> x(n, 0);
  std::vector<double> partial(n + 1, 0.0);  // accumulated value from levels > i
  std::vector<double> center(n, 0.0);

  // Slack guards against rounding at the boundary.
  double bound = radius * (1.0 + 1e-9) + 1e-9;

  std::function<void(int)> rec = [&](int i) {
    if (i < 0) {
      bool nonzero = false;
      for (long v : x)
        if (v) nonzero = true;
      if (!nonzero) return;
      // Report one representative per +-pair: first nonzero coordinate > 0.
      for (long v : x) {
        if (v > 0) break;
        if (v < 0) return;
      }
      visit(x, partial[0]);
      return;
    }
    double c = 0.0;
    for (int j = i + 1; j < n; j++) c += q[i][j] * x[j];
    center[i] = c;
    double room = bound - partial[i + 1];
    if (room < 0) return;
    double halfwidth = std::sqrt(room / q[i][i]);
    long lo = long(std::ceil(-c - halfwidth - 1e-12));
    long hi = long(std::floor(-c + halfwidth + 1e-12));
    for (long v = lo; v <= hi; v++) {
      x[i] = v;
      double t = v + c;
      partial[i] = partial[i + 1] + q[i][i] * t * t;
      if (partial[i] <= bound) rec(i - 1);
    }
    x[i] = 0;
  };
  rec(n - 1);
}

}  // namespace hmf
