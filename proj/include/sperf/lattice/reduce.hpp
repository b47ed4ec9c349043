#pragma once

#include "sperf/lattice/lattice.hpp"

namespace sperf {

struct LllResult {
  IMat gram;  // reduced gram
  IMat t;     // unimodular, t * input * t^T = gram
};

// Integral LLL (delta = 3/4) acting on a positive-definite integer Gram matrix.
// All quantities stay integral: d_i are Gram determinants, lambda the scaled
// Gram-Schmidt coefficients.
inline LllResult lll_gram(const IMat& g0) {
  const std::size_t n = g0.rows;
  LllResult res{g0, IMat::identity(n)};
  if (n <= 1) return res;
  IMat& g = res.gram;
  IMat& h = res.t;
  // 1-based bookkeeping
  std::vector<Int> d(n + 1);
  std::vector<std::vector<Int>> lam(n + 1, std::vector<Int>(n + 1));
  auto G = [&](std::size_t i, std::size_t j) -> Int& { return g(i - 1, j - 1); };

  auto sub_row = [&](std::size_t k, std::size_t l, const Int& q) {
    // b_k <- b_k - q b_l
    for (std::size_t j = 0; j < n; ++j) g(k - 1, j) -= q * g(l - 1, j);
    for (std::size_t j = 0; j < n; ++j) g(j, k - 1) -= q * g(j, l - 1);
    for (std::size_t j = 0; j < n; ++j) h(k - 1, j) -= q * h(l - 1, j);
  };
  auto swap_basis = [&](std::size_t k) {
    g.swap_rows(k - 1, k - 2);
    g.swap_cols(k - 1, k - 2);
    h.swap_rows(k - 1, k - 2);
  };
  auto redi = [&](std::size_t k, std::size_t l) {
    Int two = 2 * lam[k][l];
    if (abs(two) <= d[l]) return;
    Int q = floor_div(2 * lam[k][l] + d[l], 2 * d[l]);
    sub_row(k, l, q);
    lam[k][l] -= q * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k][i] -= q * lam[l][i];
  };

  d[0] = 1;
  d[1] = G(1, 1);
  std::size_t k = 2, kmax = 1;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        Int u = G(k, j);
        for (std::size_t i = 1; i < j; ++i) {
          u = d[i] * u - lam[k][i] * lam[j][i];
          mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[i - 1].get_mpz_t());
        }
        if (j < k)
          lam[k][j] = u;
        else {
          if (u == 0) throw NotPositiveDefinite();
          d[k] = u;
        }
      }
    }
    redi(k, k - 1);
    if (4 * d[k] * d[k - 2] < 3 * d[k - 1] * d[k - 1] - 4 * lam[k][k - 1] * lam[k][k - 1]) {
      swap_basis(k);
      for (std::size_t j = 1; j + 2 <= k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
      Int l = lam[k][k - 1];
      Int B = d[k - 2] * d[k] + l * l;
      mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), d[k - 1].get_mpz_t());
      for (std::size_t i = k + 1; i <= kmax; ++i) {
        Int t = lam[i][k];
        Int a = d[k] * lam[i][k - 1] - l * t;
        mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), d[k - 1].get_mpz_t());
        lam[i][k] = a;
        Int b = B * t + l * lam[i][k];
        mpz_divexact(b.get_mpz_t(), b.get_mpz_t(), d[k].get_mpz_t());
        lam[i][k - 1] = b;
      }
      d[k - 1] = B;
      if (k > 2) --k;
    } else {
      for (std::size_t l = k - 1; l-- > 1;) redi(k, l);
      ++k;
    }
  }
  return res;
}

inline std::pair<Lattice, IMat> lll(const Lattice& l) {
  auto [gi, d] = l.scaled_gram();
  LllResult r = lll_gram(gi);
  Lattice out(scaled(to_rat(r.gram), Rat(1) / Rat(d)), l.label);
  return {out, r.t};
}

}  // namespace sperf
