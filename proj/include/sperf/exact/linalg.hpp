#pragma once

#include "sperf/exact/matrix.hpp"

#include <optional>
#include <tuple>
#include <stdexcept>
#include <utility>

namespace sperf {

struct SingularMatrix : std::domain_error {
  SingularMatrix() : std::domain_error("singular matrix") {}
};

struct NotPrime : std::invalid_argument {
  explicit NotPrime(long p) : std::invalid_argument("modulus is not prime: " + std::to_string(p)) {}
};

// Bareiss fraction-free elimination with row pivoting
inline Int det(IMat m) {
  if (!m.square()) throw std::invalid_argument("det of non-square matrix");
  std::size_t n = m.rows;
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m(k, k);
  }
  return sign > 0 ? Int(m(n - 1, n - 1)) : Int(-m(n - 1, n - 1));
}

inline Rat det(const QMat& m) {
  if (!m.square()) throw std::invalid_argument("det of non-square matrix");
  IMat z(m.rows, m.cols);
  Int scale = 1;
  for (std::size_t i = 0; i < m.rows; ++i) {
    Int d = 1;
    for (std::size_t j = 0; j < m.cols; ++j) d = lcm(d, m(i, j).get_den());
    for (std::size_t j = 0; j < m.cols; ++j) {
      Rat e = m(i, j) * d;
      z(i, j) = e.get_num();
    }
    scale *= d;
  }
  return make_rat(det(z), scale);
}

inline QMat inverse(const QMat& m) {
  if (!m.square()) throw std::invalid_argument("inverse of non-square matrix");
  std::size_t n = m.rows;
  QMat a = m, inv = QMat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw SingularMatrix();
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    Rat piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rat f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

inline QMat inverse(const IMat& m) { return inverse(to_rat(m)); }

// inverse of a unimodular integer matrix
inline IMat inverse_unimodular(const IMat& m) {
  QMat q = inverse(m);
  return to_int_exact(q);
}

inline std::size_t rank(QMat a) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols && r < a.rows; ++c) {
    std::size_t p = r;
    while (p < a.rows && a(p, c) == 0) ++p;
    if (p == a.rows) continue;
    a.swap_rows(r, p);
    for (std::size_t i = r + 1; i < a.rows; ++i) {
      if (a(i, c) == 0) continue;
      Rat f = a(i, c) / a(r, c);
      for (std::size_t j = c; j < a.cols; ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

inline std::size_t rank(const IMat& a) { return rank(to_rat(a)); }

// x with x * a = b, a square nonsingular
inline QVec solve_left(const QMat& a, const QVec& b) { return vec_mul(b, inverse(a)); }

struct HnfResult {
  IMat h;  // row-style Hermite normal form, zero rows last
  IMat u;  // unimodular, u * input = h
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

namespace detail {

// row_i <- row_i - q * row_k on both matrices
inline void row_axpy(IMat& m, std::size_t i, std::size_t k, const Int& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols; ++j)
    if (m(k, j) != 0) m(i, j) -= q * m(k, j);
}

inline void row_negate(IMat& m, std::size_t i) {
  for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = -m(i, j);
}

}  // namespace detail

inline HnfResult hnf(const IMat& m, bool with_transform = true) {
  HnfResult res;
  res.h = m;
  IMat& h = res.h;
  IMat u = with_transform ? IMat::identity(m.rows) : IMat();
  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols && r < h.rows; ++c) {
    while (true) {
      std::size_t best = h.rows;
      for (std::size_t i = r; i < h.rows; ++i)
        if (h(i, c) != 0 && (best == h.rows || abs(h(i, c)) < abs(h(best, c)))) best = i;
      if (best == h.rows) break;
      h.swap_rows(r, best);
      if (with_transform) u.swap_rows(r, best);
      bool done = true;
      for (std::size_t i = r + 1; i < h.rows; ++i) {
        if (h(i, c) == 0) continue;
        Int q = floor_div(h(i, c), h(r, c));
        detail::row_axpy(h, i, r, q);
        if (with_transform) detail::row_axpy(u, i, r, q);
        if (h(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (r >= h.rows || h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      detail::row_negate(h, r);
      if (with_transform) detail::row_negate(u, r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(h(i, c), h(r, c));
      detail::row_axpy(h, i, r, q);
      if (with_transform) detail::row_axpy(u, i, r, q);
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.rank = r;
  res.u = std::move(u);
  return res;
}

// nonzero rows of the HNF: the canonical basis of the row lattice
inline IMat hnf_basis(const IMat& m) {
  HnfResult r = hnf(m, false);
  IMat b(r.rank, m.cols);
  for (std::size_t i = 0; i < r.rank; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) b(i, j) = r.h(i, j);
  return b;
}

// Incremental row-lattice basis; cheap for many generators in small dimension.
class LatticeBasisBuilder {
 public:
  explicit LatticeBasisBuilder(std::size_t n) : n_(n), rows_(n) {}

  void insert(IVec v) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (v[c] == 0) continue;
      if (rows_[c].empty()) {
        if (v[c] < 0)
          for (auto& e : v) e = -e;
        rows_[c] = std::move(v);
        return;
      }
      IVec& b = rows_[c];
      if (v[c] % b[c] == 0) {
        Int q = v[c] / b[c];
        for (std::size_t j = c; j < n_; ++j) v[j] -= q * b[j];
        continue;
      }
      Int g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), b[c].get_mpz_t(), v[c].get_mpz_t());
      Int bc = b[c] / g, vc = v[c] / g;
      IVec nb(n_), nv(n_);
      for (std::size_t j = c; j < n_; ++j) {
        nb[j] = s * b[j] + t * v[j];
        nv[j] = bc * v[j] - vc * b[j];
      }
      if (nb[c] < 0)
        for (auto& e : nb) e = -e;
      b = std::move(nb);
      v = std::move(nv);
    }
  }

  void insert(const Vec& v) {
    IVec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = Int((long)v[i]);
    insert(std::move(w));
  }

  // reduce the echelon basis to HNF and return its nonzero rows
  IMat basis() const {
    std::vector<IVec> rs;
    for (auto& r : rows_)
      if (!r.empty()) rs.push_back(r);
    IMat m(rs.size(), n_);
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < n_; ++j) m(i, j) = rs[i][j];
    return hnf_basis(m);
  }

  std::size_t rank() const {
    std::size_t r = 0;
    for (auto& x : rows_) r += !x.empty();
    return r;
  }

 private:
  std::size_t n_;
  std::vector<IVec> rows_;
};

struct SnfResult {
  std::vector<Int> d;  // diagonal, d_1 | d_2 | ... (length min(rows, cols))
  IMat u, v;           // u * m * v = diag(d)
};

// alternating row and column Hermite reduction keeps entries bounded by the
// pivots; a final gcd pass enforces the divisibility chain
inline SnfResult snf(const IMat& m) {
  std::size_t R = m.rows, C = m.cols, mn = std::min(R, C);
  IMat a = m, u = IMat::identity(R), v = IMat::identity(C);
  auto diagonal = [&] {
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j)
        if (i != j && a(i, j) != 0) return false;
    return true;
  };
  while (!diagonal()) {
    HnfResult r = hnf(a);
    a = std::move(r.h);
    u = r.u * u;
    if (diagonal()) break;
    HnfResult c = hnf(a.transpose());
    a = c.h.transpose();
    v = v * c.u.transpose();
  }
  // u2 * diag(x, y) * v2 = diag(g, xy/g) with s x + t y = g
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < mn; ++i)
      for (std::size_t j = i + 1; j < mn; ++j) {
        Int x = a(i, i), y = a(j, j);
        if (y == 0 && x != 0) continue;
        if (x != 0 && y % x == 0) continue;
        if (x == 0) {
          a.swap_rows(i, j), u.swap_rows(i, j);
          a.swap_cols(i, j), v.swap_cols(i, j);
          changed = true;
          continue;
        }
        Int g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        Int xg = x / g, yg = y / g;
        for (std::size_t l = 0; l < R; ++l) {
          Int ri = u(i, l), rj = u(j, l);
          u(i, l) = s * ri + t * rj;
          u(j, l) = xg * rj - yg * ri;
        }
        for (std::size_t l = 0; l < C; ++l) {
          Int ci = v(l, i), cj = v(l, j);
          v(l, i) = ci + cj;
          v(l, j) = s * xg * cj - t * yg * ci;
        }
        a(i, i) = g;
        a(j, j) = x * yg;
        changed = true;
      }
  }
  for (std::size_t i = 0; i < mn; ++i)
    if (a(i, i) < 0) {
      detail::row_negate(a, i);
      detail::row_negate(u, i);
    }
  SnfResult res;
  res.d.resize(mn);
  for (std::size_t i = 0; i < mn; ++i) res.d[i] = a(i, i);
  res.u = std::move(u);
  res.v = std::move(v);
  return res;
}

inline long mod_p(const Int& x, long p) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), (unsigned long)p);
  return r.get_si();
}

inline long inv_mod(long a, long p) {
  long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
  while (nr) {
    long q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("not invertible mod p");
  return ((t % p) + p) % p;
}

// Reduced row echelon form over F_p; returns the rank and pivot columns.
inline std::vector<std::size_t> rref_mod_p(std::vector<std::vector<long>>& a, std::size_t cols, long p) {
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t q = r;
    while (q < a.size() && a[q][c] == 0) ++q;
    if (q == a.size()) continue;
    std::swap(a[r], a[q]);
    long inv = inv_mod(a[r][c], p);
    for (auto& e : a[r]) e = e * inv % p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      long f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = ((a[i][j] - f * a[r][j]) % p + p) % p;
    }
    piv.push_back(c);
    ++r;
  }
  a.resize(r);
  return piv;
}

// Right null space {x : m x = 0 mod p}; one basis vector per free column
// (in increasing order) with a 1 there, entries in [0, p).
inline std::vector<Vec> kernel_mod_p(const IMat& m, long p) {
  if (!is_prime(p)) throw NotPrime(p);
  std::vector<std::vector<long>> a(m.rows, std::vector<long>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) a[i][j] = mod_p(m(i, j), p);
  auto piv = rref_mod_p(a, m.cols, p);
  std::vector<bool> is_piv(m.cols, false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<Vec> out;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_piv[f]) continue;
    Vec x(m.cols, 0);
    x[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = (p - a[r][f]) % p;
    out.push_back(x);
  }
  return out;
}

}  // namespace sperf
