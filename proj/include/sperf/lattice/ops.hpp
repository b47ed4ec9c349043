#pragma once

#include "sperf/lattice/bounds.hpp"
#include "sperf/lattice/enumerate.hpp"

#include <unordered_set>

namespace sperf {

struct NotClosed : std::domain_error {
  NotClosed() : std::domain_error("even-norm vectors do not form a sublattice") {}
};
struct HypothesisFailed : std::domain_error {
  explicit HypothesisFailed(const std::string& w) : std::domain_error("hypothesis failed: " + w) {}
};
struct NotSublattice : std::domain_error {
  NotSublattice() : std::domain_error("not a sublattice") {}
};
struct NotIntegralNorms : std::domain_error {
  NotIntegralNorms() : std::domain_error("lattice has non-integral norms") {}
};

struct SublatticeTransform {
  IMat rows;  // basis of the sublattice in parent coordinates
  Int index;
};

// first nonzero coordinate positive
inline bool lex_positive(const Vec& v) {
  for (auto c : v)
    if (c) return c > 0;
  return false;
}

inline Shell shortest_vectors(const Lattice& l) { return ShortVectorEngine(l).shortest(); }

inline Shell vectors_of_norm(const Lattice& l, const Rat& a) {
  if (a <= 0) throw std::invalid_argument("norm must be positive");
  return ShortVectorEngine(l).shell(a);
}

inline Rat minimum(const Lattice& l) { return ShortVectorEngine(l).minimum(); }
inline Int kissing(const Lattice& l) { return Int((unsigned long)shortest_vectors(l).vectors.size()); }

// gamma(L)^n = min^n / det
inline Rat hermite_invariant(const Lattice& l) {
  return rat_pow(minimum(l), (unsigned)l.dim()) / l.determinant();
}

// index of a full-rank row lattice inside Z^n
inline Int row_index(const IMat& rows) {
  if (rows.rows != rows.cols) throw std::invalid_argument("index needs a square basis");
  return abs(det(rows));
}

// sublattice {v : f.v = 0 mod p}, with f normalized so its first nonzero entry is 1
inline IMat hyperplane_kernel_rows(const Vec& f, long p) {
  std::size_t n = f.size(), k = 0;
  while (k < n && ((f[k] % p) + p) % p == 0) ++k;
  if (k == n) throw std::invalid_argument("zero functional");
  long inv = inv_mod(((f[k] % p) + p) % p, p);
  IMat rows(n, n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k) continue;
    long fi = ((f[i] % p + p) % p) * inv % p;
    rows(r, i) = 1;
    rows(r, k) = -fi;
    ++r;
  }
  rows(r, k) = p;
  return hnf_basis(rows);
}

// Largest sublattice of even-norm vectors, when it is closed under addition.
inline SublatticeTransform even_sublattice(const Lattice& l) {
  std::size_t n = l.dim();
  if (n > 24) throw std::invalid_argument("dimension too large for residue enumeration");
  std::vector<int64_t> diag(n);
  std::vector<std::vector<int64_t>> twice(n, std::vector<int64_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat t = 2 * l.gram(i, j);
      if (i == j) {
        if (!is_integer(l.gram(i, i))) throw NotIntegralNorms();
        diag[i] = to_i64(l.gram(i, i).get_num());
      } else {
        if (!is_integer(t)) throw NotIntegralNorms();
        twice[i][j] = to_i64(t.get_num());
      }
    }
  // Q(v) mod 2 for v in {0,1}^n; 2L lies in the even set, so residues suffice
  std::size_t total = std::size_t(1) << n;
  std::vector<uint32_t> even_set;
  for (std::size_t m = 0; m < total; ++m) {
    int64_t q = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m >> i & 1)) continue;
      q += diag[i];
      for (std::size_t j = i + 1; j < n; ++j)
        if (m >> j & 1) q += twice[i][j];
    }
    if ((q % 2 + 2) % 2 == 0) even_set.push_back((uint32_t)m);
  }
  // closed iff it is an F_2-subspace
  std::vector<uint32_t> basis;
  for (uint32_t v : even_set) {
    uint32_t w = v;
    for (uint32_t b : basis) w = std::min(w, w ^ b);
    if (w) {
      basis.push_back(w);
      std::sort(basis.rbegin(), basis.rend());
    }
  }
  if ((std::size_t(1) << basis.size()) != even_set.size()) throw NotClosed();
  IMat gens(basis.size() + n, n);
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) gens(r, i) = (basis[r] >> i) & 1;
  for (std::size_t i = 0; i < n; ++i) gens(basis.size() + i, i) = 2;
  IMat rows = hnf_basis(gens);
  return {rows, Int(1) << (unsigned)(n - basis.size())};
}

// Sublattice of vectors whose norm is divisible by 3.  The hypothesis
// (a,b)^2 - (a,a)(b,b) in 3Z_3 for all a, b is equivalent to the Gram matrix
// having rank <= 1 over F_3, which is what gets checked.
inline SublatticeTransform norm_3divisible_sublattice(const Lattice& l) {
  std::size_t n = l.dim();
  std::vector<std::vector<long>> g(n, std::vector<long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& e = l.gram(i, j);
      if (e.get_den() % 3 == 0) throw HypothesisFailed("gram entry not 3-integral");
      g[i][j] = mod_p(e.get_num(), 3) * inv_mod(mod_p(e.get_den(), 3), 3) % 3;
    }
  auto rows = g;
  auto piv = rref_mod_p(rows, n, 3);
  if (piv.size() >= 2) {
    // orthogonal pair with nonzero norms exists; report the first basis pair found
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (((g[i][j] * g[i][j] - g[i][i] * g[j][j]) % 3 + 3) % 3 != 0)
          throw HypothesisFailed("basis pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    throw HypothesisFailed("gram has rank >= 2 over F_3");
  }
  if (piv.empty()) return {IMat::identity(n), Int(1)};
  Vec f(n);
  for (std::size_t j = 0; j < n; ++j) f[j] = rows[0][j];
  return {hyperplane_kernel_rows(f, 3), Int(3)};
}

inline IMat sum_rows(const IMat& a, const IMat& b) { return hnf_basis(vstack(a, b)); }

inline IMat intersect_rows(const IMat& a, const IMat& b) {
  IMat s = vstack(a, b);
  HnfResult h = hnf(s);
  IMat gens(s.rows - h.rank, a.cols);
  for (std::size_t r = h.rank; r < s.rows; ++r) {
    IVec x(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) x[i] = h.u(r, i);
    IVec v = vec_mul(x, a);
    for (std::size_t j = 0; j < a.cols; ++j) gens(r - h.rank, j) = v[j];
  }
  return hnf_basis(gens);
}

// coordinates c with c * super = sub, or NotSublattice
inline IMat coordinates_in(const IMat& sub, const IMat& super) {
  QMat s = to_rat(super), b = to_rat(sub);
  QMat st = s.transpose();
  QMat c = b * st * inverse(s * st);
  if (c * s != b) throw NotSublattice();
  for (auto& e : c.a)
    if (!is_integer(e)) throw NotSublattice();
  return to_int_exact(c);
}

inline Int index_of(const IMat& sub, const IMat& super) {
  IMat c = coordinates_in(sub, super);
  if (c.rows != c.cols) throw NotSublattice();
  Int d = abs(det(c));
  if (d == 0) throw NotSublattice();
  return d;
}

inline Lattice sum(const Lattice& ambient, const IMat& a, const IMat& b, std::string label = {}) {
  return sublattice(ambient, sum_rows(a, b), std::move(label));
}

inline Lattice intersect(const Lattice& ambient, const IMat& a, const IMat& b, std::string label = {}) {
  return sublattice(ambient, intersect_rows(a, b), std::move(label));
}

// exact successive minima m_1..m_r
inline std::vector<Rat> successive_minima(const Lattice& l, std::size_t r) {
  std::size_t n = l.dim();
  if (r < 1 || r > n) throw std::invalid_argument("r out of range");
  ShortVectorEngine eng(l);
  std::vector<Int> diag;
  for (std::size_t i = 0; i < n; ++i) diag.push_back(eng.reduced_gram()(i, i));
  std::sort(diag.begin(), diag.end());
  Rat bound = Rat(diag[r - 1]) / Rat(eng.scale());
  std::vector<std::pair<Rat, Vec>> vs;
  eng.for_each_up_to(bound, false, [&](const Vec& v, const Rat& q) {
    vs.emplace_back(q, v);
    return true;
  });
  std::sort(vs.begin(), vs.end(), [](auto& x, auto& y) { return x.first < y.first || (x.first == y.first && x.second < y.second); });
  std::vector<Rat> out;
  std::vector<QVec> ech;  // echelon rows
  std::vector<std::size_t> pcol;
  for (auto& [q, v] : vs) {
    QVec w = to_qvec(v);
    for (std::size_t i = 0; i < ech.size(); ++i) {
      if (w[pcol[i]] == 0) continue;
      Rat f = w[pcol[i]] / ech[i][pcol[i]];
      for (std::size_t j = 0; j < n; ++j) w[j] -= f * ech[i][j];
    }
    std::size_t c = 0;
    while (c < n && w[c] == 0) ++c;
    if (c == n) continue;
    ech.push_back(w);
    pcol.push_back(c);
    out.push_back(q);
    if (out.size() == r) break;
  }
  return out;
}

struct MinkowskiVerdict {
  bool holds;
  Rat lhs;  // (m_1...m_r)^n
  Rat rhs;  // (bound on gamma_n^n)^r * det^r
};

inline MinkowskiVerdict minkowski_check(const Lattice& l, std::size_t r) {
  unsigned n = (unsigned)l.dim();
  auto m = successive_minima(l, r);
  Rat prod = 1;
  for (auto& x : m) prod *= x;
  Rat lhs = rat_pow(prod, n);
  Rat rhs = rat_pow(BoundsTable::standard().at(n).pow_n * l.determinant(), (unsigned)r);
  return {lhs <= rhs, lhs, rhs};
}

}  // namespace sperf
