#pragma once

#include "sperf/lattice/ops.hpp"

#include <functional>
#include <map>

namespace sperf {

struct Fingerprint {
  std::size_t dim = 0;
  Rat det, min;
  std::map<Rat, std::size_t> shells;        // norm -> count, norms up to the cutoff
  std::map<Rat, std::size_t> min_products;  // (x,y) over ordered pairs of minimal vectors
  bool operator==(const Fingerprint& o) const {
    return dim == o.dim && det == o.det && min == o.min && shells == o.shells && min_products == o.min_products;
  }
  bool operator!=(const Fingerprint& o) const { return !(*this == o); }
};

namespace detail {

// integer inner products against the scaled Gram; T is __int128 when the
// entries are small enough, mpz otherwise
template <class T>
struct ScaledFormT {
  std::vector<T> g;
  std::size_t n = 0;
  explicit ScaledFormT(const IMat& gi) : n(gi.rows) {
    for (auto& e : gi.a) g.push_back(from_int<T>(e));
  }
  std::vector<T> apply(const Vec& x) const {
    std::vector<T> y(n, T(0));
    for (std::size_t i = 0; i < n; ++i)
      if (x[i])
        for (std::size_t j = 0; j < n; ++j) y[j] += g[i * n + j] * T(x[i]);
    return y;
  }
  static T dot(const std::vector<T>& y, const Vec& x) {
    T s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) s += y[i] * T(x[i]);
    return s;
  }
};

// entries below 2^40 and coordinates below 2^20 keep every product in range
inline bool fits_fast(const IMat& gi, const std::vector<std::vector<Vec>>& vecs) {
  Int lim = Int(1) << 40;
  for (auto& e : gi.a)
    if (abs(e) >= lim) return false;
  for (auto& vs : vecs)
    for (auto& v : vs)
      for (auto c : v)
        if (c >= (1 << 20) || c <= -(1 << 20)) return false;
  return true;
}

inline std::vector<Vec> full_shell(const ShortVectorEngine& e, const Rat& a) { return e.shell(a).vectors; }

// histogram of (v, z) over z in shell, for every v in vs
template <class T>
std::vector<std::map<T, std::size_t>> profiles(const ScaledFormT<T>& sf, const std::vector<Vec>& shell,
                                               const std::vector<Vec>& vs) {
  std::vector<std::map<T, std::size_t>> out;
  for (auto& v : vs) {
    auto y = sf.apply(v);
    std::map<T, std::size_t> h;
    for (auto& z : shell) ++h[ScaledFormT<T>::dot(y, z)];
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace detail

inline Fingerprint fingerprint(const Lattice& l, std::optional<Rat> cutoff = std::nullopt) {
  Fingerprint f;
  f.dim = l.dim();
  f.det = l.determinant();
  ShortVectorEngine e(l);
  f.min = e.minimum();
  Rat cut = cutoff ? *cutoff : 2 * f.min;
  e.for_each_up_to(cut, false, [&](const Vec&, const Rat& v) {
    ++f.shells[v];
    return true;
  });
  auto [gi, den] = l.scaled_gram();
  auto mins = detail::full_shell(e, f.min);
  auto tally = [&](auto tag) {
    using T = decltype(tag);
    detail::ScaledFormT<T> sf(gi);
    std::map<T, std::size_t> raw;
    for (auto& x : mins) {
      auto y = sf.apply(x);
      for (auto& z : mins) ++raw[detail::ScaledFormT<T>::dot(y, z)];
    }
    for (auto& [k, c] : raw) f.min_products[Rat(to_int(k)) / Rat(den)] = c;
  };
  if (detail::fits_fast(gi, {mins}))
    tally(__int128(0));
  else
    tally(Int(0));
  return f;
}

struct IsometryWitness {
  IMat U;  // U * G1 * U^T = G2
};

inline bool verify_isometry(const Lattice& l1, const Lattice& l2, const IMat& u) {
  if (u.rows != l1.dim() || u.cols != l2.dim() || l1.dim() != l2.dim()) return false;
  QMat q = to_rat(u);
  if (abs(det(u)) != 1) return false;
  return q * l1.gram * q.transpose() == l2.gram;
}

namespace detail {

// A basis of l (rows in l's coordinates) made of short vectors: greedy
// over the shortest vectors when they generate l, else the LLL basis.
inline IMat short_basis(const Lattice& l, const ShortVectorEngine& e) {
  std::size_t n = l.dim();
  auto mins = e.shortest().vectors;
  std::vector<Vec> chosen;
  std::vector<QVec> rowsq;
  for (auto& v : mins) {
    if (!lex_positive(v)) continue;
    QMat t(rowsq.size() + 1, n);
    for (std::size_t i = 0; i < rowsq.size(); ++i) t.set_row(i, rowsq[i]);
    t.set_row(rowsq.size(), to_qvec(v));
    if (rank(t) == rowsq.size() + 1) {
      rowsq.push_back(to_qvec(v));
      chosen.push_back(v);
      if (chosen.size() == n) break;
    }
  }
  if (chosen.size() == n) {
    IMat b = from_vecs(chosen, n);
    if (abs(det(b)) == 1) return b;
  }
  return e.transform();
}

}  // namespace detail

namespace detail {

// images in l2 of the basis rows b of l1 (Gram q1), or none
template <class T>
std::optional<std::vector<Vec>> match_basis(const IMat& g1i, const IMat& g2i, const Int& den2,
                                            const std::vector<Vec>& bv, const QMat& q1,
                                            const std::vector<Vec>& min1, const std::vector<Vec>& min2,
                                            const ShortVectorEngine& e2) {
  std::size_t n = bv.size();
  ScaledFormT<T> s1(g1i), s2(g2i);
  auto want = profiles(s1, min1, bv);
  std::map<Rat, std::vector<Vec>> shells2;
  std::map<Rat, std::vector<std::map<T, std::size_t>>> prof2;
  std::vector<std::vector<Vec>> cand(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rat a = q1(i, i);
    if (!shells2.count(a)) {
      shells2[a] = full_shell(e2, a);
      prof2[a] = profiles(s2, min2, shells2[a]);
    }
    auto& sh = shells2[a];
    auto& pr = prof2[a];
    for (std::size_t c = 0; c < sh.size(); ++c)
      if (pr[c] == want[i]) cand[i].push_back(sh[c]);
    if (cand[i].empty()) return std::nullopt;
  }
  // fewest candidates first, then always the vector most linked to the placed ones,
  // so decomposable lattices are filled one component at a time
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    std::size_t best = n, best_links = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      std::size_t links = 0;
      for (auto j : order) links += q1(i, j) != 0;
      if (best == n || links > best_links || (links == best_links && cand[i].size() < cand[best].size())) {
        best = i;
        best_links = links;
      }
    }
    placed[best] = true;
    order.push_back(best);
  }

  std::vector<T> target(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat t = q1(i, j) * Rat(den2);
      if (!is_integer(t)) return std::nullopt;
      target[i * n + j] = from_int<T>(t.get_num());
    }
  std::vector<std::vector<std::vector<T>>> ys(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto& c : cand[i]) ys[i].push_back(s2.apply(c));

  std::vector<std::size_t> pick(n);
  std::function<bool(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) return true;
    std::size_t bi = order[k];
    for (std::size_t c = 0; c < cand[bi].size(); ++c) {
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        std::size_t bj = order[j];
        ok = ScaledFormT<T>::dot(ys[bi][c], cand[bj][pick[bj]]) == target[bi * n + bj];
      }
      if (!ok) continue;
      pick[bi] = c;
      if (rec(k + 1)) return true;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(cand[i][pick[i]]);
  return rows;
}

}  // namespace detail

inline std::optional<IsometryWitness> is_isometric(const Lattice& l1, const Lattice& l2,
                                                   const Fingerprint* f1 = nullptr, const Fingerprint* f2 = nullptr) {
  std::size_t n = l1.dim();
  if (n != l2.dim()) return std::nullopt;
  if (l1.gram == l2.gram) return IsometryWitness{IMat::identity(n)};
  if ((f1 ? *f1 : fingerprint(l1)) != (f2 ? *f2 : fingerprint(l2))) return std::nullopt;

  ShortVectorEngine e1(l1), e2(l2);
  IMat b = detail::short_basis(l1, e1);
  QMat bq = to_rat(b);
  QMat q1 = bq * l1.gram * bq.transpose();
  // both Grams on the common scale of l2
  auto [g2i, den2] = l2.scaled_gram();
  QMat g1s = scaled(l1.gram, Rat(den2));
  if (common_denominator(g1s) != 1) return std::nullopt;
  IMat g1i = to_int_exact(g1s);

  Rat mn = e1.minimum();
  auto min1 = detail::full_shell(e1, mn), min2 = detail::full_shell(e2, mn);
  std::vector<Vec> bv = to_vecs(b);
  std::optional<std::vector<Vec>> rows;
  if (detail::fits_fast(g1i, {min1, min2, bv}) && detail::fits_fast(g2i, {}))
    rows = detail::match_basis<__int128>(g1i, g2i, den2, bv, q1, min1, min2, e2);
  else
    rows = detail::match_basis<Int>(g1i, g2i, den2, bv, q1, min1, min2, e2);
  if (!rows) return std::nullopt;

  IMat c = from_vecs(*rows, n);
  IMat v = inverse_unimodular(b) * c;  // v G2 v^T = G1
  IsometryWitness w{inverse_unimodular(v)};
  if (!verify_isometry(l1, l2, w.U)) throw std::logic_error("isometry witness failed verification");
  return w;
}

inline bool gram_less(const QMat& a, const QMat& b) {
  if (a.rows != b.rows) return a.rows < b.rows;
  for (std::size_t i = 0; i < a.a.size(); ++i)
    if (a.a[i] != b.a[i]) return a.a[i] < b.a[i];
  return false;
}

struct IsoClass {
  Lattice representative;  // member with the lexicographically least Gram
  std::size_t multiplicity = 0;
  std::vector<std::size_t> members;  // input positions
};

// fps[i] must be fingerprint(ls[i]) with the default cutoff
inline std::vector<IsoClass> dedup_classes(const std::vector<Lattice>& ls, const std::vector<Fingerprint>& fps) {
  if (fps.size() != ls.size()) throw std::invalid_argument("one fingerprint per lattice");
  std::vector<IsoClass> classes;
  std::vector<std::size_t> head;  // first member index per class
  for (std::size_t i = 0; i < ls.size(); ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < classes.size() && !placed; ++c) {
      std::size_t h = head[c];
      if (fps[h] != fps[i]) continue;
      if (is_isometric(ls[h], ls[i], &fps[h], &fps[i])) {
        classes[c].members.push_back(i);
        ++classes[c].multiplicity;
        placed = true;
      }
    }
    if (!placed) {
      classes.push_back({ls[i], 1, {i}});
      head.push_back(i);
    }
  }
  for (auto& c : classes)
    for (auto i : c.members)
      if (gram_less(ls[i].gram, c.representative.gram)) c.representative = ls[i];
  std::sort(classes.begin(), classes.end(),
            [](const IsoClass& a, const IsoClass& b) { return gram_less(a.representative.gram, b.representative.gram); });
  return classes;
}

inline std::vector<IsoClass> dedup_classes(const std::vector<Lattice>& ls) {
  std::vector<Fingerprint> fps;
  for (auto& l : ls) fps.push_back(fingerprint(l));
  return dedup_classes(ls, fps);
}

}  // namespace sperf
