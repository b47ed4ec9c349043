#pragma once

#include "sperf/catalog/catalog.hpp"
#include "sperf/isom/isom.hpp"

#include <array>
#include <map>
#include <set>
#include <thread>

namespace sperf {

struct PreconditionFailed : std::domain_error {
  std::size_t i, j;
  PreconditionFailed(std::size_t a, std::size_t b, const std::string& why)
      : std::domain_error("precondition failed at (" + std::to_string(a) + "," + std::to_string(b) + "): " + why), i(a), j(b) {}
};
struct NotIntegral : std::domain_error {
  explicit NotIntegral(const std::string& w) : std::domain_error("not integral: " + w) {}
};
struct GlueMismatch : std::domain_error {
  explicit GlueMismatch(const std::string& w) : std::domain_error("glue mismatch: " + w) {}
};
struct StructureViolation : std::domain_error {
  std::vector<Vec> witness;
  StructureViolation(const std::string& w, std::vector<Vec> wit) : std::domain_error("structure violation: " + w), witness(std::move(wit)) {}
};
struct NotGeneratedByMinimal : std::domain_error {
  NotGeneratedByMinimal() : std::domain_error("lattice is not generated by its minimal vectors") {}
};

// row basis of the lattice generated by rational rows
inline QMat rational_basis(const QMat& gens) {
  Int d = common_denominator(gens);
  IMat h = hnf_basis(to_int_exact(scaled(gens, Rat(d))));
  return scaled(to_rat(h), Rat(1) / Rat(d));
}

inline Rat mod_rat(const Rat& r, const Rat& m) { return r - m * Rat(floor(r / m)); }

// ---------------------------------------------------------------------------
// equal-norm systems with non-positive inner products

struct EqualNormSystem {
  QMat gram;
  std::vector<std::vector<std::size_t>> components;
  std::size_t dim = 0;
  std::size_t size() const { return gram.rows; }
};

inline EqualNormSystem decompose_equal_norm(const QMat& g) {
  std::size_t k = g.rows;
  if (k == 0 || !g.symmetric()) throw std::invalid_argument("system gram must be square, symmetric and nonempty");
  for (std::size_t i = 1; i < k; ++i)
    if (g(i, i) != g(0, 0)) throw PreconditionFailed(0, i, "unequal norms");
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (g(i, j) > 0) throw PreconditionFailed(i, j, "positive inner product " + to_string(g(i, j)));
  Rat total = 0;
  for (auto& e : g.a) total += e;
  if (total != 0) throw PreconditionFailed(0, k - 1, "vectors do not sum to zero");

  EqualNormSystem s;
  s.gram = g;
  std::vector<bool> seen(k, false);
  for (std::size_t r = 0; r < k; ++r) {
    if (seen[r]) continue;
    std::vector<std::size_t> comp{r}, stack{r};
    seen[r] = true;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < k; ++j)
        if (!seen[j] && g(i, j) != 0) {
          seen[j] = true;
          comp.push_back(j);
          stack.push_back(j);
        }
    }
    std::sort(comp.begin(), comp.end());
    Rat cs = 0;
    for (auto i : comp)
      for (auto j : comp) cs += g(i, j);
    if (cs != 0) throw PreconditionFailed(comp.front(), comp.back(), "component does not sum to zero");
    s.components.push_back(std::move(comp));
  }
  s.dim = rank(g);
  if (k != s.dim + s.components.size()) throw std::logic_error("dimension count identity failed");
  return s;
}

inline EqualNormSystem decompose_equal_norm(const Lattice& ambient, const std::vector<QVec>& vs) {
  QMat g(vs.size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) g(i, j) = bilinear(ambient.gram, vs[i], vs[j]);
  return decompose_equal_norm(g);
}

// ---------------------------------------------------------------------------
// root sublattice

struct RootComponent {
  std::string type;
  std::vector<Vec> basis;  // simple roots, coordinates of the ambient lattice
  QMat gram;               // Cartan form of the simple roots
  std::size_t roots = 0;
};

struct RootDecomposition {
  std::vector<RootComponent> components;
  std::size_t roots = 0;
  std::size_t rank() const {
    std::size_t r = 0;
    for (auto& c : components) r += c.basis.size();
    return r;
  }
  std::string label() const {
    std::string s;
    for (auto& c : components) s += (s.empty() ? "" : "+") + c.type;
    return s.empty() ? "0" : s;
  }
};

// rank, root count and determinant separate the irreducible types
inline std::string ade_label(std::size_t r, std::size_t count, const Rat& d) {
  if (count == r * (r + 1) && d == Rat((unsigned long)r + 1)) return "A" + std::to_string(r);
  if (r >= 4 && count == 2 * r * (r - 1) && d == 4) return "D" + std::to_string(r);
  if (r == 6 && count == 72 && d == 3) return "E6";
  if (r == 7 && count == 126 && d == 2) return "E7";
  if (r == 8 && count == 240 && d == 1) return "E8";
  throw std::logic_error("unrecognized root system: rank " + std::to_string(r) + ", " + std::to_string(count) + " roots");
}

namespace detail {

inline bool type_less(const std::string& a, const std::string& b) {
  if (a[0] != b[0]) return a[0] < b[0];
  return std::stoul(a.substr(1)) < std::stoul(b.substr(1));
}

}  // namespace detail

inline RootDecomposition root_sublattice(const Lattice& l) {
  if (!l.even()) throw std::invalid_argument("root sublattice needs an even lattice");
  RootDecomposition rd;
  auto roots = vectors_of_norm(l, 2).vectors;
  rd.roots = roots.size();
  if (roots.empty()) return rd;
  std::size_t n = l.dim(), k = roots.size();
  IMat g = to_int_exact(l.gram);
  std::vector<IVec> ys;
  for (auto& r : roots) {
    IVec y(n, Int(0));
    for (std::size_t i = 0; i < n; ++i)
      if (r[i])
        for (std::size_t j = 0; j < n; ++j) y[j] += g(i, j) * r[i];
    ys.push_back(std::move(y));
  }
  auto ip = [&](std::size_t a, std::size_t b) {
    Int s = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (roots[b][j]) s += ys[a][j] * roots[b][j];
    return s;
  };

  // generic functional: balanced base-K digits never cancel
  int64_t mx = 0;
  for (auto& r : roots)
    for (auto c : r) mx = std::max(mx, c < 0 ? -c : c);
  std::vector<Int> w(n);
  Int kk = 2 * mx + 1, p = 1;
  for (std::size_t i = 0; i < n; ++i, p *= kk) w[i] = p;

  std::vector<bool> seen(k, false);
  for (std::size_t r0 = 0; r0 < k; ++r0) {
    if (seen[r0]) continue;
    std::vector<std::size_t> comp{r0}, stack{r0};
    seen[r0] = true;
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < k; ++b)
        if (!seen[b] && ip(a, b) != 0) {
          seen[b] = true;
          comp.push_back(b);
          stack.push_back(b);
        }
    }
    std::vector<Vec> pos;
    for (auto a : comp) {
      Int f = 0;
      for (std::size_t i = 0; i < n; ++i) f += w[i] * roots[a][i];
      if (f > 0) pos.push_back(roots[a]);
    }
    std::sort(pos.begin(), pos.end());
    std::set<Vec> posset(pos.begin(), pos.end()), sums;
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        Vec s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = pos[a][i] + pos[b][i];
        if (posset.count(s)) sums.insert(s);
      }
    RootComponent c;
    for (auto& v : pos)
      if (!sums.count(v)) c.basis.push_back(v);
    c.roots = comp.size();
    std::size_t r = c.basis.size();
    c.gram = QMat(r, r);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) {
        c.gram(a, b) = l.inner(c.basis[a], c.basis[b]);
        if (a != b && c.gram(a, b) != 0 && c.gram(a, b) != -1) throw std::logic_error("simple roots with inner product outside {0,-1}");
      }
    c.type = ade_label(r, c.roots, det(c.gram));
    if (!is_isometric(Lattice(c.gram), root_lattice(c.type))) throw std::logic_error("component is not isometric to " + c.type);
    rd.components.push_back(std::move(c));
  }
  std::stable_sort(rd.components.begin(), rd.components.end(),
                   [](const RootComponent& a, const RootComponent& b) { return detail::type_less(a.type, b.type); });
  return rd;
}

// ---------------------------------------------------------------------------
// finite quadratic groups O/S

struct DiscGroup {
  using Elem = std::vector<long>;  // coefficients on the generators

  QMat ambient;  // Gram of the surrounding space
  QMat outer, inner;  // basis rows of O and of S inside it, ambient coordinates
  std::vector<long> orders;       // d_1 | d_2 | ..., all > 1
  std::vector<IVec> gen_coords;   // generators in coordinates of the outer basis
  QMat gen_gram;                  // (g_i, g_j)
  IMat snf_v;                     // element a (outer coords) has coefficients (a v)_c mod d
  std::vector<std::size_t> factor_cols;
  Rat modulus = 2;  // q lives mod 2Z when S is even, mod Z otherwise
  int sign = 1;

  std::size_t rank() const { return orders.size(); }
  Int order() const {
    Int o = 1;
    for (auto d : orders) o *= d;
    return o;
  }

  QVec gen_vector(std::size_t i) const { return vec_mul(to_qvec_int(gen_coords[i]), outer); }

  Rat raw(const Elem& a, const Elem& b) const {
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i]) continue;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (b[j]) s += gen_gram(i, j) * Int(a[i]) * Int(b[j]);
    }
    return sign * s;
  }
  Rat q(const Elem& a) const { return mod_rat(raw(a, a), modulus); }
  Rat b(const Elem& a, const Elem& c) const { return mod_rat(raw(a, c), Rat(1)); }

  Elem add(const Elem& a, const Elem& c) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + c[i]) % orders[i];
    return r;
  }
  Elem times(const Elem& a, long k) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = ((a[i] * (k % orders[i])) % orders[i] + orders[i]) % orders[i];
    return r;
  }
  bool is_zero(const Elem& a) const {
    return std::all_of(a.begin(), a.end(), [](long x) { return x == 0; });
  }

  // coefficients of the class of a vector given in outer coordinates
  Elem reduce(const IVec& a) const {
    Elem r(rank());
    for (std::size_t t = 0; t < rank(); ++t) {
      Int s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * snf_v(i, factor_cols[t]);
      r[t] = mod_p(s, orders[t]);
    }
    return r;
  }
  IVec outer_coords(const Elem& e) const {
    IVec a(outer.rows, Int(0));
    for (std::size_t t = 0; t < rank(); ++t)
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += gen_coords[t][i] * e[t];
    return a;
  }
  QVec vector_of(const Elem& e) const { return vec_mul(to_qvec_int(outer_coords(e)), outer); }

  std::size_t index(const Elem& e) const {
    std::size_t x = 0;
    for (std::size_t t = rank(); t-- > 0;) x = x * orders[t] + e[t];
    return x;
  }
  std::vector<Elem> elements(std::size_t cap = std::size_t(1) << 22) const {
    Int o = order();
    if (o > Int((unsigned long)cap)) throw std::length_error("discriminant group too large to enumerate");
    std::size_t total = o.get_ui();
    std::vector<Elem> out;
    out.reserve(total);
    for (std::size_t x = 0; x < total; ++x) {
      Elem e(rank());
      std::size_t y = x;
      for (std::size_t t = 0; t < rank(); ++t) {
        e[t] = y % orders[t];
        y /= orders[t];
      }
      out.push_back(std::move(e));
    }
    return out;
  }
  Elem generator(std::size_t i) const {
    Elem e(rank(), 0);
    e[i] = 1;
    return e;
  }

  std::vector<Rat> q_generators() const {
    std::vector<Rat> v;
    for (std::size_t i = 0; i < rank(); ++i) v.push_back(q(generator(i)));
    return v;
  }
  // q(g_i + g_j) for i < j, row by row
  std::vector<Rat> q_pair_sums() const {
    std::vector<Rat> v;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = i + 1; j < rank(); ++j) v.push_back(q(add(generator(i), generator(j))));
    return v;
  }

  DiscGroup negated() const {
    DiscGroup g = *this;
    g.sign = -sign;
    return g;
  }

 private:
  static QVec to_qvec_int(const IVec& a) {
    QVec q(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) q[i] = Rat(a[i]);
    return q;
  }
};

// O/S for full-rank S inside O; (O, S) must be integral
inline DiscGroup quotient_group(const QMat& ambient, const QMat& outer, const QMat& inner) {
  std::size_t n = ambient.rows;
  if (outer.rows != n || inner.rows != n) throw std::invalid_argument("quotient needs full-rank bases");
  QMat c = inner * inverse(outer);
  if (common_denominator(c) != 1) throw NotIntegral("inner lattice is not contained in the outer one");
  QMat cross = outer * ambient * inner.transpose();
  if (common_denominator(cross) != 1) throw NotIntegral("outer lattice does not pair integrally with the inner one");
  DiscGroup g;
  g.ambient = ambient;
  g.outer = outer;
  g.inner = inner;
  QMat sg = inner * ambient * inner.transpose();
  g.modulus = 2;
  for (std::size_t i = 0; i < n; ++i)
    if (sg(i, i).get_num() % 2 != 0) g.modulus = 1;
  SnfResult s = snf(to_int_exact(c));
  g.snf_v = s.v;
  IMat vinv = inverse_unimodular(s.v);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.d[i] == 0) throw std::invalid_argument("inner lattice is not of full rank");
    if (s.d[i] == 1) continue;
    if (!s.d[i].fits_slong_p()) throw std::length_error("discriminant group factor too large");
    g.orders.push_back(s.d[i].get_si());
    g.factor_cols.push_back(i);
    IVec r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = vinv(i, j);
    g.gen_coords.push_back(std::move(r));
  }
  std::size_t k = g.rank();
  g.gen_gram = QMat(k, k);
  std::vector<QVec> gv;
  for (std::size_t i = 0; i < k; ++i) gv.push_back(g.gen_vector(i));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g.gen_gram(i, j) = bilinear(ambient, gv[i], gv[j]);
  if (g.order() != abs(det(to_int_exact(c)))) throw std::logic_error("group order differs from the index");
  return g;
}

// L*/L; generators in dual coordinates
inline DiscGroup disc_group(const Lattice& l) {
  if (!l.integral()) throw NotIntegral("gram matrix has non-integral entries");
  return quotient_group(l.gram, inverse(l.gram), QMat::identity(l.dim()));
}

// ---------------------------------------------------------------------------
// glue maps

struct GlueMap {
  DiscGroup source, target;
  std::vector<DiscGroup::Elem> images;  // image of each source generator
  bool anti = true;

  DiscGroup::Elem apply(const DiscGroup::Elem& e) const {
    DiscGroup::Elem r(target.rank(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) r = target.add(r, target.times(images[i], e[i]));
    return r;
  }
};

namespace detail {

inline std::size_t generated_order(const DiscGroup& g, const std::vector<DiscGroup::Elem>& gens) {
  std::set<DiscGroup::Elem> seen{DiscGroup::Elem(g.rank(), 0)};
  std::vector<DiscGroup::Elem> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::vector<DiscGroup::Elem> next;
    for (auto& x : frontier)
      for (auto& y : gens) {
        auto z = g.add(x, y);
        if (seen.insert(z).second) next.push_back(z);
      }
    frontier = std::move(next);
  }
  return seen.size();
}

inline Rat glue_modulus(const GlueMap& m) { return std::min(m.source.modulus, m.target.modulus); }

}  // namespace detail

// homomorphism, bijective, and q(phi g) = +-q(g) on generators and their pairwise sums
inline bool verify_glue(const GlueMap& m) {
  const DiscGroup &a = m.source, &b = m.target;
  if (a.order() != b.order() || m.images.size() != a.rank()) return false;
  Rat mod = detail::glue_modulus(m);
  int s = m.anti ? -1 : 1;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (m.images[i].size() != b.rank()) return false;
    if (!b.is_zero(b.times(m.images[i], a.orders[i]))) return false;
    if (mod_rat(b.raw(m.images[i], m.images[i]) - s * a.raw(a.generator(i), a.generator(i)), mod) != 0) return false;
    for (std::size_t j = i + 1; j < a.rank(); ++j) {
      if (mod_rat(b.raw(m.images[i], m.images[j]) - s * a.raw(a.generator(i), a.generator(j)), Rat(1)) != 0) return false;
      auto si = a.add(a.generator(i), a.generator(j));
      auto ti = b.add(m.images[i], m.images[j]);
      if (mod_rat(b.raw(ti, ti) - s * a.raw(si, si), mod) != 0) return false;
    }
  }
  return Int((unsigned long)detail::generated_order(b, m.images)) == b.order();
}

// exhaustive search over generator images
inline std::optional<GlueMap> anti_isometry_search(const DiscGroup& g1, const DiscGroup& g2, bool anti = true) {
  if (g1.order() != g2.order()) return std::nullopt;
  GlueMap m{g1, g2, std::vector<DiscGroup::Elem>(g1.rank()), anti};
  auto elems = g2.elements();
  Rat mod = detail::glue_modulus(m);
  int s = anti ? -1 : 1;
  std::vector<std::vector<DiscGroup::Elem>> cand(g1.rank());
  for (std::size_t i = 0; i < g1.rank(); ++i) {
    Rat qi = g1.raw(g1.generator(i), g1.generator(i));
    for (auto& e : elems)
      if (g2.is_zero(g2.times(e, g1.orders[i])) && mod_rat(g2.raw(e, e) - s * qi, mod) == 0) cand[i].push_back(e);
  }
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == g1.rank()) return verify_glue(m);
    for (auto& e : cand[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = mod_rat(g2.raw(e, m.images[j]) - s * g1.raw(g1.generator(i), g1.generator(j)), Rat(1)) == 0;
      if (!ok) continue;
      m.images[i] = e;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return m;
}

// ---------------------------------------------------------------------------
// subdirect product {(v1, v2) : phi(v1 + S1) = v2 + S2}

struct GluedLattice {
  Lattice lattice;
  QMat basis;    // rows in coordinates of the orthogonal sum of both ambients
  QMat ambient;  // Gram of that orthogonal sum
};

inline GluedLattice subdirect_product(const GlueMap& phi) {
  if (!phi.anti) throw GlueMismatch("subdirect product needs an anti-isometry");
  if (!verify_glue(phi)) throw GlueMismatch("map is not a verified anti-isometry");
  const DiscGroup &a = phi.source, &b = phi.target;
  std::size_t n1 = a.ambient.rows, n2 = b.ambient.rows;
  QMat gens(n1 + n2 + a.rank(), n1 + n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) gens(i, j) = a.inner(i, j);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) gens(n1 + i, n1 + j) = b.inner(i, j);
  for (std::size_t t = 0; t < a.rank(); ++t) {
    QVec x = a.gen_vector(t), y = b.vector_of(phi.images[t]);
    for (std::size_t j = 0; j < n1; ++j) gens(n1 + n2 + t, j) = x[j];
    for (std::size_t j = 0; j < n2; ++j) gens(n1 + n2 + t, n1 + j) = y[j];
  }
  GluedLattice out;
  out.ambient = block_diag(a.ambient, b.ambient);
  out.basis = rational_basis(gens);
  out.lattice = Lattice(out.basis * out.ambient * out.basis.transpose());
  Rat d1 = det(a.inner * a.ambient * a.inner.transpose()), d2 = det(b.inner * b.ambient * b.inner.transpose());
  Rat o = Rat(a.order());
  if (out.lattice.determinant() != d1 * d2 / (o * o)) throw std::logic_error("subdirect product has the wrong determinant");
  return out;
}

// ---------------------------------------------------------------------------
// even overlattices through isotropic subgroups of L*/L

namespace detail {

inline std::vector<std::vector<std::size_t>> isotropic_subgroups(const DiscGroup& g, const Int& order) {
  auto elems = g.elements();
  std::vector<std::size_t> iso;
  for (std::size_t i = 1; i < elems.size(); ++i)
    if (g.q(elems[i]) == 0) iso.push_back(i);
  std::set<std::vector<std::size_t>> level{{0}}, done;
  while (!level.empty()) {
    std::set<std::vector<std::size_t>> next;
    for (auto& h : level) {
      if (Int((unsigned long)h.size()) == order) {
        done.insert(h);
        continue;
      }
      std::set<std::size_t> hs(h.begin(), h.end());
      for (auto e : iso) {
        if (hs.count(e)) continue;
        bool orth = true;
        for (auto x : h)
          if (g.b(elems[e], elems[x]) != 0) {
            orth = false;
            break;
          }
        if (!orth) continue;
        // <H, e> = H + Z e
        std::set<std::size_t> gen;
        const auto& m = elems[e];
        auto k = m;
        while (true) {
          for (auto x : h) gen.insert(g.index(g.add(elems[x], k)));
          if (g.is_zero(k)) break;
          k = g.add(k, m);
        }
        if (order % Int((unsigned long)gen.size()) == 0) next.insert(std::vector<std::size_t>(gen.begin(), gen.end()));
      }
    }
    level = std::move(next);
  }
  return {done.begin(), done.end()};
}

}  // namespace detail

// all even overlattices of the given index up to isometry, as Gram matrices
inline std::vector<Lattice> even_overlattices(const Lattice& l, const Int& index, unsigned threads = 0) {
  if (!l.even()) throw std::invalid_argument("even overlattices need an even lattice");
  if (index <= 0) throw std::invalid_argument("index must be positive");
  if (index == 1) return {l};
  Int d = l.determinant().get_num();
  if (d % (index * index) != 0) return {};
  DiscGroup g = disc_group(l);
  auto subs = detail::isotropic_subgroups(g, index);
  auto elems = g.elements();
  std::size_t n = l.dim();
  std::vector<Lattice> ls(subs.size());
  std::vector<Fingerprint> fps(subs.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      QMat gens(n + subs[s].size(), n);
      for (std::size_t i = 0; i < n; ++i) gens(i, i) = 1;
      for (std::size_t r = 0; r < subs[s].size(); ++r) {
        // ambient coordinates of the disc group are the coordinates of l
        QVec v = g.vector_of(elems[subs[s][r]]);
        for (std::size_t j = 0; j < n; ++j) gens(n + r, j) = v[j];
      }
      QMat b = rational_basis(gens);
      ls[s] = Lattice(b * l.gram * b.transpose());
      fps[s] = fingerprint(ls[s]);
    }
  };
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = (unsigned)std::min<std::size_t>(t, std::max<std::size_t>(1, subs.size()));
  std::vector<std::thread> pool;
  std::size_t chunk = (subs.size() + t - 1) / t;
  for (unsigned i = 0; i < t; ++i) {
    std::size_t lo = i * chunk, hi = std::min(subs.size(), lo + chunk);
    if (lo < hi) pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
  std::vector<Lattice> out;
  for (auto& c : dedup_classes(ls, fps)) out.push_back(c.representative);
  return out;
}

// ---------------------------------------------------------------------------
// norm-4 classes modulo 3 Lambda, Lambda the dual

struct ClassSystem {
  std::vector<std::array<Vec, 3>> classes;  // members sorted, classes sorted by first member
  std::vector<std::size_t> negative;        // index of -K
  std::vector<std::vector<int>> pairing;    // (K_i, K_j) in {0, 1, -1}; 0 on the diagonal and for -K
  std::size_t orthogonal_pairs = 0, plus_pairs = 0, minus_pairs = 0;  // unordered, K_j != +-K_i
};

namespace detail {

struct ClassContext {
  Lattice gamma;
  IMat gi;  // den * gram
  Int den;
  std::vector<Vec> lambda_min;  // dual coordinates

  explicit ClassContext(const Lattice& g) : gamma(g) {
    auto sg = g.scaled_gram();
    gi = sg.first;
    den = sg.second;
  }
  Int ip_scaled(const Vec& x, const Vec& y) const {
    Int s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i]) continue;
      Int t = 0;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j]) t += gi(i, j) * y[j];
      s += t * x[i];
    }
    return s;
  }
  // x * den * gram mod 3 den: equal keys iff the difference lies in 3 Lambda
  Vec key(const Vec& x) const {
    Vec k(x.size());
    long m = 3 * den.get_si();
    for (std::size_t j = 0; j < x.size(); ++j) {
      Int s = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) s += gi(i, j) * x[i];
      k[j] = mod_p(s, m);
    }
    return k;
  }
  // dual coordinates of x / 3 when it lies in Lambda
  std::optional<Vec> third_in_dual(const Vec& x) const {
    Vec a(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      Rat s = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) s += gamma.gram(i, j) * Int(x[i]);
      s /= 3;
      if (!is_integer(s)) return std::nullopt;
      a[j] = to_i64(s.get_num());
    }
    return a;
  }
};

inline Vec vneg(const Vec& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = -v[i];
  return r;
}
inline Vec vadd(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vec vsub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline int64_t vdot(const Vec& a, const Vec& b) {
  __int128 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (__int128)a[i] * b[i];
  return (int64_t)s;
}

}  // namespace detail

// Partition of the norm-4 vectors of gamma into classes modulo 3 gamma^*,
// checking class sizes, sums, in-class products, N_2, pairings and sums of
// negatively paired classes.
inline ClassSystem class_system(const Lattice& gamma) {
  detail::ClassContext cx(gamma);
  Lattice lambda = dual(gamma);
  ShortVectorEngine le(lambda);
  if (le.minimum() != make_rat(4, 3)) throw std::invalid_argument("dual minimum is " + to_string(le.minimum()) + ", expected 4/3");
  cx.lambda_min = le.shortest().vectors;
  auto c4 = vectors_of_norm(gamma, 4).vectors;
  if (c4.empty()) throw std::invalid_argument("no vectors of norm 4");

  std::map<Vec, std::vector<Vec>> byk;
  for (auto& x : c4) byk[cx.key(x)].push_back(x);
  ClassSystem cs;
  std::map<Vec, std::size_t> where;  // member -> class
  for (auto& [k, mem] : byk) {
    if (mem.size() != 3) throw StructureViolation("class of size " + std::to_string(mem.size()), mem);
    std::sort(mem.begin(), mem.end());
    cs.classes.push_back({mem[0], mem[1], mem[2]});
  }
  std::sort(cs.classes.begin(), cs.classes.end());
  for (std::size_t c = 0; c < cs.classes.size(); ++c)
    for (auto& x : cs.classes[c]) where[x] = c;

  Int two = 2 * cx.den, m2 = -2 * cx.den;
  for (auto& k : cs.classes) {
    std::vector<Vec> wit(k.begin(), k.end());
    if (detail::vadd(detail::vadd(k[0], k[1]), k[2]) != Vec(gamma.dim(), 0)) throw StructureViolation("class does not sum to zero", wit);
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (cx.ip_scaled(k[a], k[b]) != m2) throw StructureViolation("in-class inner product is not -2", wit);
    for (int a = 0; a < 3; ++a) {
      std::vector<Vec> n2, expect;
      for (auto& y : cx.lambda_min)
        if (detail::vdot(y, k[a]) == 2) n2.push_back(y);
      for (int b = 0; b < 3; ++b) {
        if (b == a) continue;
        auto t = cx.third_in_dual(detail::vsub(k[a], k[b]));
        if (!t) throw StructureViolation("(u - v)/3 is not in the dual", wit);
        expect.push_back(*t);
      }
      std::sort(n2.begin(), n2.end());
      std::sort(expect.begin(), expect.end());
      if (n2 != expect) throw StructureViolation("N_2(u) is not {(u-v)/3, (u-w)/3}", wit);
    }
  }

  std::size_t nc = cs.classes.size();
  cs.negative.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    auto it = where.find(detail::vneg(cs.classes[c][0]));
    if (it == where.end()) throw StructureViolation("-K is not a class", {cs.classes[c][0]});
    cs.negative[c] = it->second;
  }
  cs.pairing.assign(nc, std::vector<int>(nc, 0));
  // products via the scaled Gram applied once per vector
  std::vector<std::array<IVec, 3>> ys(nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (int a = 0; a < 3; ++a) {
      IVec y(gamma.dim(), Int(0));
      for (std::size_t i = 0; i < gamma.dim(); ++i)
        if (cs.classes[c][a][i])
          for (std::size_t j = 0; j < gamma.dim(); ++j) y[j] += cx.gi(i, j) * cs.classes[c][a][i];
      ys[c][a] = std::move(y);
    }
  bool small = true;
  for (auto& e : cx.gi.a) small = small && abs(e) < (Int(1) << 30);
  std::vector<std::array<std::vector<int64_t>, 3>> ys64(nc);
  if (small)
    for (std::size_t c = 0; c < nc; ++c)
      for (int a = 0; a < 3; ++a)
        for (auto& e : ys[c][a]) ys64[c][a].push_back(e.get_si());
  auto prod = [&](std::size_t c1, int a, std::size_t c2, int b) -> Int {
    const Vec& x = cs.classes[c2][b];
    if (small) {
      __int128 s = 0;
      for (std::size_t j = 0; j < x.size(); ++j) s += (__int128)ys64[c1][a][j] * x[j];
      return to_int(s);
    }
    Int s = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j]) s += ys[c1][a][j] * x[j];
    return s;
  };
  Int d = cx.den;
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t j = i + 1; j < nc; ++j) {
      if (cs.negative[i] == j) continue;
      std::array<std::array<Int, 3>, 3> p;
      bool zero = true;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          p[a][b] = prod(i, a, j, b);
          zero = zero && p[a][b] == 0;
        }
      std::vector<Vec> wit{cs.classes[i][0], cs.classes[i][1], cs.classes[i][2], cs.classes[j][0], cs.classes[j][1], cs.classes[j][2]};
      if (zero) {
        ++cs.orthogonal_pairs;
        continue;
      }
      int eps = 0;
      std::array<int, 3> phi{-1, -1, -1};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          if (p[a][b] == 2 * d || p[a][b] == -2 * d) {
            int e = p[a][b] > 0 ? 1 : -1;
            if ((eps && eps != e) || phi[a] != -1) throw StructureViolation("pairing pattern is not of the form 2e, -e, -e", wit);
            eps = e;
            phi[a] = b;
          }
        }
      bool ok = eps != 0;
      for (int a = 0; a < 3 && ok; ++a) {
        ok = phi[a] != -1;
        for (int b = 0; b < 3 && ok; ++b)
          if (b != phi[a]) ok = p[a][b] == -eps * d;
      }
      if (ok) ok = phi[0] != phi[1] && phi[1] != phi[2] && phi[0] != phi[2];
      if (!ok) throw StructureViolation("pairing pattern is not of the form 2e, -e, -e", wit);
      cs.pairing[i][j] = cs.pairing[j][i] = eps;
      if (eps == 1) {
        ++cs.plus_pairs;
      } else {
        ++cs.minus_pairs;
        std::array<Vec, 3> k3;
        for (int a = 0; a < 3; ++a) k3[a] = detail::vadd(cs.classes[i][a], cs.classes[j][phi[a]]);
        std::sort(k3.begin(), k3.end());
        auto it = where.find(k3[0]);
        if (it == where.end() || cs.classes[it->second] != k3) throw StructureViolation("K1 + K2 is not a class", wit);
      }
    }
  return cs;
}

// ---------------------------------------------------------------------------
// s_K: -1 on the span of K, +1 on its orthogonal complement

struct Reflection {
  QMat S;  // acts on row vectors in dual coordinates
  bool integral = false, isometry = false, involution = false, preserves_minimal = false;
  bool ok() const { return integral && isometry && involution && preserves_minimal; }
};

class ReflectionContext {
 public:
  // gamma with the dual generated by its minimal vectors
  explicit ReflectionContext(const Lattice& gamma) : gamma_(gamma), lambda_(dual(gamma)) {
    ShortVectorEngine e(lambda_);
    auto mins = e.shortest().vectors;
    LatticeBasisBuilder bb(lambda_.dim());
    for (auto& v : mins) bb.insert(v);
    if (bb.rank() != lambda_.dim() || abs(det(bb.basis())) != 1) throw NotGeneratedByMinimal();
    minimal_.insert(mins.begin(), mins.end());
  }

  const Lattice& lambda() const { return lambda_; }
  const std::set<Vec>& minimal() const { return minimal_; }

  // K given in coordinates of gamma
  Reflection reflect(const std::array<Vec, 3>& k) const {
    std::size_t n = gamma_.dim();
    QMat b(2, n);
    for (int r = 0; r < 2; ++r) b.set_row(r, vec_mul(to_qvec(k[r]), gamma_.gram));
    const QMat& h = lambda_.gram;
    QMat bt = b.transpose();
    QMat corr = scaled(h * bt * inverse(b * h * bt) * b, Rat(2));
    Reflection r;
    r.S = QMat::identity(n) - corr;
    r.integral = common_denominator(r.S) == 1;
    r.isometry = r.S * h * r.S.transpose() == h;
    r.involution = r.S * r.S == QMat::identity(n);
    if (r.integral) {
      IMat si = to_int_exact(r.S);
      r.preserves_minimal = std::all_of(minimal_.begin(), minimal_.end(), [&](const Vec& y) { return minimal_.count(vec_mul(y, si)) > 0; });
    }
    return r;
  }

 private:
  Lattice gamma_, lambda_;
  std::set<Vec> minimal_;
};

inline Reflection reflection_sK(const std::array<Vec, 3>& k, const Lattice& gamma) { return ReflectionContext(gamma).reflect(k); }

// least m <= max_order with (s1 s2)^m = 1, or 0
inline unsigned reflection_pair_order(const QMat& s1, const QMat& s2, unsigned max_order = 12) {
  QMat p = s1 * s2, acc = p, id = QMat::identity(p.rows);
  for (unsigned m = 1; m <= max_order; ++m, acc = acc * p)
    if (acc == id) return m;
  return 0;
}

}  // namespace sperf
