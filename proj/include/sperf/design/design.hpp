#pragma once

#include "sperf/lattice/ops.hpp"

#include <array>
#include <map>
#include <thread>

namespace sperf {

struct Inapplicable : std::domain_error {
  explicit Inapplicable(const std::string& what) : std::domain_error("inapplicable: " + what) {}
};

// Half-system X of an antipodal set of vectors of common norm m.
struct DesignSet {
  Lattice ambient;
  std::vector<Vec> X;
  Rat m;
  Int s;

  DesignSet(Lattice l, std::vector<Vec> xs) : ambient(std::move(l)), X(std::move(xs)) {
    if (X.empty()) throw std::invalid_argument("design set must be nonempty");
    m = ambient.norm(X[0]);
    s = Int((unsigned long)X.size());
    std::vector<Vec> seen;
    for (auto& x : X) {
      if (x.size() != ambient.dim()) throw std::invalid_argument("vector length does not match lattice dimension");
      if (ambient.norm(x) != m) throw std::invalid_argument("vectors of a design set must have equal norm");
      Vec neg(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
      seen.push_back(x < neg ? x : neg);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw std::invalid_argument("design set contains x together with -x (or a repeat)");
  }

  std::size_t n() const { return ambient.dim(); }
  // (x, alpha) with alpha in ambient coordinates
  Rat inner(const Vec& x, const QVec& alpha) const { return bilinear(ambient.gram, to_qvec(x), alpha); }
};

inline std::vector<Vec> half_system(const std::vector<Vec>& shell) {
  std::vector<Vec> out;
  for (auto& v : shell)
    if (lex_positive(v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

inline DesignSet minimal_design_set(const Lattice& l) {
  return DesignSet(l, half_system(shortest_vectors(l).vectors));
}

inline Rat design_c2(const DesignSet& d) { return Rat(d.s) * d.m / Rat((unsigned long)d.n()); }
inline Rat design_c4(const DesignSet& d) {
  unsigned long n = d.n();
  return Rat(d.s) * d.m * d.m / Rat(n * (n + 2));
}

// sum_{x in X} prod_j (x, alpha_j)^{e_j}
inline Rat moments(const DesignSet& d, const std::vector<QVec>& alphas, const std::vector<unsigned>& exps) {
  if (alphas.size() != exps.size()) throw std::invalid_argument("one exponent per test vector");
  std::vector<QVec> ga;
  for (auto& a : alphas) ga.push_back(vec_mul(a, d.ambient.gram));
  Rat total = 0;
  for (auto& x : d.X) {
    Rat term = 1;
    for (std::size_t j = 0; j < ga.size(); ++j) {
      Rat ip = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) ip += ga[j][i] * x[i];
      term *= rat_pow(ip, exps[j]);
    }
    total += term;
  }
  return total;
}

inline Rat moments(const DesignSet& d, const QVec& alpha, unsigned e) {
  return moments(d, std::vector<QVec>{alpha}, std::vector<unsigned>{e});
}

struct MomentRow {
  QVec alpha;
  Rat sum2, sum4, predicted2, predicted4;
};

struct MomentReport {
  std::vector<MomentRow> rows;
  bool all_match() const {
    for (auto& r : rows)
      if (r.sum2 != r.predicted2 || r.sum4 != r.predicted4) return false;
    return true;
  }
};

inline MomentReport moment_report(const DesignSet& d, const std::vector<QVec>& alphas) {
  MomentReport rep;
  for (auto& a : alphas) {
    Rat aa = bilinear(d.ambient.gram, a, a);
    rep.rows.push_back({a, moments(d, a, 2), moments(d, a, 4), design_c2(d) * aa, 3 * design_c4(d) * aa * aa});
  }
  return rep;
}

// Degree-2 and degree-4 moment tensors of X in dual coordinates, scaled by
// den^2 and den^4 so that all entries are integers.
struct MomentTensors {
  std::size_t n = 0;
  Int den;
  std::vector<Int> t2;  // index i*n+j, i<=j
  std::vector<Int> t4;  // sorted slots i<=j<=k<=l in slot order
  std::vector<std::array<std::size_t, 4>> slots;
};

inline std::vector<std::array<std::size_t, 4>> quartic_slots(std::size_t n) {
  std::vector<std::array<std::size_t, 4>> s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) s.push_back({i, j, k, l});
  return s;
}

// chunked reduction over X; the sum does not depend on the chunking
inline MomentTensors moment_tensors(const DesignSet& d, unsigned threads = 1) {
  MomentTensors mt;
  std::size_t n = d.n();
  mt.n = n;
  auto [gi, den] = d.ambient.scaled_gram();
  mt.den = den;
  mt.slots = quartic_slots(n);
  std::vector<IVec> ys;
  for (auto& x : d.X) {
    IVec y(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (x[i])
        for (std::size_t j = 0; j < n; ++j) y[j] += gi(i, j) * x[i];
    ys.push_back(std::move(y));
  }
  threads = std::max(1u, std::min<unsigned>(threads, (unsigned)ys.size()));
  std::vector<std::vector<Int>> p2(threads, std::vector<Int>(n * n, 0)), p4(threads, std::vector<Int>(mt.slots.size(), 0));
  auto work = [&](unsigned c) {
    for (std::size_t r = c; r < ys.size(); r += threads) {
      const IVec& y = ys[r];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) p2[c][i * n + j] += y[i] * y[j];
      for (std::size_t q = 0; q < mt.slots.size(); ++q) {
        auto& s = mt.slots[q];
        p4[c][q] += y[s[0]] * y[s[1]] * y[s[2]] * y[s[3]];
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned c = 0; c < threads; ++c) pool.emplace_back(work, c);
    for (auto& t : pool) t.join();
  }
  mt.t2.assign(n * n, 0);
  mt.t4.assign(mt.slots.size(), 0);
  for (unsigned c = 0; c < threads; ++c) {
    for (std::size_t q = 0; q < n * n; ++q) mt.t2[q] += p2[c][q];
    for (std::size_t q = 0; q < mt.slots.size(); ++q) mt.t4[q] += p4[c][q];
  }
  return mt;
}

struct DesignVerdict {
  bool pass = true;
  unsigned t = 0;
  Int s;
  Rat m;
  Rat c2, c4;  // sm/n and sm^2/(n(n+2))
  std::optional<std::vector<std::size_t>> slot;
  std::optional<QVec> witness;
  Rat lhs, rhs;  // at the witness
};

namespace detail {

// first alpha (lex over {-2..2} on the given support) with f(alpha) != 0;
// a nonzero polynomial of degree <= 4 in each variable cannot vanish on it
template <class F>
std::optional<QVec> grid_witness(std::size_t n, std::vector<std::size_t> support, F&& violates) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  std::vector<int> c(support.size(), -2);
  while (true) {
    QVec a(n, Rat(0));
    bool nz = false;
    for (std::size_t i = 0; i < support.size(); ++i) {
      a[support[i]] = c[i];
      nz = nz || c[i] != 0;
    }
    if (nz && violates(a)) return a;
    std::size_t k = support.size();
    while (k > 0 && c[k - 1] == 2) c[--k] = -2;
    if (k == 0) return std::nullopt;
    ++c[k - 1];
  }
}

}  // namespace detail

// Exact check of the quadratic (t=2) or quartic (t=4) moment identity via moment tensors.
inline DesignVerdict is_design(const DesignSet& d, unsigned t, unsigned threads = 1) {
  if (t != 2 && t != 4) throw std::invalid_argument("t must be 2 or 4");
  DesignVerdict v;
  v.t = t;
  v.s = d.s;
  v.m = d.m;
  v.c2 = design_c2(d);
  v.c4 = design_c4(d);
  MomentTensors mt = moment_tensors(d, threads);
  const QMat& g = d.ambient.gram;
  std::size_t n = d.n();
  Rat den2 = Rat(mt.den * mt.den), den4 = den2 * den2;
  if (t == 2) {
    for (std::size_t i = 0; i < n && v.pass; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (Rat(mt.t2[i * n + j]) / den2 != v.c2 * g(i, j)) {
          v.pass = false;
          v.slot = std::vector<std::size_t>{i, j};
          break;
        }
  } else {
    for (std::size_t q = 0; q < mt.slots.size(); ++q) {
      auto [i, j, k, l] = mt.slots[q];
      Rat want = v.c4 * (g(i, j) * g(k, l) + g(i, k) * g(j, l) + g(i, l) * g(j, k));
      if (Rat(mt.t4[q]) / den4 != want) {
        v.pass = false;
        v.slot = std::vector<std::size_t>{i, j, k, l};
        break;
      }
    }
  }
  if (!v.pass) {
    auto eval = [&](const QVec& a, Rat& lhs, Rat& rhs) {
      Rat aa = bilinear(g, a, a);
      if (t == 2) {
        lhs = moments(d, a, 2);
        rhs = v.c2 * aa;
      } else {
        lhs = moments(d, a, 4);
        rhs = 3 * v.c4 * aa * aa;
      }
    };
    v.witness = detail::grid_witness(n, *v.slot, [&](const QVec& a) {
      Rat l, r;
      eval(a, l, r);
      return l != r;
    });
    if (!v.witness) throw std::logic_error("tensor mismatch without a grid witness");
    eval(*v.witness, v.lhs, v.rhs);
  }
  return v;
}

inline DesignVerdict strongly_perfect(const Lattice& l, unsigned threads = 1) {
  return is_design(minimal_design_set(l), 4, threads);
}

// Level sets of X u -X under x -> (x, alpha), keyed by the absolute value.
struct LevelSets {
  QVec alpha;
  std::map<Rat, std::vector<Vec>> levels;  // |(x,alpha)| -> members of X u -X
  std::map<Vec, Rat> value;                // signed value per member

  std::vector<Rat> values() const {
    std::vector<Rat> v;
    for (auto& [k, _] : levels) v.push_back(k);
    return v;
  }
  std::size_t full_count(const Rat& i) const {
    auto it = levels.find(abs(i));
    return it == levels.end() ? 0 : it->second.size();
  }
  // |{x in X : (x,alpha) = +-i}|
  std::size_t count(const Rat& i) const { return full_count(i) / 2; }
  // {x in X u -X : (x,alpha) = i}
  std::vector<Vec> signed_level(const Rat& i) const {
    std::vector<Vec> out;
    auto it = levels.find(abs(i));
    if (it == levels.end()) return out;
    for (auto& x : it->second)
      if (value.at(x) == i) out.push_back(x);
    return out;
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (auto& [_, v] : levels) t += v.size();
    return t;
  }
};

inline LevelSets level_sets(const DesignSet& d, const QVec& alpha) {
  LevelSets ls;
  ls.alpha = alpha;
  QVec ga = vec_mul(alpha, d.ambient.gram);
  for (auto& x : d.X) {
    Rat ip = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) ip += ga[i] * x[i];
    Vec neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    ls.levels[abs(ip)].push_back(x);
    ls.levels[abs(ip)].push_back(neg);
    ls.value[x] = ip;
    ls.value[neg] = -ip;
  }
  for (auto& [_, v] : ls.levels) std::sort(v.begin(), v.end());
  return ls;
}

struct LinkombVerdict {
  bool pass = false;
  Rat c;
  Rat expected_n2;  // c (alpha,alpha) / 2
  std::size_t n2 = 0;
  QVec sum;      // sum of N_2(alpha), ambient coordinates
  QVec c_alpha;  // c * alpha
};

// c = sm/(6n) (3m/(n+2) (alpha,alpha) - 1)
inline Rat linkomb_constant(const Int& s, const Rat& m, std::size_t n, const Rat& aa) {
  Rat nn((unsigned long)n);
  return Rat(s) * m / (6 * nn) * (3 * m / (nn + 2) * aa - 1);
}

inline LinkombVerdict linkomb_check(const DesignSet& d, const QVec& alpha) {
  LevelSets ls = level_sets(d, alpha);
  for (auto& [k, _] : ls.levels)
    if (k != 0 && k != 1 && k != 2) throw Inapplicable("(x,alpha) takes the value " + to_string(k));
  LinkombVerdict v;
  Rat aa = bilinear(d.ambient.gram, alpha, alpha);
  v.c = linkomb_constant(d.s, d.m, d.n(), aa);
  v.expected_n2 = v.c * aa / 2;
  auto n2 = ls.signed_level(2);
  v.n2 = n2.size();
  v.sum.assign(d.n(), Rat(0));
  for (auto& x : n2)
    for (std::size_t i = 0; i < x.size(); ++i) v.sum[i] += x[i];
  for (auto& a : alpha) v.c_alpha.push_back(v.c * a);
  v.pass = Rat((unsigned long)v.n2) == v.expected_n2 && v.sum == v.c_alpha;
  return v;
}

struct N2Bound {
  Rat bound;  // rm/(8-rm)
  Int floor;
};

inline N2Bound n2_bound(const Rat& m, const Rat& r) {
  Rat rm = r * m;
  if (rm >= 8) throw Inapplicable("r*m = " + to_string(rm) + " >= 8");
  Rat b = rm / (8 - rm);
  return {b, sperf::floor(b)};
}

inline N2Bound n2_bound(const DesignSet& d, const QVec& alpha) {
  return n2_bound(d.m, bilinear(d.ambient.gram, alpha, alpha));
}

struct Projected2DesignVerdict {
  bool pass = true;
  std::size_t size = 0;  // |N_1(alpha)|
  Rat norm;              // common norm of the projections
  Rat c;                 // |N_1| norm / (n-1)
  std::optional<QVec> witness;
  Rat lhs, rhs;
};

// Projects N_1(alpha) onto alpha-perp and checks the quadratic moment identity there.
inline Projected2DesignVerdict projected_2design(const DesignSet& d, const QVec& alpha) {
  LevelSets ls = level_sets(d, alpha);
  for (auto& [k, _] : ls.levels)
    if (k != 0 && k != 1) throw Inapplicable("(x,alpha) takes the value " + to_string(k));
  const QMat& g = d.ambient.gram;
  std::size_t n = d.n();
  Rat aa = bilinear(g, alpha, alpha);
  if (aa == 0) throw Inapplicable("alpha = 0");
  QVec ga = vec_mul(alpha, g);
  Projected2DesignVerdict v;
  std::vector<QVec> proj;
  for (auto& x : ls.signed_level(1)) {
    QVec p = to_qvec(x);
    for (std::size_t i = 0; i < n; ++i) p[i] -= alpha[i] / aa;
    proj.push_back(std::move(p));
  }
  v.size = proj.size();
  v.norm = d.m - 1 / aa;
  v.c = n > 1 ? Rat((unsigned long)v.size) * v.norm / Rat((unsigned long)(n - 1)) : Rat(0);
  // B(a,b) = sum (p,a)(p,b) - c (Pa,Pb); B vanishes on alpha by construction
  std::vector<QVec> ys;
  for (auto& p : proj) ys.push_back(vec_mul(p, g));
  auto form = [&](const QVec& a, const QVec& b, Rat& lhs, Rat& rhs) {
    lhs = 0;
    for (auto& y : ys) {
      Rat ya = 0, yb = 0;
      for (std::size_t i = 0; i < n; ++i) {
        ya += y[i] * a[i];
        yb += y[i] * b[i];
      }
      lhs += ya * yb;
    }
    Rat gab = bilinear(g, a, b), gaa = 0, gbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gaa += ga[i] * a[i];
      gbb += ga[i] * b[i];
    }
    rhs = v.c * (gab - gaa * gbb / aa);
  };
  auto unit = [&](std::size_t i) {
    QVec e(n, Rat(0));
    e[i] = 1;
    return e;
  };
  auto project = [&](const QVec& a) {
    Rat t = 0;
    for (std::size_t i = 0; i < n; ++i) t += ga[i] * a[i];
    QVec p = a;
    for (std::size_t i = 0; i < n; ++i) p[i] -= t / aa * alpha[i];
    return p;
  };
  for (std::size_t i = 0; i < n && v.pass; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Rat l, r;
      form(unit(i), unit(j), l, r);
      if (l == r) continue;
      v.pass = false;
      QVec cand[3] = {unit(i), unit(j), unit(i)};
      cand[2][j] += 1;
      for (auto& c : cand) {
        QVec p = project(c);
        form(p, p, v.lhs, v.rhs);
        if (v.lhs != v.rhs) {
          v.witness = p;
          break;
        }
      }
      if (!v.witness) throw std::logic_error("bilinear mismatch without a witness");
      break;
    }
  return v;
}

// Integrality consequences of the quartic identity for a lattice and dual generators.
struct IntegralityEntry {
  std::size_t i, j;     // generator indices (gamma = g_i, alpha = g_j)
  Rat value;            // (alpha,gamma) sm/(6n) (3m/(n+2)(alpha,alpha) - 1)
  bool integral;
  bool flagged;         // (g_i, g_j) not integral
  std::optional<Rat> lhs;  // (1/6) sum (x,gamma)(x,alpha)((x,alpha)^2-1), when X is known
};

struct IntegralityReport {
  Int s;
  Rat m;
  std::size_t n;
  std::vector<IntegralityEntry> mixed;   // (1/6) sum (x,g_i)(x,g_j)((x,g_j)^2-1)
  std::vector<IntegralityEntry> single;  // (1/12) sum (x,g_i)^2((x,g_i)^2-1)
  bool all_integral() const {
    for (auto& e : mixed)
      if (!e.integral) return false;
    for (auto& e : single)
      if (!e.integral) return false;
    return true;
  }
  std::size_t flagged() const {
    std::size_t c = 0;
    for (auto& e : mixed) c += e.flagged;
    return c;
  }
};

// Right-hand sides for parameters (s, m, n) and dual vectors with Gram h.
inline IntegralityReport integrality_values(const Int& s, const Rat& m, std::size_t n, const QMat& h) {
  IntegralityReport rep{s, m, n, {}, {}};
  Rat nn((unsigned long)n);
  for (std::size_t i = 0; i < h.rows; ++i)
    for (std::size_t j = 0; j < h.rows; ++j) {
      Rat val = h(i, j) * Rat(s) * m / (6 * nn) * (3 * m / (nn + 2) * h(j, j) - 1);
      rep.mixed.push_back({i, j, val, is_integer(val), !is_integer(h(i, j)), std::nullopt});
    }
  for (std::size_t i = 0; i < h.rows; ++i) {
    Rat val = Rat(s) * m / (12 * nn) * h(i, i) * (3 * m / (nn + 2) * h(i, i) - 1);
    rep.single.push_back({i, i, val, is_integer(val), !is_integer(h(i, i)), std::nullopt});
  }
  return rep;
}

// gens: generators of L* in dual-basis coordinates (identity = dual basis).
inline IntegralityReport integrality_constraints(const Lattice& l, const IMat& gens) {
  DesignSet d = minimal_design_set(l);
  QMat ginv = inverse(l.gram);
  QMat amb = to_rat(gens) * ginv;  // ambient coordinates
  QMat h = amb * l.gram * amb.transpose();
  IntegralityReport rep = integrality_values(d.s, d.m, d.n(), h);
  std::vector<QVec> alphas;
  for (std::size_t i = 0; i < amb.rows; ++i) alphas.push_back(amb.row(i));
  for (auto& e : rep.mixed)
    e.lhs = (moments(d, {alphas[e.i], alphas[e.j]}, {1, 3}) - moments(d, {alphas[e.i], alphas[e.j]}, {1, 1})) / 6;
  for (auto& e : rep.single) e.lhs = (moments(d, alphas[e.i], 4) - moments(d, alphas[e.i], 2)) / 12;
  return rep;
}

inline IntegralityReport integrality_constraints(const Lattice& l) {
  return integrality_constraints(l, IMat::identity(l.dim()));
}

// Divisibility facts forced on L* by the integrality constraints, for
// hypothetical parameters (s, m, n) when dual norms are forced integral.
struct ParametricFacts {
  Int norm_denominator;          // largest possible denominator of (alpha,alpha)
  Int modulus;                   // norms are restricted modulo this
  std::vector<Int> norm_residues;  // admissible (alpha,alpha) mod modulus
  Int inner_divisor;             // d | (alpha_1, alpha_2) for all pairs
  bool even() const {
    for (auto& r : norm_residues)
      if (r % 2 != 0 || modulus % 2 != 0) return false;
    return true;
  }
};

inline ParametricFacts parametric_integrality(const Int& s, const Rat& m, std::size_t n) {
  Rat nn((unsigned long)n);
  Rat c2 = Rat(s) * m / nn, c4 = 3 * Rat(s) * m * m / (nn * (nn + 2));
  ParametricFacts f;
  // c2 a and c4 a^2 integral: a = u/q needs q | num(c2) and q^2 | num(c4)
  Int q = 1;
  Int p2 = c2.get_num(), p4 = c4.get_num();
  for (Int t = 2; t <= abs(p2); ++t)
    if (p2 % t == 0 && p4 % (t * t) == 0) q = t;
  f.norm_denominator = q;
  if (q != 1) throw Inapplicable("dual norms are not forced integral");
  // E(a) = sm/(12n) a (3m/(n+2) a - 1) and F(b,a) = b sm/(6n)(3m/(n+2) a - 1)
  Rat e2 = Rat(s) * m / (12 * nn) * 3 * m / (nn + 2), e1 = -Rat(s) * m / (12 * nn);
  Rat f1 = Rat(s) * m / (6 * nn) * 3 * m / (nn + 2), f0 = -Rat(s) * m / (6 * nn);
  Int mod = lcm(lcm(e2.get_den(), e1.get_den()), lcm(f1.get_den(), f0.get_den()));
  f.modulus = mod;
  Int div = 0;
  for (Int a = 0; a < mod; ++a) {
    Rat ra(a);
    if (!is_integer(e2 * ra * ra + e1 * ra)) continue;
    f.norm_residues.push_back(a);
    Rat k = f1 * ra + f0;  // need b k integral
    Int need = k.get_den();
    div = gcd(div, need);
  }
  f.inner_divisor = div == 0 ? Int(1) : div;
  return f;
}

}  // namespace sperf
