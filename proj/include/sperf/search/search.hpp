#pragma once

#include "sperf/lattice/ops.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sperf {

enum class Tier { fast, slow };

inline std::string to_string(Tier t) { return t == Tier::fast ? "fast" : "slow"; }

inline Tier parse_tier(const std::string& s) {
  if (s == "fast") return Tier::fast;
  if (s == "slow") return Tier::slow;
  throw std::invalid_argument("unknown tier: " + s);
}

struct PruneRule {
  enum class Kind { min_at_least, dual_min_at_least };
  enum class Stage { per_row, final };
  Kind kind = Kind::min_at_least;
  Rat bound;
  Stage stage = Stage::final;

  static PruneRule min_at_least(Rat b, Stage s = Stage::per_row) { return {Kind::min_at_least, std::move(b), s}; }
  static PruneRule dual_min_at_least(Rat b, Stage s = Stage::final) {
    return {Kind::dual_min_at_least, std::move(b), s};
  }

  std::string str() const { return std::string(kind == Kind::min_at_least ? "min" : "dualmin") + ">=" + to_string(bound); }
};

// "min>=7/2" or "dualmin>=4/3"
inline PruneRule parse_prune(const std::string& s, PruneRule::Stage stage) {
  auto pos = s.find(">=");
  if (pos == std::string::npos) throw std::invalid_argument("prune rule needs '>=': " + s);
  std::string k = s.substr(0, pos);
  PruneRule r;
  if (k == "min")
    r.kind = PruneRule::Kind::min_at_least;
  else if (k == "dualmin")
    r.kind = PruneRule::Kind::dual_min_at_least;
  else
    throw std::invalid_argument("unknown prune kind: " + k);
  r.bound = parse_rat(s.substr(pos + 2));
  r.stage = stage;
  return r;
}

// exact evaluation, with early abort on the first short vector
inline bool satisfies(const Lattice& l, const PruneRule& r) {
  const Lattice& target = r.kind == PruneRule::Kind::min_at_least ? l : dual(l);
  return !ShortVectorEngine(target).find_below(r.bound).has_value();
}

inline std::vector<Lattice> filter(const std::vector<Lattice>& in, const PruneRule& r) {
  std::vector<Lattice> out;
  for (auto& l : in)
    if (satisfies(l, r)) out.push_back(l);
  return out;
}

struct SearchSpec {
  Lattice base;
  long p = 2;
  std::size_t corank = 1;  // 1: hyperplane scan; dim - 1: row-by-row HNF scheme
  std::vector<PruneRule> prune;
  Tier tier = Tier::fast;
  Vec prefix;  // fixed leading functional coordinates (slice)
  unsigned threads = 1;
  std::string checkpoint;  // JSONL file of completed partitions, empty for none
};

// A surviving sublattice {x : f.x = 0 mod p}, f normalized to first nonzero = 1.
struct Survivor {
  Vec functional;
  bool operator==(const Survivor& o) const { return functional == o.functional; }
  bool operator<(const Survivor& o) const { return functional < o.functional; }
};

struct SearchResult {
  std::uint64_t candidates = 0;
  std::uint64_t pruned = 0;
  std::uint64_t nodes = 0;
  std::vector<Survivor> survivors;
  std::size_t partitions = 0;
  std::size_t resumed = 0;  // partitions taken from the checkpoint
};

inline std::uint64_t projective_count(long p, std::size_t n) {
  std::uint64_t q = 1, s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += q;
    q *= (std::uint64_t)p;
  }
  return s;
}

inline Vec normalize_functional(Vec f, long p) {
  for (auto& c : f) c = ((c % p) + p) % p;
  for (auto c : f)
    if (c) {
      long inv = inv_mod(c, p);
      for (auto& e : f) e = e * inv % p;
      break;
    }
  return f;
}

inline IMat survivor_rows(const Survivor& s, long p) { return hyperplane_kernel_rows(s.functional, p); }

inline Lattice survivor_lattice(const Lattice& base, const Survivor& s, long p) {
  return sublattice(base, survivor_rows(s, p));
}

namespace detail {

// Vectors of norm < bound, up to sign, reduced mod p.  A hyperplane kernel
// has minimum >= bound iff no residue lies in it.
struct ResidueSet {
  std::vector<std::vector<long>> res;
  bool always_fails = false;  // some short vector lies in p * base
  bool exact_fallback = false;
  Rat bound;

  ResidueSet(const Lattice& base, const Rat& b, long p, std::size_t cap = 2000000) : bound(b) {
    ShortVectorEngine e(base);
    std::size_t seen = 0;
    bool complete = e.for_each_up_to(b, true, [&](const Vec& v, const Rat&) {
      if (++seen > cap) return false;
      if (!lex_positive(v)) return true;
      std::vector<long> r(v.size());
      bool zero = true;
      for (std::size_t i = 0; i < v.size(); ++i) {
        r[i] = ((v[i] % p) + p) % p;
        zero &= r[i] == 0;
      }
      if (zero)
        always_fails = true;
      else
        res.push_back(std::move(r));
      return true;
    });
    if (!complete) {
      exact_fallback = true;
      res.clear();
    }
  }

  bool in_kernel(const std::vector<long>& r, const Vec& f, long p) const {
    long s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * f[i];
    return s % p == 0;
  }

  bool passes(const Lattice& base, const Vec& f, long p) const {
    if (always_fails) return false;
    if (exact_fallback) return satisfies(sublattice(base, hyperplane_kernel_rows(f, p)), PruneRule::min_at_least(bound));
    for (auto& r : res)
      if (in_kernel(r, f, p)) return false;
    return true;
  }
};

// Some x with Q(x + shift) <= bound accepted by `exact`, searched in
// Schnorr-Euchner zig-zag order so that close candidates come first.
template <class F>
bool closest_below(const FloatGso& g, long double bound, const std::vector<long double>& shift, F&& exact) {
  const std::size_t n = g.n;
  if (n == 0) return false;
  Vec x(n, 0), dx(n, 0), ddx(n, 0);
  std::vector<long double> c(n, 0), rho(n + 1, 0), y(n, 0);
  auto center = [&](std::size_t k) {
    long double v = -shift[k];
    for (std::size_t j = k + 1; j < n; ++j) v -= g.mu[j][k] * y[j];
    return v;
  };
  auto start = [&](std::size_t k) {
    c[k] = center(k);
    x[k] = (int64_t)std::nearbyint(c[k]);
    dx[k] = ddx[k] = c[k] >= (long double)x[k] ? 1 : -1;
  };
  std::size_t k = n - 1;
  start(k);
  while (true) {
    long double t = (long double)x[k] - c[k];
    long double r = rho[k + 1] + t * t * g.b[k];
    if (r <= bound) {
      y[k] = (long double)x[k] + shift[k];
      if (k == 0) {
        if (exact(x)) return true;
      } else {
        rho[k] = r;
        --k;
        start(k);
        continue;
      }
    } else {
      if (++k == n) return false;
    }
    x[k] += dx[k];
    ddx[k] = -ddx[k];
    dx[k] = ddx[k] - dx[k];
  }
}

// The dual of {x : f.x = 0 mod p} is base* + Z f/p in dual coordinates, so
// its minimum is at least b iff min(base*) >= b and no coset base* + k f/p
// (0 < k <= p/2) meets the open ball of norm b.  Each coset is searched by
// shifted enumeration; floats only propose, every hit is checked exactly.
struct CosetChecker {
  Rat bound;
  long p;
  Int d;
  IMat hi;  // d * base^{-1}, integral
  IMat t;   // reduced basis of the dual, t * hi * t^T = q
  std::vector<std::vector<long double>> tinv;
  FloatGso gso;
  bool always_fails = false;
  bool small = false;
  std::vector<long> hi64, t64;
  Int limit;  // ceil(p^2 d bound)
  __int128 limit128 = 0;
  long double fb = 0;

  CosetChecker(const Lattice& base, const Rat& b, long prime) : bound(b), p(prime) {
    QMat h = inverse(base.gram);
    d = common_denominator(h);
    hi = to_int_exact(scaled(h, Rat(d)));
    LllResult r = lll_gram(hi);
    t = r.t;
    IMat ti = inverse_unimodular(t);
    std::size_t n = hi.rows;
    tinv.assign(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) tinv[i][j] = ti(i, j).get_d();
    gso = FloatGso(r.gram);
    limit = ceil(bound * Rat(d) * Rat(p * p));
    fb = Rat(bound * Rat(d)).get_d() * (1 + 1e-9L) + 1e-9L;
    // fixed-width path when entries are small (coordinates stay far below 2^20)
    Int lim = Int(1) << 24;
    small = true;
    for (auto& e : hi.a) small &= abs(e) < lim;
    for (auto& e : t.a) small &= abs(e) < lim;
    small &= abs(limit) < (Int(1) << 100);
    if (small) {
      limit128 = detail::from_int<__int128>(limit);
      for (auto& e : hi.a) hi64.push_back(e.get_si());
      for (auto& e : t.a) t64.push_back(e.get_si());
    }
    always_fails = ShortVectorEngine(Lattice(h)).find_below(b).has_value();
  }

  // p^2 d * norm(y + k f / p) < p^2 d * bound
  bool below(const Vec& x, const Vec& f, long k) const {
    std::size_t n = hi.rows;
    bool fits = small;
    for (auto c : x) fits &= c < (1 << 20) && c > -(1 << 20);
    if (fits) {
      std::vector<__int128> z(n);
      for (std::size_t j = 0; j < n; ++j) {
        __int128 s = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (x[i]) s += (__int128)x[i] * t64[i * n + j];
        z[j] = s * p + k * f[j];
      }
      __int128 acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!z[i]) continue;
        __int128 row = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (z[j]) row += hi64[i * n + j] * z[j];
        acc += row * z[i];
      }
      return acc < limit128;
    }
    IVec z(n);
    for (std::size_t j = 0; j < n; ++j) {
      Int s = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (x[i]) s += Int((long)x[i]) * t(i, j);
      z[j] = s * p + Int(k * f[j]);
    }
    Int acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i] == 0) continue;
      Int row = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (z[j] != 0) row += hi(i, j) * z[j];
      acc += row * z[i];
    }
    return acc < limit;
  }

  // false when some coset vector of norm < bound is found
  bool passes(const Vec& f) const {
    if (always_fails) return false;
    std::size_t n = hi.rows;
    for (long k = 1; k <= p / 2; ++k) {
      std::vector<long double> shift(n, 0);
      for (std::size_t j = 0; j < n; ++j) {
        long double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (f[i]) s += (long double)(k * f[i]) / p * tinv[i][j];
        shift[j] = s;
      }
      bool hit = closest_below(gso, fb, shift, [&](const Vec& x) { return below(x, f, k); });
      if (hit) return false;
    }
    return true;
  }
};

struct RuleSet {
  std::vector<ResidueSet> mins_row, mins_final;
  std::vector<CosetChecker> duals;
  std::vector<PruneRule> dual_rules;

  RuleSet(const SearchSpec& spec, bool allow_row_dual) {
    for (auto& r : spec.prune) {
      if (r.kind == PruneRule::Kind::min_at_least) {
        (r.stage == PruneRule::Stage::per_row ? mins_row : mins_final).emplace_back(spec.base, r.bound, spec.p);
      } else {
        if (r.stage == PruneRule::Stage::per_row && !allow_row_dual)
          throw std::invalid_argument("per-row pruning supports min rules only");
        duals.emplace_back(spec.base, r.bound, spec.p);
        dual_rules.push_back(r);
      }
    }
  }

  bool final_passes(const Lattice& base, const Vec& f, long p) const {
    for (auto& m : mins_final)
      if (!m.passes(base, f, p)) return false;
    if (duals.empty()) return true;
    for (auto& c : duals)
      if (!c.passes(f)) return false;
    // certify the float verdict exactly
    Lattice sub = sublattice(base, hyperplane_kernel_rows(f, p));
    for (auto& r : dual_rules)
      if (!satisfies(sub, r)) return false;
    return true;
  }
};

struct PartitionOutcome {
  std::uint64_t candidates = 0, nodes = 0;
  std::vector<Survivor> survivors;
  bool done = false;
};

inline std::string spec_key(const SearchSpec& s, const std::string& scheme) {
  std::ostringstream o;
  o << scheme << ";p=" << s.p << ";corank=" << s.corank << ";gram=";
  for (auto& e : s.base.gram.a) o << e.get_str() << ",";
  o << ";prune=";
  for (auto& r : s.prune) o << r.str() << (r.stage == PruneRule::Stage::per_row ? "@row" : "@final") << ",";
  o << ";prefix=";
  for (auto c : s.prefix) o << c << ",";
  return o.str();
}

// Runs every partition once, resuming from and appending to the checkpoint.
// Results are merged in partition order, so they do not depend on threads.
template <class Work>
SearchResult run_partitions(const SearchSpec& spec, const std::string& key, std::size_t count, Work&& work) {
  std::vector<PartitionOutcome> out(count);
  SearchResult res;
  res.partitions = count;
  std::unique_ptr<std::ofstream> log;
  std::mutex mu;
  if (!spec.checkpoint.empty()) {
    std::ifstream in(spec.checkpoint);
    bool header = false;
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      if (j.at("kind") == "header") {
        if (j.at("key") != key) throw std::invalid_argument("checkpoint belongs to a different search");
        header = true;
        continue;
      }
      std::size_t id = j.at("partition");
      if (id >= count) throw std::invalid_argument("checkpoint partition out of range");
      auto& o = out[id];
      o.candidates = j.at("candidates");
      o.nodes = j.at("nodes");
      for (auto& f : j.at("survivors")) o.survivors.push_back(Survivor{f.get<Vec>()});
      o.done = true;
      ++res.resumed;
    }
    log = std::make_unique<std::ofstream>(spec.checkpoint, std::ios::app);
    if (!header) *log << nlohmann::json{{"kind", "header"}, {"key", key}}.dump() << "\n" << std::flush;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t id = next++;
      if (id >= count) return;
      if (out[id].done) continue;
      PartitionOutcome o = work(id);
      o.done = true;
      if (log) {
        nlohmann::json fs = nlohmann::json::array();
        for (auto& s : o.survivors) fs.push_back(s.functional);
        std::lock_guard<std::mutex> g(mu);
        *log << nlohmann::json{{"kind", "partition"},
                               {"partition", id},
                               {"candidates", o.candidates},
                               {"nodes", o.nodes},
                               {"survivors", fs}}
                    .dump()
             << "\n"
             << std::flush;
      }
      out[id] = std::move(o);
    }
  };
  unsigned th = std::max(1u, spec.threads);
  if (th == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < th; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& o : out) {
    res.candidates += o.candidates;
    res.nodes += o.nodes;
    for (auto& s : o.survivors) res.survivors.push_back(s);
  }
  res.pruned = res.candidates - res.survivors.size();
  return res;
}

}  // namespace detail

// One candidate per hyperplane kernel of base / p base; rules are applied to
// the full kernel (a single row, so per-row and final coincide).
inline SearchResult index_p_sublattices(const SearchSpec& spec) {
  if (spec.corank != 1) throw std::invalid_argument("index_p_sublattices needs corank 1");
  if (!is_prime(spec.p)) throw NotPrime(spec.p);
  std::size_t n = spec.base.dim();
  long p = spec.p;
  if (spec.prefix.size() > n) throw std::invalid_argument("prefix longer than dimension");
  detail::RuleSet rules(spec, true);

  // partition: leading index k and up to two following coordinates
  struct Part {
    std::size_t lead;
    Vec fixed;
  };
  std::vector<Part> parts;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t m = std::min<std::size_t>(2, n - 1 - k);
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= (std::size_t)p;
    for (std::size_t c = 0; c < total; ++c) {
      Vec fx(m);
      std::size_t r = c;
      for (std::size_t i = m; i-- > 0;) {
        fx[i] = (long)(r % (std::size_t)p);
        r /= (std::size_t)p;
      }
      parts.push_back({k, fx});
    }
  }

  auto work = [&](std::size_t id) {
    detail::PartitionOutcome o;
    const Part& pt = parts[id];
    Vec f(n, 0);
    std::vector<bool> fixed(n, false);
    for (std::size_t i = 0; i <= pt.lead; ++i) fixed[i] = true;
    f[pt.lead] = 1;
    for (std::size_t i = 0; i < pt.fixed.size(); ++i) {
      f[pt.lead + 1 + i] = pt.fixed[i];
      fixed[pt.lead + 1 + i] = true;
    }
    for (std::size_t i = 0; i < spec.prefix.size(); ++i) {
      long want = ((spec.prefix[i] % p) + p) % p;
      if (fixed[i]) {
        if (f[i] != want) return o;
      } else {
        f[i] = want;
        fixed[i] = true;
      }
    }
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i)
      if (!fixed[i]) free.push_back(i);
    while (true) {
      ++o.candidates;
      ++o.nodes;
      bool ok = true;
      for (auto& m : rules.mins_row)
        if (!m.passes(spec.base, f, p)) {
          ok = false;
          break;
        }
      if (ok && rules.final_passes(spec.base, f, p)) o.survivors.push_back(Survivor{f});
      std::size_t i = free.size();
      while (i > 0) {
        --i;
        if (++f[free[i]] < p) break;
        f[free[i]] = 0;
        if (i == 0) return o;
      }
      if (free.empty()) return o;
    }
  };
  return detail::run_partitions(spec, detail::spec_key(spec, "index"), parts.size(), work);
}

// Hyperplanes W = {x : x_c = sum_{i<c} a_i x_i mod p} in the parametrization
// by reduced row echelon matrices: rows e_i + a_i e_c (i < c) followed by the
// unit rows e_j (j > c).  Rows are added in order and a branch continues only
// while p*base plus the rows so far satisfies every per-row rule.  The slice
// prefix fixes a_0, a_1, ...
inline SearchResult hnf_pruned_search(const SearchSpec& spec) {
  std::size_t n = spec.base.dim();
  if (n < 2 || spec.corank + 1 != n) throw std::invalid_argument("hnf_pruned_search needs corank dim - 1");
  if (!is_prime(spec.p)) throw NotPrime(spec.p);
  long p = spec.p;
  detail::RuleSet rules(spec, false);
  std::size_t m = spec.prefix.size();

  // residues reduced to per-column check lists: level -1 is the root
  struct Check {
    std::vector<std::pair<std::size_t, long>> terms;  // (i, s_i), i < c
    long sc;
  };
  struct Plan {
    std::vector<std::vector<Check>> at;  // at[level + 1]
  };
  std::vector<Plan> plans(n);
  bool always = false;
  for (auto& rs : rules.mins_row) {
    if (rs.exact_fallback) throw std::invalid_argument("per-row bound admits too many short vectors");
    always |= rs.always_fails;
  }
  for (std::size_t c = 0; c < n; ++c) {
    plans[c].at.assign(c + 1, {});
    for (auto& rs : rules.mins_row)
      for (auto& r : rs.res) {
        long maxj = -1;
        bool beyond = false;
        Check ch;
        ch.sc = r[c];
        for (std::size_t i = 0; i < n; ++i) {
          if (i == c || r[i] == 0) continue;
          if (i < c) {
            ch.terms.push_back({i, r[i]});
            maxj = (long)i;
          } else {
            beyond = true;
          }
        }
        if (ch.terms.empty() && !beyond && ch.sc != 0) continue;  // multiple of e_c: never in W
        long level = beyond ? (long)c - 1 : maxj;
        plans[c].at[(std::size_t)(level + 1)].push_back(std::move(ch));
      }
  }

  struct Part {
    std::size_t c;
    Vec fixed;  // a_0 .. a_{k-1}
  };
  std::vector<Part> parts;
  for (std::size_t c = 0; c < n; ++c) {
    if (c < m) continue;
    std::size_t k = std::min<std::size_t>(c, std::max<std::size_t>(2, m));
    std::size_t extra = k > m ? k - m : 0, total = 1;
    for (std::size_t i = 0; i < extra; ++i) total *= (std::size_t)p;
    for (std::size_t t = 0; t < total; ++t) {
      Vec fx(k);
      for (std::size_t i = 0; i < m; ++i) fx[i] = ((spec.prefix[i] % p) + p) % p;
      std::size_t r = t;
      for (std::size_t i = k; i-- > m;) {
        fx[i] = (long)(r % (std::size_t)p);
        r /= (std::size_t)p;
      }
      parts.push_back({c, fx});
    }
  }

  auto work = [&](std::size_t id) {
    detail::PartitionOutcome o;
    const Part& pt = parts[id];
    std::size_t c = pt.c, k0 = pt.fixed.size();
    const Plan& plan = plans[c];
    std::uint64_t span = 1;
    for (std::size_t i = k0; i < c; ++i) span *= (std::uint64_t)p;
    o.candidates = span;
    if (always) return o;
    std::vector<long> a(c, 0);
    auto passes = [&](long level) {
      for (auto& ch : plan.at[(std::size_t)(level + 1)]) {
        long s = 0;
        for (auto& [i, v] : ch.terms) s += a[i] * v;
        if ((s - ch.sc) % p == 0) return false;
      }
      return true;
    };
    auto leaf = [&] {
      Vec f(n, 0);
      for (std::size_t i = 0; i < c; ++i) f[i] = (p - a[i]) % p;
      f[c] = 1;
      f = normalize_functional(f, p);
      if (rules.final_passes(spec.base, f, p)) o.survivors.push_back(Survivor{f});
    };
    ++o.nodes;
    if (!passes(-1)) return o;
    for (std::size_t i = 0; i < k0; ++i) {
      a[i] = pt.fixed[i];
      ++o.nodes;
      if (!passes((long)i)) return o;
    }
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == c) {
        leaf();
        return;
      }
      for (long v = 0; v < p; ++v) {
        a[i] = v;
        ++o.nodes;
        if (passes((long)i)) rec(i + 1);
      }
    };
    rec(k0);
    std::sort(o.survivors.begin(), o.survivors.end());
    return o;
  };
  return detail::run_partitions(spec, detail::spec_key(spec, "hnf"), parts.size(), work);
}

}  // namespace sperf
