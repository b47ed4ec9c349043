#pragma once

#include "sperf/lattice/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sperf {

struct Shell {
  Rat norm;
  std::vector<Vec> vectors;
};

namespace detail {

inline __int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline Int floor_div(const Int& a, const Int& b) { return sperf::floor_div(a, b); }

inline __int128 exact_div(__int128 a, __int128 b) { return a / b; }
inline Int exact_div(const Int& a, const Int& b) {
  Int q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

template <class Z>
Z from_int(const Int& v) {
  if constexpr (std::is_same_v<Z, Int>) {
    return v;
  } else {
    Int hi = v >> 64;
    Int lo = v - (hi << 64);
    return (__int128)hi.get_si() * ((__int128)1 << 64) + (__int128)(unsigned long)lo.get_ui();
  }
}

inline Int isqrt(const Int& v) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

}  // namespace detail

// Fincke-Pohst enumeration in exact integer arithmetic.  With A_0 = Q and the
// Bareiss recurrence A_{k+1} = (A_k[k][k] A_k - A_k[.][k] A_k[k][.]) / d_{k-1},
// the partial form W_k = d_{k-1} Q_k(x_k, ..., x_{n-1}) is an integer and
// W_k = a x_k^2 + 2 b x_k + c with a = A_k[k][k], b = sum_{j>k} A_k[k][j] x_j,
// c = (b^2 + d_{k-1} W_{k+1}) / a.  Level k is feasible iff W_k <= d_{k-1} B.
template <class Z>
class ExactFinckePohst {
 public:
  ExactFinckePohst(const std::vector<std::vector<Int>>& rows, const std::vector<Int>& dprev, const Int& bound)
      : n_(rows.size()), x_(n_, 0), w_(n_ + 1, Z(0)) {
    p_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      p_[k].resize(n_);
      for (std::size_t j = k; j < n_; ++j) p_[k][j] = detail::from_int<Z>(rows[k][j]);
      dprev_.push_back(detail::from_int<Z>(dprev[k]));
      t_.push_back(detail::from_int<Z>(dprev[k] * bound));
    }
  }

  // cb(x, Q(x)) -> false stops the enumeration; returns false if stopped
  template <class F>
  bool run(F&& cb) {
    if (n_ == 0) return true;
    return rec(n_ - 1, cb);
  }

 private:
  template <class F>
  bool rec(std::size_t k, F& cb) {
    const Z& a = p_[k][k];
    Z b = 0;
    for (std::size_t j = k + 1; j < n_; ++j)
      if (x_[j]) b += p_[k][j] * Z(x_[j]);
    Z c = detail::exact_div(b * b + dprev_[k] * w_[k + 1], a);
    const Z& T = t_[k];
    Z x0 = detail::floor_div(Z(-2) * b + a, Z(2) * a);
    auto f = [&](const Z& xx) { return (a * xx + Z(2) * b) * xx + c; };
    if (f(x0) > T) return true;
    for (int dir = 0; dir < 2; ++dir) {
      Z xx = dir == 0 ? x0 : x0 - Z(1);
      while (true) {
        Z v = f(xx);
        if (v > T) break;
        x_[k] = static_cast<int64_t>(to_long(xx));
        w_[k] = v;
        if (k == 0) {
          bool nonzero = false;
          for (auto e : x_)
            if (e) {
              nonzero = true;
              break;
            }
          if (nonzero && !cb(x_, v)) return false;
        } else if (!rec(k - 1, cb)) {
          return false;
        }
        if (dir == 0)
          xx += Z(1);
        else
          xx -= Z(1);
      }
    }
    x_[k] = 0;
    return true;
  }

  static long to_long(const __int128& v) { return (long)v; }
  static long to_long(const Int& v) { return v.get_si(); }

  std::size_t n_;
  std::vector<std::vector<Z>> p_;
  std::vector<Z> dprev_, t_;
  Vec x_;
  std::vector<Z> w_;
};

struct BareissRows {
  std::vector<std::vector<Int>> rows;  // rows[k][j] = A_k[k][j], j >= k
  std::vector<Int> dprev;              // d_{k-1}
};

inline BareissRows bareiss_rows(const IMat& q) {
  std::size_t n = q.rows;
  BareissRows br;
  br.rows.assign(n, std::vector<Int>(n));
  br.dprev.assign(n, Int(1));
  IMat a = q;
  Int prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k; j < n; ++j) br.rows[k][j] = a(k, j);
    br.dprev[k] = prev;
    if (a(k, k) <= 0) throw NotPositiveDefinite();
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = a(k, k);
  }
  return br;
}

// True when every intermediate of the exact enumeration below `bound` fits
// comfortably in 128 bits.
inline bool fits_int128(const IMat& q, const BareissRows& br, const Int& bound) {
  std::size_t n = q.rows;
  QMat inv = inverse(q);
  std::vector<Int> X(n);
  for (std::size_t j = 0; j < n; ++j) X[j] = detail::isqrt(floor(inv(j, j) * bound)) + 2;
  Int limit = Int(1) << 120;
  for (std::size_t k = 0; k < n; ++k) {
    const Int& a = br.rows[k][k];
    Int bmax = 0;
    for (std::size_t j = k + 1; j < n; ++j) bmax += abs(br.rows[k][j]) * X[j];
    Int terms[] = {bmax * bmax, a * X[k] * X[k], br.dprev[k] * a * (bound + 1), 2 * bmax * X[k] + a * X[k] * X[k]};
    for (auto& t : terms)
      if (abs(t) * 16 >= limit) return false;
  }
  return true;
}

// All nonzero x with x Q x^T <= bound; cb(x, value) returns false to stop.
template <class F>
bool enumerate_exact(const IMat& q, const Int& bound, F&& cb) {
  if (bound < 0) return true;
  BareissRows br = bareiss_rows(q);
  if (fits_int128(q, br, bound)) {
    ExactFinckePohst<__int128> e(br.rows, br.dprev, bound);
    return e.run([&](const Vec& x, const __int128& v) { return cb(x, to_int(v)); });
  }
  ExactFinckePohst<Int> e(br.rows, br.dprev, bound);
  return e.run([&](const Vec& x, const Int& v) { return cb(x, v); });
}

// Floating-point Gram-Schmidt data, used only to propose candidates.
struct FloatGso {
  std::size_t n = 0;
  std::vector<long double> b;
  std::vector<std::vector<long double>> mu;  // mu[i][j], j < i

  FloatGso() = default;
  explicit FloatGso(const IMat& q) : n(q.rows), b(n), mu(n, std::vector<long double>(n, 0)) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        long double s = q(i, j).get_d();
        for (std::size_t k = 0; k < j; ++k) s -= mu[j][k] * mu[i][k] * b[k];
        mu[i][j] = s / b[j];
      }
      long double s = q(i, i).get_d();
      for (std::size_t k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * b[k];
      b[i] = s;
    }
  }
};

// Schnorr-Euchner style enumeration of x with Q(x + shift) <= bound
// (shift may be empty).  cb(x) returns false to stop.
template <class F>
bool enumerate_float(const FloatGso& g, long double bound, const std::vector<long double>& shift, F&& cb,
                     bool skip_zero = true) {
  std::size_t n = g.n;
  if (n == 0) return true;
  Vec x(n, 0);
  std::vector<long double> rho(n + 1, 0), y(n, 0);
  bool has_shift = !shift.empty();
  std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
    long double c = has_shift ? -shift[k] : 0;
    for (std::size_t j = k + 1; j < n; ++j) c -= g.mu[j][k] * y[j];
    long double x0 = std::nearbyint(c);
    long double rest = bound - rho[k + 1];
    if (rest < 0) return true;
    for (int dir = 0; dir < 2; ++dir) {
      long double xx = dir == 0 ? x0 : x0 - 1;
      while (true) {
        long double t = xx - c;
        long double r = rho[k + 1] + t * t * g.b[k];
        if (r > bound) break;
        x[k] = (int64_t)xx;
        y[k] = xx + (has_shift ? shift[k] : 0);
        rho[k] = r;
        if (k == 0) {
          bool zero = skip_zero && std::all_of(x.begin(), x.end(), [](int64_t e) { return e == 0; });
          if (!zero && !cb(x)) return false;
        } else if (!rec(k - 1)) {
          return false;
        }
        xx += dir == 0 ? 1 : -1;
      }
    }
    x[k] = 0;
    y[k] = has_shift ? shift[k] : 0;
    return true;
  };
  return rec(n - 1);
}

inline Int quad_int(const IMat& q, const Vec& x) {
  Int s = 0;
  for (std::size_t i = 0; i < q.rows; ++i) {
    if (!x[i]) continue;
    Int t = 0;
    for (std::size_t j = 0; j < q.cols; ++j)
      if (x[j]) t += q(i, j) * Int((long)x[j]);
    s += t * Int((long)x[i]);
  }
  return s;
}

inline bool lex_less(const Vec& a, const Vec& b) { return a < b; }

// Shell enumeration for a fixed lattice: exact LLL once, then exact
// Fincke-Pohst per query.
class ShortVectorEngine {
 public:
  explicit ShortVectorEngine(const QMat& gram) {
    Int d = common_denominator(gram);
    IMat gi = to_int_exact(scaled(gram, Rat(d)));
    LllResult r = lll_gram(gi);
    q_ = r.gram;
    t_ = r.t;
    d_ = d;
    gso_ = FloatGso(q_);
  }
  explicit ShortVectorEngine(const Lattice& l) : ShortVectorEngine(l.gram) {}

  std::size_t dim() const { return q_.rows; }
  const IMat& reduced_gram() const { return q_; }
  const IMat& transform() const { return t_; }
  const Int& scale() const { return d_; }

  Vec to_original(const Vec& x) const {
    Vec v(dim(), 0);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!x[i]) continue;
      for (std::size_t j = 0; j < dim(); ++j) v[j] += x[i] * t_(i, j).get_si();
    }
    return v;
  }

  Int int_bound(const Rat& bound, bool strict) const {
    Rat s = bound * d_;
    return strict ? ceil(s) - 1 : floor(s);
  }

  // nonzero vectors with norm <= bound (< when strict), lexicographically sorted
  std::vector<Vec> vectors_up_to(const Rat& bound, bool strict = false) const {
    std::vector<Vec> out;
    enumerate_exact(q_, int_bound(bound, strict), [&](const Vec& x, const Int&) {
      out.push_back(to_original(x));
      return true;
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  // vectors with norms, unsorted, reduced coordinates
  template <class F>
  bool for_each_up_to(const Rat& bound, bool strict, F&& cb) const {
    return enumerate_exact(q_, int_bound(bound, strict), [&](const Vec& x, const Int& v) {
      return cb(to_original(x), Rat(v) / Rat(d_));
    });
  }

  // some nonzero vector of norm < bound; the float pass only proposes,
  // every answer is exact
  std::optional<Vec> find_below(const Rat& bound) const {
    Int ib = int_bound(bound, true);
    if (ib < 0) return std::nullopt;
    std::optional<Vec> hit;
    long double fb = ib.get_d() * (1 + 1e-12L) + 1e-9L;
    enumerate_float(gso_, fb, {}, [&](const Vec& x) {
      if (quad_int(q_, x) <= ib) {
        hit = x;
        return false;
      }
      return true;
    });
    if (!hit) {
      enumerate_exact(q_, ib, [&](const Vec& x, const Int&) {
        hit = x;
        return false;
      });
    }
    if (hit) return to_original(*hit);
    return std::nullopt;
  }

  Rat minimum() const {
    Int best = q_(0, 0);
    for (std::size_t i = 1; i < dim(); ++i) best = std::min(best, Int(q_(i, i)));
    enumerate_exact(q_, best, [&](const Vec&, const Int& v) {
      if (v < best) best = v;
      return true;
    });
    return Rat(best) / Rat(d_);
  }

  Shell shell(const Rat& a) const {
    Shell s{a, {}};
    Rat ad = a * d_;
    if (!is_integer(ad)) return s;
    Int target = ad.get_num();
    enumerate_exact(q_, target, [&](const Vec& x, const Int& v) {
      if (v == target) s.vectors.push_back(to_original(x));
      return true;
    });
    std::sort(s.vectors.begin(), s.vectors.end());
    return s;
  }

  Shell shortest() const { return shell(minimum()); }

 private:
  IMat q_, t_;
  Int d_;
  FloatGso gso_;
};

}  // namespace sperf
