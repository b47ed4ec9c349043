#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sperf {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& p, const Int& q) {
  if (q == 0) throw std::domain_error("zero denominator");
  Rat r(p, q);
  r.canonicalize();
  return r;
}

inline Rat make_rat(long p, long q = 1) { return make_rat(Int(p), Int(q)); }

// "p/q", or "p" when q = 1
inline std::string to_string(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline std::string to_string(const Int& z) { return z.get_str(); }

inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational: " + s);
  }
}

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int floor(const Rat& r) { return floor_div(r.get_num(), r.get_den()); }
inline Int ceil(const Rat& r) { return ceil_div(r.get_num(), r.get_den()); }

// nearest integer, ties toward +infinity
inline Int round_nearest(const Rat& r) { return floor(r + make_rat(1, 2)); }

inline Rat rat_pow(const Rat& r, unsigned e) {
  Rat out = 1;
  for (unsigned i = 0; i < e; ++i) out *= r;
  return out;
}

inline Int int_pow(const Int& b, unsigned e) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), e);
  return out;
}

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline int64_t to_i64(const Int& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits");
  return z.get_si();
}

inline std::string to_string(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  std::string s;
  while (u) {
    s.insert(s.begin(), char('0' + int(u % 10)));
    u /= 10;
  }
  return neg ? "-" + s : s;
}

inline Int to_int(__int128 v) { return Int(to_string(v)); }
inline Int to_int(const Int& v) { return v; }

}  // namespace sperf
