#include "oracles.hpp"

#include "sperf/exact/linalg.hpp"

#include <gtest/gtest.h>

using namespace sperf;

namespace {

bool is_hnf(const HnfResult& r) {
  const IMat& h = r.h;
  for (std::size_t i = 0; i < r.rank; ++i) {
    std::size_t c = r.pivots[i];
    if (h(i, c) <= 0) return false;
    for (std::size_t j = 0; j < c; ++j)
      if (h(i, j) != 0) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (h(k, c) < 0 || h(k, c) >= h(i, c)) return false;
  }
  for (std::size_t i = r.rank; i < h.rows; ++i)
    for (std::size_t j = 0; j < h.cols; ++j)
      if (h(i, j) != 0) return false;
  return true;
}

}  // namespace

TEST(Rational, SerializationRoundTrip) {
  EXPECT_EQ(to_string(make_rat(4, 3)), "4/3");
  EXPECT_EQ(to_string(make_rat(6, 3)), "2");
  EXPECT_EQ(to_string(make_rat(-7, 2)), "-7/2");
  EXPECT_EQ(parse_rat("14/6"), make_rat(7, 3));
  EXPECT_EQ(parse_rat("-5"), Rat(-5));
  EXPECT_THROW(parse_rat("x/2"), std::invalid_argument);
  EXPECT_THROW(make_rat(1, 0), std::domain_error);
}

TEST(Rational, FloorCeilRound) {
  EXPECT_EQ(sperf::floor(make_rat(-7, 2)), -4);
  EXPECT_EQ(sperf::ceil(make_rat(-7, 2)), -3);
  EXPECT_EQ(round_nearest(make_rat(5, 2)), 3);
  EXPECT_EQ(round_nearest(make_rat(-5, 2)), -2);
}

TEST(Hnf, IdentityIsFixed) {
  IMat i3 = IMat::identity(3);
  HnfResult r = hnf(i3);
  EXPECT_EQ(r.h, i3);
  EXPECT_EQ(r.u, i3);
  EXPECT_EQ(r.rank, 3u);
}

TEST(Hnf, SmallExampleIndexTwo) {
  IMat m{{2, 0}, {0, 2}, {1, 1}};
  HnfResult r = hnf(m);
  EXPECT_TRUE(is_hnf(r));
  EXPECT_EQ(r.u * m, r.h);
  EXPECT_EQ(abs(det(r.u)), 1);
  ASSERT_EQ(r.rank, 2u);
  IMat b = hnf_basis(m);
  EXPECT_EQ(abs(det(b)), oracle::gcd_maximal_minors(m));
  EXPECT_EQ(abs(det(b)), 2);
  EXPECT_EQ(b, (IMat{{1, 1}, {0, 2}}));
}

TEST(Hnf, IndexSevenSublatticeOfRank12) {
  // 11 rows e_i + a_i e_11 over F_7 together with 7 Z^12
  IMat gens(11 + 12, 12);
  long a[11] = {3, 0, 6, 1, 5, 2, 2, 4, 0, 1, 6};
  for (std::size_t i = 0; i < 11; ++i) {
    gens(i, i) = 1;
    gens(i, 11) = a[i];
  }
  for (std::size_t i = 0; i < 12; ++i) gens(11 + i, i) = 7;
  HnfResult r = hnf(gens);
  EXPECT_TRUE(is_hnf(r));
  EXPECT_EQ(r.u * gens, r.h);
  ASSERT_EQ(r.rank, 12u);
  IMat b = hnf_basis(gens);
  EXPECT_EQ(det(b), 7);
}

TEST(Hnf, ZeroMatrix) {
  IMat z(2, 3);
  HnfResult r = hnf(z);
  EXPECT_EQ(r.rank, 0u);
  EXPECT_EQ(r.h, z);
}

TEST(Hnf, RandomPropertyAgainstMinorOracle) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    std::size_t n = 1 + rng() % 5, r = 1 + rng() % 6;
    IMat m = oracle::random_int_mat(rng, r, n, -9, 9);
    HnfResult h = hnf(m);
    ASSERT_TRUE(is_hnf(h));
    ASSERT_EQ(h.u * m, h.h);
    ASSERT_EQ(abs(det(h.u)), 1);
    ASSERT_EQ(h.rank, rank(m));
    if (h.rank == n) {
      IMat b = hnf_basis(m);
      ASSERT_EQ(abs(det(b)), oracle::gcd_maximal_minors(m));
    }
    // canonical: a unimodular change of generators gives the same HNF
    IMat u = oracle::random_unimodular(rng, r);
    ASSERT_EQ(hnf_basis(u * m), hnf_basis(m));
  }
}

TEST(Hnf, BasisBuilderMatchesHnf) {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + rng() % 5, r = 1 + rng() % 8;
    IMat m = oracle::random_int_mat(rng, r, n, -9, 9);
    LatticeBasisBuilder b(n);
    for (std::size_t i = 0; i < r; ++i) b.insert(m.row(i));
    ASSERT_EQ(b.basis(), hnf_basis(m));
    ASSERT_EQ(b.rank(), rank(m));
  }
}

TEST(Det, Examples) {
  EXPECT_EQ(det(IMat::identity(5)), 1);
  IMat a2{{2, 1}, {1, 2}};
  EXPECT_EQ(det(a2), 3);
  EXPECT_EQ(Rat(det(a2)), oracle::cofactor_det(to_rat(a2)));
  QMat q{{make_rat(4, 3), make_rat(2, 3)}, {make_rat(2, 3), make_rat(4, 3)}};
  EXPECT_EQ(det(q), make_rat(4, 3));
}

TEST(Det, RandomAgainstCofactor) {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + rng() % 5;
    IMat m = oracle::random_int_mat(rng, n, n, -9, 9);
    ASSERT_EQ(Rat(det(m)), oracle::cofactor_det(to_rat(m)));
    QMat q = scaled(to_rat(m), Rat(1, 1 + (long)(rng() % 5)));
    ASSERT_EQ(det(q), oracle::cofactor_det(q));
  }
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(QMat::identity(4)), QMat::identity(4));
  QMat a2{{2, 1}, {1, 2}};
  QMat expect{{make_rat(2, 3), make_rat(-1, 3)}, {make_rat(-1, 3), make_rat(2, 3)}};
  EXPECT_EQ(inverse(a2), expect);
  EXPECT_THROW(inverse(QMat{{1, 2}, {2, 4}}), SingularMatrix);
}

TEST(Inverse, RandomInvolutionAndDet) {
  std::mt19937_64 rng(14);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 1 + rng() % 6;
    QMat m = to_rat(oracle::random_int_mat(rng, n, n, -9, 9));
    if (det(m) == 0) continue;
    QMat inv = inverse(m);
    ASSERT_EQ(m * inv, QMat::identity(n));
    ASSERT_EQ(inverse(inv), m);
    ASSERT_EQ(det(inv), 1 / det(m));
  }
}

TEST(KernelModP, Examples) {
  EXPECT_EQ(kernel_mod_p(IMat(2, 2), 3).size(), 2u);
  auto k = kernel_mod_p(IMat{{1, 1, 1}}, 2);
  ASSERT_EQ(k.size(), 2u);
  // exhaustive over F_2^3: exactly 4 solutions
  int count = 0;
  for (int x = 0; x < 8; ++x) count += ((x & 1) + (x >> 1 & 1) + (x >> 2 & 1)) % 2 == 0;
  EXPECT_EQ(count, 1 << k.size());
  IMat f(1, 12);
  for (std::size_t j = 0; j < 12; ++j) f(0, j) = (long)(j * 3 + 1);
  EXPECT_EQ(kernel_mod_p(f, 7).size(), 11u);
  EXPECT_THROW(kernel_mod_p(f, 6), NotPrime);
}

TEST(KernelModP, RandomAgainstExhaustiveCount) {
  std::mt19937_64 rng(15);
  for (long p : {2L, 3L, 5L, 7L}) {
    for (int it = 0; it < 40; ++it) {
      std::size_t r = 1 + rng() % 4, n = 1 + rng() % 4;
      IMat m = oracle::random_int_mat(rng, r, n, -9, 9);
      auto ker = kernel_mod_p(m, p);
      for (auto& v : ker)
        for (std::size_t i = 0; i < r; ++i) {
          Int s = 0;
          for (std::size_t j = 0; j < n; ++j) s += m(i, j) * Int((long)v[j]);
          ASSERT_EQ(mod_p(s, p), 0);
        }
      long total = 1, solutions = 0;
      for (std::size_t j = 0; j < n; ++j) total *= p;
      for (long code = 0; code < total; ++code) {
        long c = code;
        Vec x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = c % p, c /= p;
        bool ok = true;
        for (std::size_t i = 0; i < r && ok; ++i) {
          Int s = 0;
          for (std::size_t j = 0; j < n; ++j) s += m(i, j) * Int((long)x[j]);
          ok = mod_p(s, p) == 0;
        }
        solutions += ok;
      }
      long expect = 1;
      for (std::size_t j = 0; j < ker.size(); ++j) expect *= p;
      ASSERT_EQ(solutions, expect);
    }
  }
}

TEST(Snf, Examples) {
  auto d = snf(IMat{{2, 0}, {0, 6}}).d;
  EXPECT_EQ(d, (std::vector<Int>{2, 6}));
  IMat a2{{2, 1}, {1, 2}};
  SnfResult s = snf(a2);
  EXPECT_EQ(s.d, (std::vector<Int>{1, 3}));
  // Z^2 modulo its checkerboard sublattice: one even elementary divisor
  IMat rel{{1, 1}, {0, 2}};
  auto dd = snf(rel).d;
  int even = 0;
  for (auto& x : dd) even += x % 2 == 0;
  EXPECT_EQ(even, 1);
  EXPECT_EQ(dd[0] * dd[1], abs(det(rel)));
}

TEST(Snf, RandomProperties) {
  std::mt19937_64 rng(16);
  for (int it = 0; it < 300; ++it) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    IMat m = oracle::random_int_mat(rng, r, c, -9, 9);
    SnfResult s = snf(m);
    ASSERT_EQ(abs(det(s.u)), 1);
    ASSERT_EQ(abs(det(s.v)), 1);
    IMat d = s.u * m * s.v;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) ASSERT_EQ(d(i, j), i == j ? s.d[i] : Int(0));
    for (std::size_t i = 0; i + 1 < s.d.size(); ++i) {
      if (s.d[i] == 0) {
        ASSERT_EQ(s.d[i + 1], 0);
      } else {
        ASSERT_EQ(s.d[i + 1] % s.d[i], 0);
      }
      ASSERT_GE(s.d[i], 0);
    }
    if (r == c) {
      Int prod = 1;
      for (auto& x : s.d) prod *= x;
      ASSERT_EQ(prod, abs(det(m)));
    }
  }
}
