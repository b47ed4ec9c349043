#include "oracles.hpp"

#include "sperf/catalog/catalog.hpp"
#include "sperf/isom/isom.hpp"

#include <gtest/gtest.h>

using namespace sperf;

namespace {

Lattice transformed(const Lattice& l, const IMat& u) {
  QMat q = to_rat(u);
  return Lattice(q * l.gram * q.transpose());
}

// D_8 plus the all-halves glue vector, built in R^8 and doubled to integers
Lattice d8_plus() {
  std::vector<Vec> rows;
  for (int i = 0; i < 7; ++i) {
    Vec v(8, 0);
    v[i] = 2;
    v[i + 1] = -2;
    rows.push_back(v);
  }
  Vec last(8, 0);
  last[6] = 2;
  last[7] = 2;
  rows.push_back(last);
  rows.push_back(Vec(8, 1));
  IMat b = hnf_basis(from_vecs(rows, 8));
  QMat q = to_rat(b);
  return Lattice(scaled(q * q.transpose(), make_rat(1, 4)), "D8+");
}

}  // namespace

TEST(Fingerprint, Examples) {
  Lattice z2(QMat::identity(2)), a2 = root_lattice("A2");
  EXPECT_NE(fingerprint(z2), fingerprint(a2));
  EXPECT_NE(fingerprint(z2).shells, fingerprint(rescale(a2, make_rat(1, 2))).shells);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    Lattice l(oracle::random_small_gram(rng, 2 + rng() % 4, 3));
    Lattice m = transformed(l, oracle::random_unimodular(rng, l.dim()));
    EXPECT_EQ(fingerprint(l), fingerprint(m));
  }

  Fingerprint f = fingerprint(coxeter_todd());
  EXPECT_EQ(f.dim, 12u);
  EXPECT_EQ(f.det, 729);
  EXPECT_EQ(f.min, 4);
  EXPECT_EQ(f.shells.at(Rat(4)), 756u);
  EXPECT_EQ(f.min_products.at(Rat(4)), 756u);
}

TEST(IsIsometric, Examples) {
  Lattice e8 = root_lattice("E8");
  auto self = is_isometric(e8, e8);
  ASSERT_TRUE(self);
  EXPECT_EQ(self->U, IMat::identity(8));

  Lattice d8p = d8_plus();
  EXPECT_EQ(d8p.determinant(), 1);
  EXPECT_TRUE(d8p.even());
  auto w = is_isometric(e8, d8p);
  ASSERT_TRUE(w);
  EXPECT_TRUE(verify_isometry(e8, d8p, w->U));

  Lattice z4(QMat::identity(4));
  Lattice d4s = rescale(root_lattice("D4"), make_rat(1, 2));
  EXPECT_EQ(minimum(d4s), 1);
  EXPECT_FALSE(is_isometric(z4, d4s));
  EXPECT_FALSE(is_isometric(z4, Lattice(QMat::identity(3))));
}

TEST(IsIsometric, CtUnderBasisChange) {
  Lattice ct = coxeter_todd();
  std::mt19937_64 rng(8);
  Lattice m = transformed(ct, oracle::random_unimodular(rng, 12, 20));
  auto w = is_isometric(ct, m);
  ASSERT_TRUE(w);
  EXPECT_TRUE(verify_isometry(ct, m, w->U));
  auto back = is_isometric(m, ct);
  ASSERT_TRUE(back);
  EXPECT_TRUE(verify_isometry(m, ct, back->U));
  EXPECT_FALSE(is_isometric(ct, power(root_lattice("A2"), 6)));  // same det, min 2
}

TEST(IsIsometric, SymmetricWithInverseWitness) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    Lattice l(oracle::random_small_gram(rng, 2 + rng() % 3, 3));
    Lattice m = transformed(l, oracle::random_unimodular(rng, l.dim()));
    auto a = is_isometric(l, m), b = is_isometric(m, l);
    ASSERT_TRUE(a && b);
    EXPECT_TRUE(verify_isometry(l, m, a->U));
    EXPECT_TRUE(verify_isometry(m, l, inverse_unimodular(a->U)));
    EXPECT_TRUE(verify_isometry(m, l, b->U));
  }
}

TEST(IsIsometric, AgreesWithBruteForce) {
  std::mt19937_64 rng(17);
  int iso = 0, non = 0;
  for (int t = 0; t < 120; ++t) {
    std::size_t n = 2 + rng() % 3;
    Lattice l(oracle::random_small_gram(rng, n, 3));
    Lattice m = (t % 2 == 0) ? transformed(l, oracle::random_unimodular(rng, n, 4))
                             : Lattice(oracle::random_small_gram(rng, n, 3));
    bool fast = is_isometric(l, m).has_value();
    bool slow = oracle::brute_isometric(l.gram, m.gram);
    EXPECT_EQ(fast, slow) << l.gram << m.gram;
    (fast ? iso : non)++;
  }
  EXPECT_GT(iso, 0);
  EXPECT_GT(non, 0);
}

TEST(Dedup, Examples) {
  Lattice e8 = root_lattice("E8");
  auto one = dedup_classes({e8, e8, e8});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].multiplicity, 3u);

  std::mt19937_64 rng(4);
  std::vector<Lattice> ls;
  Lattice d4 = root_lattice("D4"), a4 = root_lattice("A4"), z4(QMat::identity(4));
  for (int k = 0; k < 3; ++k) {
    ls.push_back(transformed(d4, oracle::random_unimodular(rng, 4, 6)));
    ls.push_back(transformed(a4, oracle::random_unimodular(rng, 4, 6)));
  }
  ls.push_back(z4);
  auto classes = dedup_classes(ls);
  ASSERT_EQ(classes.size(), 3u);
  std::vector<std::size_t> mult;
  for (auto& c : classes) mult.push_back(c.multiplicity);
  std::sort(mult.begin(), mult.end());
  EXPECT_EQ(mult, (std::vector<std::size_t>{1, 3, 3}));

  // order independence
  for (int r = 0; r < 5; ++r) {
    std::vector<Lattice> sh = ls;
    std::shuffle(sh.begin(), sh.end(), rng);
    auto c2 = dedup_classes(sh);
    ASSERT_EQ(c2.size(), classes.size());
    for (std::size_t i = 0; i < c2.size(); ++i) {
      EXPECT_EQ(c2[i].representative.gram, classes[i].representative.gram);
      EXPECT_EQ(c2[i].multiplicity, classes[i].multiplicity);
    }
  }
  // representative is the lex-least member Gram
  for (auto& c : classes)
    for (auto i : c.members) EXPECT_FALSE(gram_less(ls[i].gram, c.representative.gram));
}
