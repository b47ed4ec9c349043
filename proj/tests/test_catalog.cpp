#include "oracles.hpp"

#include "sperf/catalog/catalog.hpp"

#include <chrono>
#include <gtest/gtest.h>

using namespace sperf;

TEST(RootLattice, Examples) {
  Lattice a2 = root_lattice("A2");
  EXPECT_EQ(a2.gram, (QMat{{2, 1}, {1, 2}}));
  EXPECT_EQ(a2.determinant(), oracle::cofactor_det(a2.gram));
  Lattice d6 = root_lattice("D6");
  EXPECT_EQ(d6.determinant(), 4);
  EXPECT_EQ(kissing(d6), 60);
  Lattice e8 = root_lattice("E8");
  EXPECT_EQ(e8.determinant(), 1);
  EXPECT_EQ(minimum(e8), 2);
  EXPECT_EQ(kissing(e8), 240);
  EXPECT_THROW(root_lattice("F4"), UnknownLabel);
  EXPECT_THROW(root_lattice("E9"), UnknownLabel);
  EXPECT_THROW(root_lattice("D3"), UnknownLabel);
  EXPECT_THROW(root_lattice("Ax"), UnknownLabel);
}

TEST(RootLattice, AdeInvariants) {
  for (std::size_t n = 1; n <= 8; ++n) {
    Lattice a = root_lattice("A" + std::to_string(n));
    EXPECT_EQ(a.determinant(), Rat((long)n + 1));
    EXPECT_EQ(kissing(a), Int((long)(n * (n + 1))));
  }
  for (std::size_t n = 4; n <= 8; ++n) {
    Lattice d = root_lattice("D" + std::to_string(n));
    EXPECT_EQ(d.determinant(), 4);
    EXPECT_EQ(kissing(d), Int((long)(2 * n * (n - 1))));
  }
  EXPECT_EQ(root_lattice("E6").determinant(), 3);
  EXPECT_EQ(root_lattice("E7").determinant(), 2);
  EXPECT_EQ(kissing(root_lattice("E6")), 72);
  EXPECT_EQ(kissing(root_lattice("E7")), 126);
}

TEST(NamedEntries, SelfCheck) {
  for (auto& e : catalog_entries()) {
    Lattice l = named_lattice(e.label);
    EXPECT_EQ(l.determinant(), e.det) << e.label;
    Shell s = shortest_vectors(l);
    EXPECT_EQ(s.norm, e.min) << e.label;
    EXPECT_EQ(Int((long)s.vectors.size()), e.kissing) << e.label;
  }
}

TEST(CoxeterTodd, CertifiedInvariants) {
  auto t0 = std::chrono::steady_clock::now();
  Lattice ct = coxeter_todd();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(ct.dim(), 12u);
  EXPECT_EQ(ct.determinant(), 729);
  EXPECT_EQ(minimum(ct), 4);
  EXPECT_EQ(kissing(ct), 756);
  EXPECT_TRUE(ct.even());
  EXPECT_EQ(dual(ct).determinant(), make_rat(1, 729));
  EXPECT_EQ(hermite_invariant(ct), rat_pow(Rat(4), 12) / 729);
  // rescaled to minimum 4/3, the dual has minimum 4 (3-modularity)
  Lattice lam = rescale(ct, make_rat(1, 3));
  EXPECT_EQ(minimum(lam), make_rat(4, 3));
  EXPECT_EQ(minimum(dual(lam)), 4);
  EXPECT_EQ(minimum(dual(ct)), make_rat(4, 3));
  EXPECT_LT(secs, 30.0);
}

TEST(CoxeterTodd, NoVectorsOfNormElevenHalvesAndFourShell) {
  Lattice ct = coxeter_todd();
  EXPECT_TRUE(vectors_of_norm(ct, make_rat(11, 2)).vectors.empty());
  EXPECT_EQ(vectors_of_norm(ct, Rat(4)).vectors.size(), 756u);
}

TEST(TabulatedGram, Transcription) {
  QMat a = tabulated_gram("A_a2a2");
  EXPECT_EQ(a.rows, 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a(i, i), 4);
  EXPECT_EQ(a(0, 1), -2);
  EXPECT_EQ(a(0, 3), 1);
  EXPECT_EQ(a(1, 2), 1);
  QMat f = tabulated_gram("F_gamma72");
  EXPECT_EQ(f(0, 0), make_rat(4, 3));
  EXPECT_EQ(f(11, 11), 14);
  EXPECT_EQ(f(0, 1), make_rat(1, 3));
  EXPECT_EQ(f(10, 11), 6);
  QMat g = tabulated_gram("F_a2a2");
  EXPECT_EQ(g(0, 0), 4);
  EXPECT_EQ(g(0, 2), 0);
  EXPECT_EQ(g(1, 1), 6);
  EXPECT_EQ(g(2, 3), make_rat(1, 3));
  EXPECT_EQ(g(3, 0), 1);
  for (auto& n : tabulated_gram_names()) {
    QMat m = tabulated_gram(n);
    EXPECT_TRUE(m.symmetric()) << n;
    EXPECT_NO_THROW(Lattice(m, n)) << n;
  }
  EXPECT_THROW(tabulated_gram("F"), UnknownName);
}

TEST(TabulatedGram, DeterminantOfDualIs81) {
  Lattice l(tabulated_gram("F_a2a2"));
  Lattice m = dual(l);
  EXPECT_EQ(m.determinant(), 81);
  EXPECT_EQ(m.determinant(), 1 / l.determinant());
  EXPECT_TRUE(m.even());
  EXPECT_EQ(inverse(inverse(tabulated_gram("F_gamma72"))), tabulated_gram("F_gamma72"));
}

TEST(TabulatedGram, GammaSevenHalvesMinima) {
  Lattice l(tabulated_gram("F_gamma72"));
  EXPECT_EQ(minimum(l), make_rat(4, 3));
}

TEST(TensorAndSum, Examples) {
  Lattice t = tensor(root_lattice("A1"), root_lattice("A2"));
  EXPECT_EQ(t.gram, (QMat{{4, 2}, {2, 4}}));
  EXPECT_EQ(t.determinant(), 12);
  EXPECT_EQ(power(t, 4).determinant(), 20736);
  EXPECT_EQ(orthogonal_sum(root_lattice("E6"), root_lattice("E6")).determinant(), 9);
  Lattice lp = named_lattice("Lprime");
  EXPECT_EQ(lp.determinant(), rat_pow(make_rat(4, 3), 4));
}
