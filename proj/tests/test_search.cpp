#include "oracles.hpp"

#include "sperf/isom/isom.hpp"
#include "sperf/prover/lattices.hpp"
#include "sperf/search/search.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <set>

using namespace sperf;

namespace {

// all normalized functionals of F_p^n, generated independently of the engine
std::vector<Vec> all_functionals(std::size_t n, long p) {
  std::vector<Vec> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= (std::size_t)p;
  for (std::size_t c = 1; c < total; ++c) {
    Vec f(n);
    std::size_t r = c;
    for (std::size_t i = n; i-- > 0;) {
      f[i] = (long)(r % (std::size_t)p);
      r /= (std::size_t)p;
    }
    std::size_t k = 0;
    while (f[k] == 0) ++k;
    if (f[k] == 1) out.push_back(f);
  }
  return out;
}

std::set<Vec> functionals(const SearchResult& r) {
  std::set<Vec> s;
  for (auto& v : r.survivors) s.insert(v.functional);
  return s;
}

Lattice random_lattice(std::mt19937_64& rng, std::size_t n) {
  return Lattice(oracle::random_small_gram(rng, n, 3, 5e4));
}

SearchSpec spec_for(const Lattice& l, long p, std::vector<PruneRule> rules = {}) {
  SearchSpec s;
  s.base = l;
  s.p = p;
  s.prune = std::move(rules);
  return s;
}

}  // namespace

TEST(IndexP, UnprunedCountsAreProjective) {
  for (long p : {2L, 3L, 5L, 7L})
    for (std::size_t n = 1; n <= (p <= 3 ? 6u : 4u); ++n) {
      auto r = index_p_sublattices(spec_for(Lattice(QMat::identity(n)), p));
      EXPECT_EQ(r.candidates, projective_count(p, n));
      EXPECT_EQ(r.survivors.size(), r.candidates);
      EXPECT_EQ(r.pruned, 0u);
      auto oracle = all_functionals(n, p);
      EXPECT_EQ(functionals(r), std::set<Vec>(oracle.begin(), oracle.end()));
    }
  EXPECT_EQ(index_p_sublattices(spec_for(Lattice(QMat::identity(12)), 2)).candidates, 4095u);
  EXPECT_EQ(index_p_sublattices(spec_for(Lattice(QMat::identity(12)), 3)).candidates, 265720u);
  EXPECT_EQ(projective_count(5, 12), 61035156u);
  EXPECT_EQ(projective_count(7, 12), 2306881200u);
}

TEST(IndexP, Preconditions) {
  EXPECT_THROW(index_p_sublattices(spec_for(Lattice(QMat::identity(3)), 4)), NotPrime);
  SearchSpec s = spec_for(Lattice(QMat::identity(3)), 2);
  s.corank = 2;
  EXPECT_THROW(index_p_sublattices(s), std::invalid_argument);
  EXPECT_THROW(parse_prune("min<=2", PruneRule::Stage::final), std::invalid_argument);
  EXPECT_THROW(parse_prune("maxnorm>=2", PruneRule::Stage::final), std::invalid_argument);
  PruneRule r = parse_prune("dualmin>=4/3", PruneRule::Stage::final);
  EXPECT_EQ(r.kind, PruneRule::Kind::dual_min_at_least);
  EXPECT_EQ(r.bound, make_rat(4, 3));
  EXPECT_EQ(r.str(), "dualmin>=4/3");
}

TEST(IndexP, EverySublatticeHasIndexP) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 6; ++t) {
    Lattice l = random_lattice(rng, 2 + t % 3);
    for (long p : {2L, 3L, 5L}) {
      auto r = index_p_sublattices(spec_for(l, p));
      for (auto& s : r.survivors) {
        IMat rows = survivor_rows(s, p);
        EXPECT_EQ(row_index(rows), p);
        Lattice sub = survivor_lattice(l, s, p);
        EXPECT_EQ(sub.determinant(), l.determinant() * p * p);
        // the kernel is exactly {x : f.x = 0 mod p}
        for (std::size_t i = 0; i < rows.rows; ++i) {
          Int dot = 0;
          for (std::size_t j = 0; j < rows.cols; ++j) dot += rows(i, j) * s.functional[j];
          EXPECT_EQ(dot % p, 0);
        }
      }
    }
  }
}

TEST(IndexP, RulesAgreeWithBoxOracle) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 12; ++t) {
    std::size_t n = 2 + t % 3;
    Lattice l = random_lattice(rng, n);
    long p = t % 2 ? 3 : 2;
    Rat m = oracle::box_minimum(l.gram), dm = oracle::box_minimum(inverse(l.gram));
    // bounds between the base minimum and the largest possible sublattice minimum
    Rat bmin = m * (t % 3 + 2) / 2, bdual = dm * (t % 4 + 3) / (p * 2);
    auto rmin = index_p_sublattices(spec_for(l, p, {PruneRule::min_at_least(bmin)}));
    auto rdual = index_p_sublattices(spec_for(l, p, {PruneRule::dual_min_at_least(bdual)}));
    std::set<Vec> want_min, want_dual;
    for (auto& f : all_functionals(n, p)) {
      Lattice sub = sublattice(l, hyperplane_kernel_rows(f, p));
      if (oracle::box_minimum(sub.gram) >= bmin) want_min.insert(f);
      if (oracle::box_minimum(inverse(sub.gram)) >= bdual) want_dual.insert(f);
    }
    EXPECT_EQ(functionals(rmin), want_min) << l.gram;
    EXPECT_EQ(functionals(rdual), want_dual) << l.gram;
    EXPECT_EQ(rmin.pruned + rmin.survivors.size(), rmin.candidates);
  }
}

TEST(IndexP, SliceRestrictsFunctionals) {
  Lattice l = root_lattice("D4");
  SearchSpec s = spec_for(l, 3);
  s.prefix = {1, 2};
  auto r = index_p_sublattices(s);
  EXPECT_EQ(r.candidates, 9u);
  for (auto& v : r.survivors) {
    EXPECT_EQ(v.functional[0], 1);
    EXPECT_EQ(v.functional[1], 2);
  }
  s.prefix = {0, 0, 0, 0};
  EXPECT_EQ(index_p_sublattices(s).candidates, 0u);
}

TEST(Filter, Examples) {
  EXPECT_TRUE(filter({}, PruneRule::min_at_least(2)).empty());
  std::vector<Lattice> ls{root_lattice("E8"), Lattice(QMat::identity(8)), root_lattice("A2")};
  auto m2 = filter(ls, PruneRule::min_at_least(2));
  ASSERT_EQ(m2.size(), 2u);
  EXPECT_EQ(m2[0].gram, ls[0].gram);
  EXPECT_EQ(m2[1].gram, ls[2].gram);
  auto d = filter(ls, PruneRule::dual_min_at_least(1));
  ASSERT_EQ(d.size(), 2u);  // E8* = E8 and Z^8; A2* has minimum 2/3
  EXPECT_EQ(d[1].gram, ls[1].gram);
}

TEST(HnfSearch, PerRowPruningIsSound) {
  // pruned row-by-row search equals the unpruned scan with the rule as a final filter
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    std::size_t n = 2 + t % 5;
    Lattice l = random_lattice(rng, n);
    long p = t % 3 == 0 ? 3 : 2;
    Rat b = oracle::box_minimum(l.gram) * (2 + t % 3) / 2;
    SearchSpec h = spec_for(l, p, {PruneRule::min_at_least(b, PruneRule::Stage::per_row)});
    h.corank = n - 1;
    auto pruned = hnf_pruned_search(h);
    auto full = index_p_sublattices(spec_for(l, p, {PruneRule::min_at_least(b, PruneRule::Stage::final)}));
    EXPECT_EQ(pruned.candidates, projective_count(p, n));
    EXPECT_EQ(functionals(pruned), functionals(full));
    std::set<Vec> exact;
    for (auto& f : all_functionals(n, p))
      if (satisfies(sublattice(l, hyperplane_kernel_rows(f, p)), PruneRule::min_at_least(b))) exact.insert(f);
    EXPECT_EQ(functionals(pruned), exact);
  }
}

TEST(HnfSearch, FinalDualRuleMatchesIndexScan) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 6; ++t) {
    std::size_t n = 3 + t % 3;
    Lattice l = random_lattice(rng, n);
    Rat m = oracle::box_minimum(l.gram), dm = oracle::box_minimum(inverse(l.gram));
    std::vector<PruneRule> rules{PruneRule::min_at_least(m * 3 / 2), PruneRule::dual_min_at_least(dm * 3 / 4)};
    SearchSpec h = spec_for(l, 3, rules);
    h.corank = n - 1;
    EXPECT_EQ(functionals(hnf_pruned_search(h)), functionals(index_p_sublattices(spec_for(l, 3, rules))));
  }
}

TEST(Partitioning, ThreadsDoNotChangeResults) {
  Gamma72Data g = gamma72_data();
  SearchSpec s = spec_for(g.M, 7, {PruneRule::min_at_least(make_rat(7, 2))});
  s.corank = 11;
  s.prefix = {3};
  auto one = hnf_pruned_search(s);
  s.threads = 3;
  auto three = hnf_pruned_search(s);
  EXPECT_EQ(one.survivors, three.survivors);
  EXPECT_EQ(one.nodes, three.nodes);
  EXPECT_GT(one.survivors.size(), 0u);

  SearchSpec d = spec_for(root_lattice("E6"), 3, {PruneRule::dual_min_at_least(make_rat(2, 3))});
  auto a = index_p_sublattices(d);
  d.threads = 4;
  EXPECT_EQ(index_p_sublattices(d).survivors, a.survivors);
}

TEST(Partitioning, SmokeSliceIsDeterministic) {
  Gamma72Data g = gamma72_data();
  SearchSpec s = spec_for(g.M, 7, {PruneRule::min_at_least(make_rat(7, 2))});
  s.corank = 11;
  s.prefix = {1};
  auto a = hnf_pruned_search(s), b = hnf_pruned_search(s);
  EXPECT_EQ(a.survivors, b.survivors);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.candidates, b.candidates);
}

TEST(Checkpoint, ResumesAndRejectsForeignFiles) {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "sperf_search_checkpoint_test.jsonl";
  fs::remove(file);
  SearchSpec s = spec_for(root_lattice("E6"), 3, {PruneRule::dual_min_at_least(make_rat(2, 3))});
  auto plain = index_p_sublattices(s);
  s.checkpoint = file.string();
  auto first = index_p_sublattices(s);
  EXPECT_EQ(first.resumed, 0u);
  EXPECT_EQ(first.survivors, plain.survivors);
  auto again = index_p_sublattices(s);
  EXPECT_EQ(again.resumed, again.partitions);
  EXPECT_EQ(again.survivors, plain.survivors);
  EXPECT_EQ(again.candidates, plain.candidates);

  // keep the header and half of the records, as after an interruption
  std::vector<std::string> lines;
  {
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  {
    std::ofstream out(file, std::ios::trunc);
    for (std::size_t i = 0; i < 1 + (lines.size() - 1) / 2; ++i) out << lines[i] << "\n";
  }
  auto resumed = index_p_sublattices(s);
  EXPECT_EQ(resumed.resumed, (lines.size() - 1) / 2);
  EXPECT_EQ(resumed.survivors, plain.survivors);

  SearchSpec other = s;
  other.p = 2;
  EXPECT_THROW(index_p_sublattices(other), std::invalid_argument);
  fs::remove(file);
}

TEST(ScanLattices, Construction) {
  Lattice m = a2a2_overlattice();
  EXPECT_EQ(m.determinant(), 81);
  Gamma72Data g = gamma72_data();
  EXPECT_EQ(g.M0.determinant(), 81);
  EXPECT_EQ(index_of(g.m0_rows, IMat::identity(12)), 4);
  EXPECT_TRUE(g.M0.even());
  EXPECT_EQ(g.L.norm(Vec{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}), 14);  // 2 alpha
  EXPECT_EQ(dual(g.L).norm(g.alpha), make_rat(7, 2));
  EXPECT_EQ(g.M.determinant(), make_rat(81, 4));
}

TEST(ScanSearches, IndexTwoAndThreeOverA2A2Overlattice) {
  Lattice m = a2a2_overlattice();
  auto r2 = index_p_sublattices(spec_for(m, 2, {PruneRule::dual_min_at_least(make_rat(4, 3))}));
  EXPECT_EQ(r2.candidates, 4095u);
  EXPECT_TRUE(r2.survivors.empty());
  auto r3 = index_p_sublattices(spec_for(m, 3, {PruneRule::dual_min_at_least(make_rat(4, 3))}));
  EXPECT_EQ(r3.candidates, 265720u);
  ASSERT_FALSE(r3.survivors.empty());
  std::vector<Lattice> ls;
  for (auto& s : r3.survivors) ls.push_back(survivor_lattice(m, s, 3));
  auto classes = dedup_classes(ls);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_TRUE(is_isometric(classes[0].representative, coxeter_todd()).has_value());
}

TEST(ScanSearches, SevenRowByRowCount) {
  Gamma72Data g = gamma72_data();
  SearchSpec s = spec_for(g.M, 7, {PruneRule::min_at_least(make_rat(7, 2))});
  s.corank = 11;
  auto r = hnf_pruned_search(s);
  EXPECT_EQ(r.candidates, 2306881200u);
  EXPECT_EQ(r.survivors.size(), 31104u);
  for (std::size_t i = 0; i < r.survivors.size(); i += 997)
    EXPECT_GE(minimum(survivor_lattice(g.M, r.survivors[i], 7)), make_rat(7, 2));
  s.prune.push_back(PruneRule::dual_min_at_least(make_rat(4, 3)));
  EXPECT_TRUE(hnf_pruned_search(s).survivors.empty());
}
