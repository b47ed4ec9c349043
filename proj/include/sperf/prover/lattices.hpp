#pragma once

#include "sperf/catalog/catalog.hpp"
#include "sperf/lattice/reduce.hpp"

namespace sperf {

// M = L* for L with Gram F_a2a2, LLL-reduced
inline Lattice a2a2_overlattice() {
  Lattice l(tabulated_gram("F_a2a2"), "L");
  Lattice m = lll(dual(l)).first;
  m.label = "M";
  return m;
}

// The lattice with Gram F_gamma72 and the lattices built from its dual basis.
struct Gamma72Data {
  Lattice L;
  IMat m0_rows;  // generators of M0 in dual-basis coordinates
  Vec alpha;     // the norm 7/2 vector, dual-basis coordinates
  Lattice M0;
  Lattice M;  // M0 + Z alpha, LLL-reduced
};

inline Gamma72Data gamma72_data() {
  Gamma72Data d;
  d.L = Lattice(tabulated_gram("F_gamma72"), "L");
  d.m0_rows = IMat(12, 12);
  for (std::size_t i = 0; i < 10; ++i) d.m0_rows(i, i) = 1;
  d.m0_rows(10, 10) = 2;
  d.m0_rows(10, 11) = 2;
  d.m0_rows(11, 10) = 1;
  d.m0_rows(11, 11) = 3;
  // alpha = (2 alpha)/2 with 2 alpha the last basis vector of L: its pairings
  // with the basis are half the last row of the Gram matrix
  d.alpha.assign(12, 0);
  for (std::size_t j = 0; j < 12; ++j) d.alpha[j] = to_i64(Rat(d.L.gram(11, j) / 2).get_num());
  Lattice ls = dual(d.L);
  d.M0 = sublattice(ls, d.m0_rows, "M0");
  IMat gens = vstack(d.m0_rows, from_vecs({d.alpha}, 12));
  Lattice m = sublattice(ls, hnf_basis(gens));
  d.M = lll(m).first;
  d.M.label = "M";
  return d;
}

}  // namespace sperf
