#pragma once

#include "sperf/lattice/ops.hpp"

#include <map>
#include <string>

namespace sperf {

struct UnknownLabel : std::invalid_argument {
  explicit UnknownLabel(const std::string& l) : std::invalid_argument("unknown lattice label: " + l) {}
};
struct UnknownName : std::invalid_argument {
  explicit UnknownName(const std::string& l) : std::invalid_argument("unknown matrix name: " + l) {}
};
struct CertificationFailure : std::logic_error {
  explicit CertificationFailure(const std::string& w) : std::logic_error("construction self-check failed: " + w) {}
};

inline Lattice orthogonal_sum(const Lattice& a, const Lattice& b, std::string label = {}) {
  if (label.empty() && !a.label.empty() && !b.label.empty()) label = a.label + "+" + b.label;
  return Lattice(block_diag(a.gram, b.gram), std::move(label));
}

inline Lattice tensor(const Lattice& a, const Lattice& b, std::string label = {}) {
  if (label.empty() && !a.label.empty() && !b.label.empty()) label = a.label + "x" + b.label;
  return Lattice(kron(a.gram, b.gram), std::move(label));
}

inline Lattice power(const Lattice& a, unsigned k, std::string label = {}) {
  QMat g = a.gram;
  for (unsigned i = 1; i < k; ++i) g = block_diag(g, a.gram);
  if (label.empty() && !a.label.empty()) label = a.label + "^" + std::to_string(k);
  return Lattice(g, std::move(label));
}

namespace detail {

// 2 on the diagonal, +1 for adjacent Dynkin nodes (the standard Cartan form
// after flipping signs on one colour class of the bipartite diagram)
inline Lattice dynkin(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::string label) {
  QMat g(n, n);
  for (std::size_t i = 0; i < n; ++i) g(i, i) = 2;
  for (auto [i, j] : edges) g(i, j) = g(j, i) = 1;
  return Lattice(g, std::move(label));
}

}  // namespace detail

// "A5", "D6", "E8", ...
inline Lattice root_lattice(const std::string& type) {
  if (type.size() < 2) throw UnknownLabel(type);
  char f = type[0];
  std::size_t n = 0;
  try {
    std::size_t pos = 0;
    n = std::stoul(type.substr(1), &pos);
    if (pos != type.size() - 1) throw UnknownLabel(type);
  } catch (const std::logic_error&) {
    throw UnknownLabel(type);
  }
  std::vector<std::pair<std::size_t, std::size_t>> e;
  if (f == 'A' && n >= 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  } else if (f == 'D' && n >= 4) {
    for (std::size_t i = 0; i + 2 < n; ++i) e.emplace_back(i, i + 1);
    e.emplace_back(n - 3, n - 1);
  } else if (f == 'E' && n >= 6 && n <= 8) {
    for (std::size_t i = 0; i + 2 < n; ++i) e.emplace_back(i, i + 1);
    e.emplace_back(2, n - 1);
  } else {
    throw UnknownLabel(type);
  }
  return detail::dynkin(n, e, type);
}

// Coxeter-Todd lattice at minimum 4.  Take O^6 with O the Eisenstein
// integers (Gram of O with basis 1, w is [[2,-1],[-1,2]], i.e. 2|z|^2) and the
// sublattice cut out mod 3 by: a_i + b_i constant over i, sum a_i = sum b_i = 0.
// It has index 3^6; scaled by 1/3 it is even of determinant 3^6.
inline Lattice coxeter_todd() {
  const std::size_t n = 12;
  IMat cond(6, n);
  for (std::size_t i = 0; i < 4; ++i) {
    // (a_i + b_i) - (a_{i+1} + b_{i+1})
    cond(i, 2 * i) = 1;
    cond(i, 2 * i + 1) = 1;
    cond(i, 2 * i + 2) = -1;
    cond(i, 2 * i + 3) = -1;
  }
  for (std::size_t i = 0; i < 6; ++i) cond(4, 2 * i) = 1;
  for (std::size_t i = 0; i < 6; ++i) cond(5, 2 * i + 1) = 1;
  // the fifth equal-sum condition follows from the other five mod 3
  auto ker = kernel_mod_p(cond, 3);
  IMat gens(ker.size() + n, n);
  for (std::size_t r = 0; r < ker.size(); ++r)
    for (std::size_t j = 0; j < n; ++j) gens(r, j) = Int((long)ker[r][j]);
  for (std::size_t j = 0; j < n; ++j) gens(ker.size() + j, j) = 3;
  IMat b = hnf_basis(gens);
  Lattice eis = power(Lattice(QMat{{2, -1}, {-1, 2}}), 6);
  QMat r = to_rat(b);
  Lattice ct(scaled(r * eis.gram * r.transpose(), make_rat(1, 3)), "CT");

  if (ct.determinant() != 729) throw CertificationFailure("det " + to_string(ct.determinant()));
  if (!ct.even()) throw CertificationFailure("not even");
  Shell s = shortest_vectors(ct);
  if (s.norm != 4) throw CertificationFailure("min " + to_string(s.norm));
  if (s.vectors.size() != 756) throw CertificationFailure("kissing " + std::to_string(s.vectors.size()));
  return ct;
}

inline const std::vector<std::string>& tabulated_gram_names() {
  static const std::vector<std::string> names{"A_a2a2", "F_a2a2", "F_gamma72", "Lprime"};
  return names;
}

inline QMat tabulated_gram(const std::string& name) {
  if (name == "A_a2a2") {
    return QMat{{4, -2, -2, 1}, {-2, 4, 1, -2}, {-2, 1, 4, -2}, {1, -2, -2, 4}};
  }
  if (name == "F_a2a2") {
    QMat f(12, 12);
    long top[2][12] = {{12, 9, 0, 3, 3, 3, 3, 3, 3, 3, 3, 3}, {9, 18, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6}};
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 12; ++j) f(i, j) = f(j, i) = top[i][j];
    for (std::size_t i = 2; i < 12; ++i)
      for (std::size_t j = 2; j < 12; ++j) f(i, j) = i == j ? 4 : 2;
    for (std::size_t i = 2; i < 12; i += 2) f(i, i + 1) = f(i + 1, i) = 1;
    return scaled(f, make_rat(1, 3));
  }
  if (name == "F_gamma72") {
    QMat f(12, 12);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) f(i, j) = i == j ? 4 : 2;
    for (std::size_t i = 0; i < 10; i += 2) f(i, i + 1) = f(i + 1, i) = 1;
    for (std::size_t i = 0; i < 10; ++i) f(i, 10) = f(10, i) = f(i, 11) = f(11, i) = 6;
    f(10, 10) = 18;
    f(10, 11) = f(11, 10) = 18;
    f(11, 11) = 42;
    return scaled(f, make_rat(1, 3));
  }
  if (name == "Lprime") {
    QMat block{{make_rat(4, 3), make_rat(2, 3)}, {make_rat(2, 3), make_rat(4, 3)}};
    QMat g = block;
    for (int i = 1; i < 4; ++i) g = block_diag(g, block);
    return g;
  }
  throw UnknownName(name);
}

struct NamedEntry {
  std::string label;
  std::string recipe;
  Rat det;
  Rat min;
  Int kissing;
};

// registry of the named lattices used throughout, with expected invariants
inline const std::vector<NamedEntry>& catalog_entries() {
  static const std::vector<NamedEntry> entries{
      {"A2", "root lattice", 3, 2, 6},
      {"D4", "root lattice", 4, 2, 24},
      {"D6", "root lattice", 4, 2, 60},
      {"E6", "root lattice", 3, 2, 72},
      {"E7", "root lattice", 2, 2, 126},
      {"E8", "root lattice", 1, 2, 240},
      {"A1xA2", "tensor product", 12, 4, 6},
      {"A2^6", "orthogonal sum", 729, 2, 36},
      {"E6+E6", "orthogonal sum", 9, 2, 144},
      {"CT", "Eisenstein construction", 729, 4, 756},
  };
  return entries;
}

inline Lattice named_lattice(const std::string& label) {
  if (label == "CT") return coxeter_todd();
  if (label == "A1xA2") return tensor(root_lattice("A1"), root_lattice("A2"), "A1xA2");
  if (label == "A2^6") return power(root_lattice("A2"), 6, "A2^6");
  if (label == "E6+E6") return orthogonal_sum(root_lattice("E6"), root_lattice("E6"), "E6+E6");
  if (label == "Lprime") return Lattice(tabulated_gram("Lprime"), "Lprime");
  for (auto& n : tabulated_gram_names())
    if (label == n) return Lattice(tabulated_gram(n), n);
  if (label.size() > 1 && label[0] == 'Z') {
    std::size_t n = std::stoul(label.substr(label[1] == '^' ? 2 : 1));
    return Lattice(QMat::identity(n), label);
  }
  return root_lattice(label);
}

}  // namespace sperf
