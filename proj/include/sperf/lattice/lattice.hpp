#pragma once

#include "sperf/exact/linalg.hpp"

#include <optional>
#include <string>

namespace sperf {

struct NotPositiveDefinite : std::invalid_argument {
  NotPositiveDefinite() : std::invalid_argument("gram matrix is not positive definite") {}
};

struct NonPositiveScale : std::invalid_argument {
  NonPositiveScale() : std::invalid_argument("scale factor must be positive") {}
};

struct Lineage {
  std::string parent;
  IMat rows;  // rows * parent.gram * rows^T = gram
};

// Positive-definite lattice given by its Gram matrix.
struct Lattice {
  QMat gram;
  std::string label;
  std::optional<Lineage> lineage;

  Lattice() = default;
  explicit Lattice(QMat g, std::string lbl = {}) : gram(std::move(g)), label(std::move(lbl)) { validate(); }

  std::size_t dim() const { return gram.rows; }

  void validate() const {
    if (!gram.symmetric()) throw std::invalid_argument("gram matrix is not symmetric");
    // leading principal minors via fraction-free elimination
    std::size_t n = gram.rows;
    QMat a = gram;
    for (std::size_t k = 0; k < n; ++k) {
      if (a(k, k) <= 0) throw NotPositiveDefinite();
      for (std::size_t i = k + 1; i < n; ++i) {
        Rat f = a(i, k) / a(k, k);
        if (f == 0) continue;
        for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      }
    }
  }

  Rat norm(const Vec& v) const { return bilinear(gram, v, v); }
  Rat inner(const Vec& v, const Vec& w) const { return bilinear(gram, v, w); }
  Rat determinant() const { return det(gram); }

  bool integral() const {
    for (auto& e : gram.a)
      if (!is_integer(e)) return false;
    return true;
  }

  bool even() const {
    if (!integral()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (gram(i, i).get_num() % 2 != 0) return false;
    return true;
  }

  // D * gram with the least D > 0 making it integral
  std::pair<IMat, Int> scaled_gram() const {
    Int d = common_denominator(gram);
    return {to_int_exact(scaled(gram, Rat(d))), d};
  }
};

inline Lattice dual(const Lattice& l) {
  Lattice d(inverse(l.gram), l.label.empty() ? std::string() : l.label + "*");
  return d;
}

inline Lattice rescale(const Lattice& l, const Rat& c) {
  if (c <= 0) throw NonPositiveScale();
  Lattice r(scaled(l.gram, c), l.label);
  r.lineage = l.lineage;
  return r;
}

// Sublattice with basis rows (in the coordinates of l).
inline Lattice sublattice(const Lattice& l, const IMat& rows, std::string label = {}) {
  QMat r = to_rat(rows);
  Lattice s(r * l.gram * r.transpose(), std::move(label));
  s.lineage = Lineage{l.label, rows};
  return s;
}

// Lattice spanned by rational vectors (rows, in coordinates of l) whose
// span is given by an integral basis-change after scaling; rows must be independent.
inline Lattice span_rational(const Lattice& l, const QMat& rows, std::string label = {}) {
  Lattice s(rows * l.gram * rows.transpose(), std::move(label));
  return s;
}

}  // namespace sperf
