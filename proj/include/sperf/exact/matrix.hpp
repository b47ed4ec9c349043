#pragma once

#include "sperf/exact/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace sperf {

using Vec = std::vector<int64_t>;
using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

template <class T>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}
  Mat(std::initializer_list<std::initializer_list<T>> init) {
    rows = init.size();
    cols = rows ? init.begin()->size() : 0;
    a.reserve(rows * cols);
    for (auto& row : init) {
      if (row.size() != cols) throw std::invalid_argument("ragged matrix literal");
      for (auto& x : row) a.push_back(x);
    }
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Mat from_rows(const std::vector<std::vector<T>>& rs, std::size_t ncols = 0) {
    Mat m(rs.size(), rs.empty() ? ncols : rs[0].size());
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (rs[i].size() != m.cols) throw std::invalid_argument("ragged rows");
      for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rs[i][j];
    }
    return m;
  }

  T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool square() const { return rows == cols; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(a.begin() + i * cols, a.begin() + (i + 1) * cols);
  }
  void set_row(std::size_t i, const std::vector<T>& v) {
    for (std::size_t j = 0; j < cols; ++j) (*this)(i, j) = v[j];
  }
  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < cols; ++j) std::swap((*this)(i, j), (*this)(k, j));
  }
  void swap_cols(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t r = 0; r < rows; ++r) std::swap((*this)(r, i), (*this)(r, k));
  }

  Mat transpose() const {
    Mat t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool symmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  bool operator!=(const Mat& o) const { return !(*this == o); }
};

using IMat = Mat<Int>;
using QMat = Mat<Rat>;

template <class T>
Mat<T> operator*(const Mat<T>& x, const Mat<T>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("dimension mismatch in product");
  Mat<T> z(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const T& xik = x(i, k);
      if (xik == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

template <class T>
Mat<T> operator+(const Mat<T>& x, const Mat<T>& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("dimension mismatch in sum");
  Mat<T> z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
  return z;
}

template <class T>
Mat<T> operator-(const Mat<T>& x, const Mat<T>& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("dimension mismatch in difference");
  Mat<T> z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
  return z;
}

template <class T, class S>
Mat<T> scaled(const Mat<T>& x, const S& c) {
  Mat<T> z = x;
  for (auto& e : z.a) e *= c;
  return z;
}

inline QMat to_rat(const IMat& m) {
  QMat q(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) q.a[i] = Rat(m.a[i]);
  return q;
}

inline IMat to_int_exact(const QMat& m) {
  IMat z(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) {
    if (m.a[i].get_den() != 1) throw std::domain_error("matrix entry is not integral");
    z.a[i] = m.a[i].get_num();
  }
  return z;
}

inline IMat from_vecs(const std::vector<Vec>& rs, std::size_t ncols = 0) {
  IMat m(rs.size(), rs.empty() ? ncols : rs[0].size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = Int((long)rs[i][j]);
  return m;
}

inline std::vector<Vec> to_vecs(const IMat& m) {
  std::vector<Vec> out(m.rows, Vec(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = to_i64(m(i, j));
  return out;
}

// least D > 0 with D*m integral
inline Int common_denominator(const QMat& m) {
  Int d = 1;
  for (auto& e : m.a) d = lcm(d, e.get_den());
  return d;
}

// v * m * w^T for integer row vectors
inline Rat bilinear(const QMat& m, const Vec& v, const Vec& w) {
  Rat s = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (v[i] == 0) continue;
    Rat t = 0;
    for (std::size_t j = 0; j < m.cols; ++j)
      if (w[j]) t += m(i, j) * Int((long)w[j]);
    s += t * Int((long)v[i]);
  }
  return s;
}

inline Rat bilinear(const QMat& m, const QVec& v, const QVec& w) {
  Rat s = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (v[i] == 0) continue;
    Rat t = 0;
    for (std::size_t j = 0; j < m.cols; ++j)
      if (w[j] != 0) t += m(i, j) * w[j];
    s += t * v[i];
  }
  return s;
}

inline QVec to_qvec(const Vec& v) {
  QVec q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = Rat((long)v[i]);
  return q;
}

// row vector times matrix
template <class T>
std::vector<T> vec_mul(const std::vector<T>& v, const Mat<T>& m) {
  std::vector<T> out(m.cols, T(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

inline Vec vec_mul(const Vec& v, const IMat& m) {
  Vec out(m.cols, 0);
  for (std::size_t j = 0; j < m.cols; ++j) {
    Int s = 0;
    for (std::size_t i = 0; i < m.rows; ++i)
      if (v[i]) s += Int((long)v[i]) * m(i, j);
    out[j] = to_i64(s);
  }
  return out;
}

template <class T>
Mat<T> block_diag(const Mat<T>& x, const Mat<T>& y) {
  Mat<T> z(x.rows + y.rows, x.cols + y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) z(i, j) = x(i, j);
  for (std::size_t i = 0; i < y.rows; ++i)
    for (std::size_t j = 0; j < y.cols; ++j) z(x.rows + i, x.cols + j) = y(i, j);
  return z;
}

template <class T>
Mat<T> vstack(const Mat<T>& x, const Mat<T>& y) {
  if (x.rows && y.rows && x.cols != y.cols) throw std::invalid_argument("column mismatch in vstack");
  Mat<T> z(x.rows + y.rows, x.rows ? x.cols : y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < z.cols; ++j) z(i, j) = x(i, j);
  for (std::size_t i = 0; i < y.rows; ++i)
    for (std::size_t j = 0; j < z.cols; ++j) z(x.rows + i, j) = y(i, j);
  return z;
}

template <class T>
Mat<T> kron(const Mat<T>& x, const Mat<T>& y) {
  Mat<T> z(x.rows * y.rows, x.cols * y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      for (std::size_t k = 0; k < y.rows; ++k)
        for (std::size_t l = 0; l < y.cols; ++l) z(i * y.rows + k, j * y.cols + l) = x(i, j) * y(k, l);
  return z;
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Mat<T>& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    os << "[";
    for (std::size_t j = 0; j < m.cols; ++j) os << (j ? " " : "") << m(i, j);
    os << "]\n";
  }
  return os;
}

}  // namespace sperf
