#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace ncauth::linalg {

// Dense row-major matrix over a field context F (see gf.hpp for the context
// concept). Sizes here are tiny, so clarity wins over cleverness throughout.
template <class F>
struct Mat {
  using Elem = typename F::Elem;

  std::size_t rows = 0, cols = 0;
  std::vector<Elem> a;

  Mat() = default;
  Mat(const F& f, std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, f.zero()) {}

  Elem& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const Elem& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  friend bool operator==(const Mat&, const Mat&) = default;
};

// In-place reduced row echelon form over the first pivot_cols columns
// (columns beyond that ride along as an augmented block). Returns the pivot
// columns in order; rank is their count.
template <class F>
std::vector<std::size_t> rref(const F& f, Mat<F>& m, std::size_t pivot_cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < pivot_cols && row < m.rows; ++col) {
    std::size_t sel = row;
    while (sel < m.rows && f.is_zero(m.at(sel, col))) ++sel;
    if (sel == m.rows) continue;
    for (std::size_t c = 0; c < m.cols; ++c) std::swap(m.at(sel, c), m.at(row, c));
    const auto piv_inv = f.inv(m.at(row, col));
    for (std::size_t c = 0; c < m.cols; ++c) m.at(row, c) = f.mul(m.at(row, c), piv_inv);
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == row || f.is_zero(m.at(r, col))) continue;
      const auto factor = m.at(r, col);
      for (std::size_t c = 0; c < m.cols; ++c)
        m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
std::size_t rank(const F& f, Mat<F> m) {
  return rref(f, m, m.cols).size();
}

// Solves A X = B for X (A: r x c, B: r x d). Returns nullopt when
// inconsistent; free variables are set to zero.
template <class F>
std::optional<Mat<F>> solve(const F& f, const Mat<F>& A, const Mat<F>& B) {
  Mat<F> aug(f, A.rows, A.cols + B.cols);
  for (std::size_t r = 0; r < A.rows; ++r) {
    for (std::size_t c = 0; c < A.cols; ++c) aug.at(r, c) = A.at(r, c);
    for (std::size_t c = 0; c < B.cols; ++c) aug.at(r, A.cols + c) = B.at(r, c);
  }
  const auto pivots = rref(f, aug, A.cols);
  for (std::size_t r = pivots.size(); r < aug.rows; ++r)
    for (std::size_t c = 0; c < B.cols; ++c)
      if (!f.is_zero(aug.at(r, A.cols + c))) return std::nullopt;
  Mat<F> X(f, A.cols, B.cols);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t c = 0; c < B.cols; ++c) X.at(pivots[i], c) = aug.at(i, A.cols + c);
  return X;
}

// Basis of the right null space of A, one vector (length A.cols) per free
// column.
template <class F>
std::vector<std::vector<typename F::Elem>> kernel_basis(const F& f, Mat<F> A) {
  const auto pivots = rref(f, A, A.cols);
  std::vector<bool> is_pivot(A.cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<typename F::Elem>> basis;
  for (std::size_t j = 0; j < A.cols; ++j) {
    if (is_pivot[j]) continue;
    std::vector<typename F::Elem> v(A.cols, f.zero());
    v[j] = f.one();
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(A.at(i, j));
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class F>
Mat<F> matmul(const F& f, const Mat<F>& A, const Mat<F>& B) {
  Mat<F> C(f, A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      if (f.is_zero(A.at(i, k))) continue;
      for (std::size_t j = 0; j < B.cols; ++j)
        C.at(i, j) = f.add(C.at(i, j), f.mul(A.at(i, k), B.at(k, j)));
    }
  return C;
}

}  // namespace ncauth::linalg
