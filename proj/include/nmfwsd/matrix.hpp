#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmfwsd/errors.hpp"

namespace nmfwsd {

using Index = Eigen::Index;

/// Row-major dense matrix; factor matrices (W, H, G, F, ...) live here.
template <typename Scalar = double>
using DenseMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using Triplet = Eigen::Triplet<Scalar, Index>;

/// Default floor for denominators and logarithm arguments.
inline constexpr double kDefaultEpsilon = 1e-12;

template <typename Derived>
bool is_nonnegative(const Eigen::DenseBase<Derived>& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const auto v = m(i, j);
      if (!std::isfinite(v) || v < 0) return false;
    }
  return true;
}

template <typename Derived>
void require_nonnegative(const Eigen::DenseBase<Derived>& m,
                         const std::string& what) {
  if (!is_nonnegative(m))
    throw NonNegativityViolation(what + " has a negative or non-finite entry");
}

/// Non-negative sparse count matrix in compressed-row form.
///
/// Instances only come out of from_triplets (or copies of one), so every
/// stored value is finite and >= 0, coordinates are unique, and entries of
/// each row are sorted by ascending column.
template <typename Scalar = double>
class SparseMatrix {
 public:
  using Storage = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

  SparseMatrix() = default;

  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::span<const Triplet<Scalar>> triplets) {
    if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
    for (const auto& t : triplets) {
      if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
        throw IndexError("triplet (" + std::to_string(t.row()) + ", " +
                         std::to_string(t.col()) + ") outside " +
                         std::to_string(rows) + "x" + std::to_string(cols));
      if (!std::isfinite(t.value()) || t.value() < 0)
        throw NonNegativityViolation("triplet (" + std::to_string(t.row()) +
                                     ", " + std::to_string(t.col()) +
                                     ") has value " +
                                     std::to_string(t.value()));
    }
    Storage s(rows, cols);
    // Duplicates are summed in input order.
    s.setFromTriplets(triplets.begin(), triplets.end());
    s.prune(Scalar(0));
    s.makeCompressed();
    return SparseMatrix(std::move(s));
  }

  static SparseMatrix zero(Index rows, Index cols) {
    return from_triplets(rows, cols, {});
  }

  Index rows() const { return storage_.rows(); }
  Index cols() const { return storage_.cols(); }
  Index nonzeros() const { return storage_.nonZeros(); }
  Scalar coeff(Index r, Index c) const { return storage_.coeff(r, c); }
  const Storage& storage() const { return storage_; }

  /// Calls fn(row, col, value) in row-major, ascending-column order.
  template <typename Fn>
  void for_each_nonzero(Fn&& fn) const {
    for (Index r = 0; r < storage_.outerSize(); ++r)
      for (typename Storage::InnerIterator it(storage_, r); it; ++it)
        fn(r, it.col(), it.value());
  }

  std::vector<Triplet<Scalar>> triplets() const {
    std::vector<Triplet<Scalar>> out;
    out.reserve(static_cast<std::size_t>(nonzeros()));
    for_each_nonzero(
        [&](Index r, Index c, Scalar v) { out.emplace_back(r, c, v); });
    return out;
  }

  DenseMatrix<Scalar> densify() const { return DenseMatrix<Scalar>(storage_); }

  bool operator==(const SparseMatrix& other) const {
    return rows() == other.rows() && cols() == other.cols() &&
           triplets_equal(other);
  }

 private:
  explicit SparseMatrix(Storage s) : storage_(std::move(s)) {}

  bool triplets_equal(const SparseMatrix& other) const {
    const auto a = triplets();
    const auto b = other.triplets();
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const auto& x, const auto& y) {
                        return x.row() == y.row() && x.col() == y.col() &&
                               x.value() == y.value();
                      });
  }

  Storage storage_;
};

template <typename Scalar>
SparseMatrix<Scalar> from_triplets(Index rows, Index cols,
                                   std::span<const Triplet<Scalar>> triplets) {
  return SparseMatrix<Scalar>::from_triplets(rows, cols, triplets);
}

inline SparseMatrix<double> from_triplets(
    Index rows, Index cols, const std::vector<Triplet<double>>& triplets) {
  return SparseMatrix<double>::from_triplets(rows, cols, triplets);
}

template <typename Scalar>
DenseMatrix<Scalar> densify(const SparseMatrix<Scalar>& s) {
  return s.densify();
}

template <typename Lhs, typename Rhs>
DenseMatrix<typename Lhs::Scalar> matmul(const Eigen::MatrixBase<Lhs>& lhs,
                                         const Eigen::MatrixBase<Rhs>& rhs) {
  if (lhs.cols() != rhs.rows())
    throw ShapeError("matmul: " + std::to_string(lhs.rows()) + "x" +
                     std::to_string(lhs.cols()) + " times " +
                     std::to_string(rhs.rows()) + "x" +
                     std::to_string(rhs.cols()));
  return lhs * rhs;
}

/// Rows are accumulated in ascending column order of the sparse operand.
template <typename Scalar, typename Rhs>
DenseMatrix<Scalar> sparse_dense_matmul(const SparseMatrix<Scalar>& lhs,
                                        const Eigen::MatrixBase<Rhs>& rhs) {
  if (lhs.cols() != rhs.rows())
    throw ShapeError("sparse_dense_matmul: " + std::to_string(lhs.rows()) +
                     "x" + std::to_string(lhs.cols()) + " times " +
                     std::to_string(rhs.rows()) + "x" +
                     std::to_string(rhs.cols()));
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(lhs.rows(), rhs.cols());
  lhs.for_each_nonzero(
      [&](Index r, Index c, Scalar v) { out.row(r) += v * rhs.row(c); });
  return out;
}

namespace detail {

template <typename Scalar, typename WDerived, typename HDerived>
void check_factor_shapes(const SparseMatrix<Scalar>& x,
                         const Eigen::MatrixBase<WDerived>& w,
                         const Eigen::MatrixBase<HDerived>& h) {
  if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows())
    throw ShapeError("factors " + std::to_string(w.rows()) + "x" +
                     std::to_string(w.cols()) + " and " +
                     std::to_string(h.rows()) + "x" +
                     std::to_string(h.cols()) + " do not fit a " +
                     std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " matrix");
}

/// (WH)_ij at every stored coordinate of x, in storage order.
template <typename Scalar, typename WDerived, typename HDerived>
std::vector<Scalar> sampled_product(const SparseMatrix<Scalar>& x,
                                    const Eigen::MatrixBase<WDerived>& w,
                                    const Eigen::MatrixBase<HDerived>& h) {
  std::vector<Scalar> y;
  y.reserve(static_cast<std::size_t>(x.nonzeros()));
  x.for_each_nonzero(
      [&](Index r, Index c, Scalar) { y.push_back(w.row(r).dot(h.col(c))); });
  return y;
}

}  // namespace detail

/// Generalized KL divergence D(X || WH) with 0 log 0 = 0.
///
/// Zero entries of X contribute (WH)_ij; their total is sum(WH) minus the
/// part sitting on stored coordinates, so the cost is O(nnz k + (m + n) k).
template <typename Scalar, typename WDerived, typename HDerived>
Scalar kl_objective(const SparseMatrix<Scalar>& x,
                    const Eigen::MatrixBase<WDerived>& w,
                    const Eigen::MatrixBase<HDerived>& h,
                    Scalar epsilon = Scalar(kDefaultEpsilon)) {
  detail::check_factor_shapes(x, w, h);
  const auto y = detail::sampled_product(x, w, h);
  Scalar stored = 0;
  Scalar stored_y = 0;
  std::size_t n = 0;
  x.for_each_nonzero([&](Index, Index, Scalar v) {
    const Scalar yv = y[n++];
    const Scalar term = v * std::log(v / std::max(yv, epsilon)) - v + yv;
    stored += std::max(term, Scalar(0));
    stored_y += yv;
  });
  if (x.nonzeros() == x.rows() * x.cols()) return stored;
  const Scalar total_y = w.colwise().sum().dot(h.rowwise().sum());
  return stored + std::max(total_y - stored_y, Scalar(0));
}

/// Squared Frobenius norm ||X - WH||^2.
template <typename Scalar, typename WDerived, typename HDerived>
Scalar frobenius_objective(const SparseMatrix<Scalar>& x,
                           const Eigen::MatrixBase<WDerived>& w,
                           const Eigen::MatrixBase<HDerived>& h) {
  detail::check_factor_shapes(x, w, h);
  const auto y = detail::sampled_product(x, w, h);
  Scalar stored = 0;
  Scalar stored_y2 = 0;
  std::size_t n = 0;
  x.for_each_nonzero([&](Index, Index, Scalar v) {
    const Scalar yv = y[n++];
    stored += (v - yv) * (v - yv);
    stored_y2 += yv * yv;
  });
  if (x.nonzeros() == x.rows() * x.cols()) return stored;
  // ||WH||_F^2 = <W^T W, H H^T>
  const DenseMatrix<Scalar> wtw = w.transpose() * w;
  const DenseMatrix<Scalar> hht = h * h.transpose();
  const Scalar total_y2 = wtw.cwiseProduct(hht).sum();
  return stored + std::max(total_y2 - stored_y2, Scalar(0));
}

}  // namespace nmfwsd
