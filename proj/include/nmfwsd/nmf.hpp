#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nmfwsd/matrix.hpp"

namespace nmfwsd {

enum class Objective { KL, Frobenius };

std::string to_string(Objective objective);
Objective parse_objective(const std::string& name);

/// Parameters for a single-matrix factorization X ~ WH.
struct NmfConfig {
  Index k = 1;
  int max_iters = 200;
  /// Stop once (f_prev - f_cur) / (1 + f_prev) drops below this.
  double tol = 1e-6;
  std::uint64_t seed = 0;
  Objective objective = Objective::KL;
  double epsilon = kDefaultEpsilon;

  void validate() const;
};

template <typename Scalar = double>
struct Factorization {
  DenseMatrix<Scalar> W;
  DenseMatrix<Scalar> H;
  /// Objective at the starting point followed by one value per update step.
  std::vector<Scalar> objective_history;
  int iterations_run = 0;
  bool converged = false;
};

template <typename Scalar, typename WDerived, typename HDerived>
Scalar evaluate_objective(const SparseMatrix<Scalar>& x,
                          const Eigen::MatrixBase<WDerived>& w,
                          const Eigen::MatrixBase<HDerived>& h,
                          Objective objective,
                          Scalar epsilon = Scalar(kDefaultEpsilon)) {
  return objective == Objective::KL ? kl_objective(x, w, h, epsilon)
                                    : frobenius_objective(x, w, h);
}

/// Uniform draw on (0, 1] from the top 53 bits of a 64-bit engine output.
/// Spelled out instead of std::uniform_real_distribution so the stream is
/// identical across standard library implementations.
inline double uniform_open_closed(std::mt19937_64& engine) {
  return static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53;
}

/// Random W (m x k) and H (k x n), entries i.i.d. on (0, 1]; W is filled
/// first, both in row-major order, from one mt19937_64 stream.
template <typename Scalar = double>
std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>> init_factors(
    Index m, Index n, Index k, std::uint64_t seed) {
  if (m < 1 || n < 1 || k < 1)
    throw ShapeError("init_factors: dimensions must be >= 1 (got m=" +
                     std::to_string(m) + ", n=" + std::to_string(n) +
                     ", k=" + std::to_string(k) + ")");
  std::mt19937_64 engine(seed);
  DenseMatrix<Scalar> w(m, k);
  DenseMatrix<Scalar> h(k, n);
  for (Index i = 0; i < m; ++i)
    for (Index a = 0; a < k; ++a)
      w(i, a) = static_cast<Scalar>(uniform_open_closed(engine));
  for (Index a = 0; a < k; ++a)
    for (Index j = 0; j < n; ++j)
      h(a, j) = static_cast<Scalar>(uniform_open_closed(engine));
  return {std::move(w), std::move(h)};
}

namespace detail {

/// x_ij / max((WH)_ij, eps) on the stored pattern of x, in storage order.
template <typename Scalar>
std::vector<Scalar> kl_ratios(const SparseMatrix<Scalar>& x,
                              const DenseMatrix<Scalar>& w,
                              const DenseMatrix<Scalar>& h, Scalar eps) {
  auto y = sampled_product(x, w, h);
  std::size_t n = 0;
  x.for_each_nonzero([&](Index, Index, Scalar v) {
    y[n] = v / std::max(y[n], eps);
    ++n;
  });
  return y;
}

template <typename Scalar>
void kl_update_w(const SparseMatrix<Scalar>& x, DenseMatrix<Scalar>& w,
                 const DenseMatrix<Scalar>& h, Scalar eps) {
  const auto r = kl_ratios(x, w, h, eps);
  // (X ./ WH) H^T
  DenseMatrix<Scalar> numer = DenseMatrix<Scalar>::Zero(w.rows(), w.cols());
  std::size_t n = 0;
  x.for_each_nonzero([&](Index i, Index j, Scalar) {
    numer.row(i) += r[n++] * h.col(j).transpose();
  });
  // 1 H^T: every row holds the row sums of H.
  const Vector<Scalar> hsum = h.rowwise().sum();
  for (Index i = 0; i < w.rows(); ++i)
    for (Index a = 0; a < w.cols(); ++a)
      w(i, a) *= numer(i, a) / std::max(hsum(a), eps);
}

template <typename Scalar>
void kl_update_h(const SparseMatrix<Scalar>& x, const DenseMatrix<Scalar>& w,
                 DenseMatrix<Scalar>& h, Scalar eps) {
  const auto r = kl_ratios(x, w, h, eps);
  // W^T (X ./ WH)
  DenseMatrix<Scalar> numer = DenseMatrix<Scalar>::Zero(h.rows(), h.cols());
  std::size_t n = 0;
  x.for_each_nonzero([&](Index i, Index j, Scalar) {
    numer.col(j) += r[n++] * w.row(i).transpose();
  });
  // W^T 1: every column holds the column sums of W.
  const Vector<Scalar> wsum = w.colwise().sum().transpose();
  for (Index a = 0; a < h.rows(); ++a)
    for (Index j = 0; j < h.cols(); ++j)
      h(a, j) *= numer(a, j) / std::max(wsum(a), eps);
}

template <typename Scalar>
void frobenius_update_w(const SparseMatrix<Scalar>& x, DenseMatrix<Scalar>& w,
                        const DenseMatrix<Scalar>& h, Scalar eps) {
  const DenseMatrix<Scalar> numer = sparse_dense_matmul(x, h.transpose());
  const DenseMatrix<Scalar> hht = h * h.transpose();
  const DenseMatrix<Scalar> denom = w * hht;
  for (Index i = 0; i < w.rows(); ++i)
    for (Index a = 0; a < w.cols(); ++a)
      w(i, a) *= numer(i, a) / std::max(denom(i, a), eps);
}

template <typename Scalar>
void frobenius_update_h(const SparseMatrix<Scalar>& x,
                        const DenseMatrix<Scalar>& w, DenseMatrix<Scalar>& h,
                        Scalar eps) {
  DenseMatrix<Scalar> numer = DenseMatrix<Scalar>::Zero(h.rows(), h.cols());
  x.for_each_nonzero([&](Index i, Index j, Scalar v) {
    numer.col(j) += v * w.row(i).transpose();
  });
  const DenseMatrix<Scalar> wtw = w.transpose() * w;
  const DenseMatrix<Scalar> denom = wtw * h;
  for (Index a = 0; a < h.rows(); ++a)
    for (Index j = 0; j < h.cols(); ++j)
      h(a, j) *= numer(a, j) / std::max(denom(a, j), eps);
}

/// One multiplicative sweep in place: W first, then H against the new W.
template <typename Scalar>
void update_in_place(const SparseMatrix<Scalar>& x, DenseMatrix<Scalar>& w,
                     DenseMatrix<Scalar>& h, Objective objective, Scalar eps,
                     bool update_w = true, bool update_h = true) {
  if (objective == Objective::KL) {
    if (update_w) kl_update_w(x, w, h, eps);
    if (update_h) kl_update_h(x, w, h, eps);
  } else {
    if (update_w) frobenius_update_w(x, w, h, eps);
    if (update_h) frobenius_update_h(x, w, h, eps);
  }
}

}  // namespace detail

/// Lee-Seung multiplicative update for the chosen objective.
///
/// KL:        W <- W .* ((X ./ WH) H^T) ./ (1 H^T),  H <- H .* (W^T (X ./ WH)) ./ (W^T 1)
/// Frobenius: W <- W .* (X H^T) ./ (W H H^T),        H <- H .* (W^T X) ./ (W^T W H)
///
/// Every denominator (and WH inside the KL ratio) is floored at epsilon.
template <typename Scalar>
std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>> update_step(
    const SparseMatrix<Scalar>& x, const DenseMatrix<Scalar>& w,
    const DenseMatrix<Scalar>& h, Objective objective,
    Scalar epsilon = Scalar(kDefaultEpsilon)) {
  detail::check_factor_shapes(x, w, h);
  DenseMatrix<Scalar> w2 = w;
  DenseMatrix<Scalar> h2 = h;
  detail::update_in_place(x, w2, h2, objective, epsilon);
  return {std::move(w2), std::move(h2)};
}

/// Runs updates from (W0, H0). A factor whose flag is false is left as given.
template <typename Scalar>
Factorization<Scalar> factorize_warm(const SparseMatrix<Scalar>& x,
                                     DenseMatrix<Scalar> w0,
                                     DenseMatrix<Scalar> h0,
                                     const NmfConfig& config,
                                     bool update_w = true,
                                     bool update_h = true) {
  config.validate();
  detail::check_factor_shapes(x, w0, h0);
  if (w0.cols() != config.k)
    throw ShapeError("factorize_warm: factors have " +
                     std::to_string(w0.cols()) + " latent columns, config k=" +
                     std::to_string(config.k));
  require_nonnegative(w0, "W0");
  require_nonnegative(h0, "H0");

  const auto eps = static_cast<Scalar>(config.epsilon);
  Factorization<Scalar> out{std::move(w0), std::move(h0), {}, 0, false};
  out.objective_history.reserve(static_cast<std::size_t>(config.max_iters) + 1);
  Scalar previous = evaluate_objective(x, out.W, out.H, config.objective, eps);
  out.objective_history.push_back(previous);

  for (int it = 1; it <= config.max_iters; ++it) {
    detail::update_in_place(x, out.W, out.H, config.objective, eps, update_w,
                            update_h);
    const Scalar current =
        evaluate_objective(x, out.W, out.H, config.objective, eps);
    out.objective_history.push_back(current);
    out.iterations_run = it;
    if ((previous - current) / (Scalar(1) + previous) < config.tol) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  return out;
}

/// Cold-start factorization from init_factors(rows, cols, k, seed).
template <typename Scalar>
Factorization<Scalar> factorize(const SparseMatrix<Scalar>& x,
                                const NmfConfig& config) {
  config.validate();
  if (config.k > std::min(x.rows(), x.cols()))
    throw ConfigError("k=" + std::to_string(config.k) +
                      " exceeds min dimension of a " +
                      std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + " matrix");
  auto [w, h] = init_factors<Scalar>(x.rows(), x.cols(), config.k, config.seed);
  return factorize_warm(x, std::move(w), std::move(h), config);
}

}  // namespace nmfwsd
