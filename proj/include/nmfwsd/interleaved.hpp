#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <tuple>
#include <type_traits>
#include <vector>

#include "nmfwsd/nmf.hpp"

namespace nmfwsd {

/// Schedule for the coupled A/B/C factorization.
struct InterleavedConfig {
  Index k = 1;
  /// Full A -> B -> C cycles.
  int outer_iters = 50;
  /// Per-block settings; inner.k is ignored in favour of k above.
  NmfConfig inner{.max_iters = 10};

  void validate() const;
  NmfConfig block_config() const {
    NmfConfig c = inner;
    c.k = k;
    return c;
  }
};

/// Factors of A ~ WH, B ~ WG, C ~ G^T F with H = F on return.
template <typename Scalar = double>
struct CoupledFactorization {
  DenseMatrix<Scalar> W;  // m x k
  DenseMatrix<Scalar> H;  // k x n
  DenseMatrix<Scalar> G;  // k x p
  DenseMatrix<Scalar> F;  // k x n
  /// Final objective of each block's inner run, one entry per cycle.
  std::vector<Scalar> objective_A;
  std::vector<Scalar> objective_B;
  std::vector<Scalar> objective_C;
  int cycles_run = 0;
  bool converged = false;

  Scalar joint_objective(std::size_t cycle) const {
    return objective_A.at(cycle) + objective_B.at(cycle) +
           objective_C.at(cycle);
  }
};

template <typename Scalar = double>
struct CouplingAudit {
  Scalar max_abs_h_minus_f = 0;
  /// W, H, G and F agree on the latent dimension and H, F share a shape.
  bool latent_dims_agree = false;
  /// Only evaluated when the blocks are supplied.
  std::optional<bool> blocks_fit;
  bool nonnegative = false;
};

template <typename Scalar>
CouplingAudit<Scalar> copy_coupling_audit(const CoupledFactorization<Scalar>& cf) {
  CouplingAudit<Scalar> audit;
  const Index k = cf.W.cols();
  audit.latent_dims_agree = cf.H.rows() == k && cf.G.rows() == k &&
                            cf.F.rows() == k && cf.H.cols() == cf.F.cols();
  if (cf.H.rows() == cf.F.rows() && cf.H.cols() == cf.F.cols()) {
    audit.max_abs_h_minus_f =
        cf.H.size() == 0 ? Scalar(0) : (cf.H - cf.F).cwiseAbs().maxCoeff();
  } else {
    audit.max_abs_h_minus_f = std::numeric_limits<Scalar>::infinity();
  }
  audit.nonnegative = is_nonnegative(cf.W) && is_nonnegative(cf.H) &&
                      is_nonnegative(cf.G) && is_nonnegative(cf.F);
  return audit;
}

template <typename Scalar>
CouplingAudit<Scalar> copy_coupling_audit(const CoupledFactorization<Scalar>& cf,
                                          const SparseMatrix<Scalar>& a,
                                          const SparseMatrix<Scalar>& b,
                                          const SparseMatrix<Scalar>& c) {
  auto audit = copy_coupling_audit(cf);
  audit.blocks_fit = cf.W.rows() == a.rows() && cf.W.rows() == b.rows() &&
                     cf.H.cols() == a.cols() && cf.H.cols() == c.cols() &&
                     cf.G.cols() == b.cols() && cf.G.cols() == c.rows();
  return audit;
}

namespace detail {

template <typename Scalar>
void check_block_coupling(const SparseMatrix<Scalar>& a,
                          const SparseMatrix<Scalar>& b,
                          const SparseMatrix<Scalar>& c) {
  auto dims = [](const auto& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
  };
  if (a.rows() != b.rows() || b.cols() != c.rows() || c.cols() != a.cols())
    throw ShapeError("interleaved blocks do not couple: A " + dims(a) +
                     ", B " + dims(b) + ", C " + dims(c));
}

/// Seed for the (G, F) pair, kept apart from the (W, H) stream.
constexpr std::uint64_t secondary_seed(std::uint64_t seed) {
  return seed + 0x9E3779B97F4A7C15ULL;
}

}  // namespace detail

/// Interleaved factorization of A (m x n), B (m x p) and C (p x n).
///
/// Each cycle: factorize A from (W, H); copy W into V and factorize B from
/// (V, G), keeping V as the new W; copy G^T into U and factorize C from
/// (U, F), keeping U^T as the new G; finally copy F into H. Both factors of
/// every block are updated. (W, H) start from init_factors(m, n, k, seed),
/// so the first A block reproduces a plain factorize() of A. The run stops
/// after outer_iters cycles or once the summed block objective improves by
/// less than inner.tol (relative).
///
/// on_cycle, when set, observes the state after every completed cycle.
template <typename Scalar>
CoupledFactorization<Scalar> interleaved_factorize(
    const SparseMatrix<Scalar>& a, const SparseMatrix<Scalar>& b,
    const SparseMatrix<Scalar>& c, const InterleavedConfig& config,
    const std::type_identity_t<
        std::function<void(const CoupledFactorization<Scalar>&)>>& on_cycle =
        {}) {
  config.validate();
  detail::check_block_coupling(a, b, c);
  const Index k = config.k;
  const Index smallest = std::min({a.rows(), a.cols(), b.cols()});
  if (k > smallest)
    throw ConfigError("k=" + std::to_string(k) +
                      " exceeds the smallest block dimension " +
                      std::to_string(smallest));

  const NmfConfig block = config.block_config();
  CoupledFactorization<Scalar> cf;
  std::tie(cf.W, cf.H) =
      init_factors<Scalar>(a.rows(), a.cols(), k, config.inner.seed);
  DenseMatrix<Scalar> u;
  std::tie(u, cf.F) = init_factors<Scalar>(
      c.rows(), c.cols(), k, detail::secondary_seed(config.inner.seed));
  cf.G = u.transpose();

  std::optional<Scalar> previous;
  for (int cycle = 1; cycle <= config.outer_iters; ++cycle) {
    auto fa = factorize_warm(a, std::move(cf.W), std::move(cf.H), block);
    cf.W = std::move(fa.W);
    cf.H = std::move(fa.H);

    auto fb = factorize_warm(b, cf.W, std::move(cf.G), block);  // V <- W
    cf.W = std::move(fb.W);
    cf.G = std::move(fb.H);

    DenseMatrix<Scalar> u0 = cf.G.transpose();  // U <- G^T
    auto fc = factorize_warm(c, std::move(u0), std::move(cf.F), block);
    cf.G = fc.W.transpose();
    cf.F = std::move(fc.H);

    cf.H = cf.F;

    cf.objective_A.push_back(fa.objective_history.back());
    cf.objective_B.push_back(fb.objective_history.back());
    cf.objective_C.push_back(fc.objective_history.back());
    cf.cycles_run = cycle;
    if (on_cycle) on_cycle(cf);

    const Scalar joint = cf.joint_objective(cf.objective_A.size() - 1);
    if (previous && (*previous - joint) / (Scalar(1) + *previous) <
                        static_cast<Scalar>(block.tol)) {
      cf.converged = true;
      break;
    }
    previous = joint;
  }
  return cf;
}

}  // namespace nmfwsd
