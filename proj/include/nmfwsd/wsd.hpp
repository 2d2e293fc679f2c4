#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmfwsd/corpus.hpp"
#include "nmfwsd/interleaved.hpp"
#include "nmfwsd/nmf.hpp"

namespace nmfwsd {

enum class Variant {
  /// NMF of A alone; train and test vectors both folded with H.
  Baseline1,
  /// Interleaved A, B, C with C counted on the training sentences.
  LatentLocal,
  /// Interleaved A, B, D with D counted on a global dependency corpus.
  LatentGlobal,
};

std::string to_string(Variant variant);
/// Accepts the CLI names (baseline1, local, global) and the enum names.
Variant parse_variant(const std::string& name);

struct TrainConfig {
  Variant variant = Variant::LatentGlobal;
  /// Used by Baseline1.
  NmfConfig nmf;
  /// Used by the latent variants.
  InterleavedConfig interleaved;
};

/// Latent sense centroids plus what is needed to fold in new instances.
struct SenseModel {
  Variant variant = Variant::LatentGlobal;
  std::string target_lemma;
  Index k = 0;
  std::vector<std::string> sense_ids;
  std::vector<Vector<double>> sense_vectors;
  /// H: folds A-space centroids.
  DenseMatrix<double> fold_matrix_train;
  /// H for Baseline1, G otherwise.
  DenseMatrix<double> fold_matrix_test;
  Vocabulary vocab_A;
  Vocabulary vocab_B;
  std::size_t window = 5;
  PosStopList stop_pos = default_stop_pos();
  std::string most_frequent_sense;
};

struct Classification {
  std::string sense;
  /// Cosine against each entry of sense_ids, in the same order.
  std::vector<double> scores;
  /// Set when no in-vocabulary feature was found.
  bool fallback = false;
};

/// Mean row per sense, senses in order of first appearance.
std::vector<std::pair<std::string, Vector<double>>> sense_centroids(
    const SparseMatrix<double>& rows, std::span<const std::string> labels);

/// As above, but in the given sense order; a listed sense without rows is a
/// ConfigError.
std::vector<std::pair<std::string, Vector<double>>> sense_centroids(
    const SparseMatrix<double>& rows, std::span<const std::string> labels,
    std::span<const std::string> senses);

/// v M^T: maps a feature vector into the k-dimensional latent space.
template <typename VDerived, typename MDerived>
Vector<typename MDerived::Scalar> fold_in(const Eigen::MatrixBase<VDerived>& v,
                                          const Eigen::MatrixBase<MDerived>& m) {
  if (v.size() != m.cols())
    throw ShapeError("fold_in: vector of " + std::to_string(v.size()) +
                     " features against a " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " fold matrix");
  return m * v.derived().reshaped();
}

/// Cosine similarity; 0 when either norm is below 1e-12.
template <typename UDerived, typename VDerived>
typename UDerived::Scalar cosine(const Eigen::MatrixBase<UDerived>& u,
                                 const Eigen::MatrixBase<VDerived>& v) {
  using Scalar = typename UDerived::Scalar;
  if (u.size() != v.size())
    throw ShapeError("cosine: " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + " dimensions");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu < Scalar(1e-12) || nv < Scalar(1e-12)) return Scalar(0);
  const Scalar c = u.derived().reshaped().dot(v.derived().reshaped()) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

SenseModel train(std::span<const std::string> labels,
                 const CorpusMatrices& matrices, const TrainConfig& config);

/// Labels are taken from the instances, which must match the rows of
/// matrices.A one to one.
SenseModel train(std::span<const Instance> train_instances,
                 const CorpusMatrices& matrices, const TrainConfig& config);

/// Test-time feature vector for the model's variant.
Vector<double> test_features(const SenseModel& model, const Instance& instance);

Classification classify(const SenseModel& model, const Instance& instance);

}  // namespace nmfwsd
