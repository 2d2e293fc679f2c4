#include "nmfwsd/wsd.hpp"

#include <map>
#include <unordered_map>

namespace nmfwsd {

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::Baseline1:
      return "baseline1";
    case Variant::LatentLocal:
      return "local";
    case Variant::LatentGlobal:
      return "global";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline1" || name == "Baseline1") return Variant::Baseline1;
  if (name == "local" || name == "LatentLocal") return Variant::LatentLocal;
  if (name == "global" || name == "LatentGlobal") return Variant::LatentGlobal;
  throw ConfigError("unknown variant '" + name +
                    "' (expected baseline1|local|global)");
}

std::vector<std::pair<std::string, Vector<double>>> sense_centroids(
    const SparseMatrix<double>& rows, std::span<const std::string> labels) {
  std::vector<std::string> order;
  std::unordered_map<std::string, bool> seen;
  for (const auto& l : labels)
    if (seen.emplace(l, true).second) order.push_back(l);
  return sense_centroids(rows, labels, order);
}

std::vector<std::pair<std::string, Vector<double>>> sense_centroids(
    const SparseMatrix<double>& rows, std::span<const std::string> labels,
    std::span<const std::string> senses) {
  if (static_cast<Index>(labels.size()) != rows.rows())
    throw ShapeError("sense_centroids: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(rows.rows()) + " rows");
  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t s = 0; s < senses.size(); ++s) slot.emplace(senses[s], s);

  std::vector<Vector<double>> sums(senses.size(),
                                   Vector<double>::Zero(rows.cols()));
  std::vector<std::size_t> counts(senses.size(), 0);
  std::vector<std::size_t> row_sense(labels.size(), senses.size());
  for (std::size_t r = 0; r < labels.size(); ++r)
    if (auto it = slot.find(labels[r]); it != slot.end()) {
      row_sense[r] = it->second;
      ++counts[it->second];
    }
  rows.for_each_nonzero([&](Index r, Index c, double v) {
    const auto s = row_sense[static_cast<std::size_t>(r)];
    if (s < senses.size()) sums[s](c) += v;
  });

  std::vector<std::pair<std::string, Vector<double>>> out;
  out.reserve(senses.size());
  for (std::size_t s = 0; s < senses.size(); ++s) {
    if (counts[s] == 0)
      throw ConfigError("sense '" + senses[s] + "' has no training rows");
    out.emplace_back(senses[s], sums[s] / static_cast<double>(counts[s]));
  }
  return out;
}

namespace {

std::string most_frequent(std::span<const std::string> labels) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& l : labels)
    if (counts[l]++ == 0) order.push_back(l);
  std::string best;
  std::size_t best_count = 0;
  for (const auto& l : order)
    if (counts[l] > best_count) {
      best = l;
      best_count = counts[l];
    }
  return best;
}

}  // namespace

SenseModel train(std::span<const std::string> labels,
                 const CorpusMatrices& matrices, const TrainConfig& config) {
  if (static_cast<Index>(labels.size()) != matrices.A.rows())
    throw ConfigError("train: " + std::to_string(labels.size()) +
                      " labels for " + std::to_string(matrices.A.rows()) +
                      " rows of A");
  if (labels.empty()) throw ConfigError("train: no training instances");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].empty())
      throw ConfigError("train: training row " + std::to_string(i) +
                        " has no sense label");

  SenseModel model;
  model.variant = config.variant;
  model.target_lemma = matrices.target_lemma;
  model.vocab_A = matrices.vocab_A;
  model.vocab_B = matrices.vocab_B;
  model.window = matrices.options.window;
  model.stop_pos = matrices.options.stop_pos;
  model.most_frequent_sense = most_frequent(labels);

  if (config.variant == Variant::Baseline1) {
    auto fact = factorize(matrices.A, config.nmf);
    model.k = config.nmf.k;
    model.fold_matrix_train = fact.H;
    model.fold_matrix_test = std::move(fact.H);
  } else {
    const auto& third =
        config.variant == Variant::LatentLocal ? matrices.C : matrices.D;
    if (!third)
      throw ConfigError(std::string("train: variant ") +
                        to_string(config.variant) + " needs matrix " +
                        (config.variant == Variant::LatentLocal ? "C" : "D"));
    auto cf = interleaved_factorize(matrices.A, matrices.B, *third,
                                    config.interleaved);
    model.k = config.interleaved.k;
    model.fold_matrix_train = std::move(cf.H);
    model.fold_matrix_test = std::move(cf.G);
  }

  for (auto& [sense, centroid] : sense_centroids(matrices.A, labels)) {
    model.sense_ids.push_back(sense);
    model.sense_vectors.push_back(fold_in(centroid, model.fold_matrix_train));
  }
  return model;
}

SenseModel train(std::span<const Instance> train_instances,
                 const CorpusMatrices& matrices, const TrainConfig& config) {
  std::vector<std::string> labels;
  labels.reserve(train_instances.size());
  for (const auto& inst : train_instances) {
    if (!inst.sense_id)
      throw ConfigError("train: instance '" + inst.id + "' has no sense_id");
    labels.push_back(*inst.sense_id);
  }
  return train(labels, matrices, config);
}

Vector<double> test_features(const SenseModel& model, const Instance& instance) {
  if (model.variant == Variant::Baseline1)
    return sentence_vector(instance, model.vocab_A, model.stop_pos);
  return window_vector(instance, model.vocab_B, model.window, model.stop_pos);
}

Classification classify(const SenseModel& model, const Instance& instance) {
  Classification out;
  out.scores.assign(model.sense_ids.size(), 0.0);
  const Vector<double> f = test_features(model, instance);
  const Vector<double> d = fold_in(f, model.fold_matrix_test);
  if (f.isZero(0) || d.norm() < 1e-12) {
    out.sense = model.most_frequent_sense;
    out.fallback = true;
    return out;
  }
  std::size_t best = 0;
  for (std::size_t s = 0; s < model.sense_vectors.size(); ++s) {
    out.scores[s] = cosine(d, model.sense_vectors[s]);
    if (out.scores[s] > out.scores[best]) best = s;
  }
  out.sense = model.sense_ids.at(best);
  return out;
}

}  // namespace nmfwsd
