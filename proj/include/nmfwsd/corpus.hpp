#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmfwsd/matrix.hpp"

namespace nmfwsd {

struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;
  /// 0-based index of the head token; absent for the root.
  std::optional<std::size_t> head;
  std::optional<std::string> deprel;

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;

/// One occurrence of a target word, sense-tagged for training.
struct Instance {
  std::string id;
  std::string target_lemma;
  std::size_t target_index = 0;
  std::optional<std::string> sense_id;
  Sentence tokens;

  bool operator==(const Instance&) const = default;
};

/// POS tags whose tokens are ignored by every counter.
using PosStopList = std::set<std::string, std::less<>>;

/// Punctuation tags of the Universal Dependencies, UniDic and Penn tag sets.
PosStopList default_stop_pos();

/// Lemma <-> column index map with dense indices in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> lemmas);

  /// Returns the index of lemma, adding it if new. Throws once frozen.
  Index add(std::string_view lemma);
  std::optional<Index> find(std::string_view lemma) const;
  const std::string& lemma(Index index) const;
  Index size() const { return static_cast<Index>(lemmas_.size()); }
  bool empty() const { return lemmas_.empty(); }
  const std::vector<std::string>& lemmas() const { return lemmas_; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  bool operator==(const Vocabulary& other) const {
    return lemmas_ == other.lemmas_;
  }

 private:
  std::vector<std::string> lemmas_;
  std::map<std::string, Index, std::less<>> index_;
  bool frozen_ = false;
};

enum class VocabRole {
  /// Every non-target lemma of the sentence.
  AColumns,
  /// Lemmas inside the context window around the target.
  BColumns,
};

struct CountingOptions {
  std::size_t window = 5;
  std::size_t min_count = 1;
  PosStopList stop_pos = default_stop_pos();
};

// ---- JSONL input ------------------------------------------------------------

Instance parse_instance(std::string_view json_line, std::size_t line_no = 0);
Sentence parse_sentence(std::string_view json_line, std::size_t line_no = 0);
std::string to_json_line(const Instance& instance);
std::string to_json_line(const Sentence& sentence);

std::vector<Instance> read_instances(std::istream& is);
std::vector<Instance> load_instances(const std::filesystem::path& path);
void save_instances(const std::filesystem::path& path,
                    std::span<const Instance> instances);
void save_sentences(const std::filesystem::path& path,
                    std::span<const Sentence> sentences);

/// Streams a sentence JSONL corpus; blank lines are skipped.
void for_each_sentence(std::istream& is,
                       const std::function<void(const Sentence&)>& fn);
void for_each_sentence(const std::filesystem::path& path,
                       const std::function<void(const Sentence&)>& fn);

/// Groups instances by target lemma, in order of first appearance.
std::vector<std::pair<std::string, std::vector<Instance>>> group_by_target(
    std::span<const Instance> instances);

// ---- feature extraction -----------------------------------------------------

/// Calls fn(lemma) for every token of the sentence except the target.
void for_each_sentence_feature(const Instance& instance,
                               const PosStopList& stop,
                               const std::function<void(const std::string&)>& fn);

/// Calls fn(position) for every token within +-window of the target, target
/// excluded, clipped at the sentence edges.
void for_each_window_position(const Instance& instance, std::size_t window,
                              const PosStopList& stop,
                              const std::function<void(std::size_t)>& fn);

/// Sentence co-occurrence counts over vocab_A (a row of A).
Vector<double> sentence_vector(const Instance& instance,
                               const Vocabulary& vocab_A,
                               const PosStopList& stop = default_stop_pos());

/// Windowed context counts over vocab_B (a row of B).
Vector<double> window_vector(const Instance& instance, const Vocabulary& vocab_B,
                             std::size_t window,
                             const PosStopList& stop = default_stop_pos());

// ---- matrix builders --------------------------------------------------------

Vocabulary build_vocab(std::span<const Instance> instances, VocabRole role,
                       std::size_t min_count, std::size_t window = 5,
                       const PosStopList& stop = default_stop_pos());

/// Instance x vocab_A sentence co-occurrence counts, target token excluded.
SparseMatrix<double> build_matrix_A(std::span<const Instance> instances,
                                    const Vocabulary& vocab_A,
                                    const PosStopList& stop = default_stop_pos());

/// Instance x vocab_B context-window term frequencies.
SparseMatrix<double> build_matrix_B(std::span<const Instance> instances,
                                    const Vocabulary& vocab_B,
                                    std::size_t window,
                                    const PosStopList& stop = default_stop_pos());

/// vocab_B x vocab_A: for each windowed context token c and every other token
/// w of the same sentence (the target included), (c, w) += 1.
SparseMatrix<double> build_matrix_C_local(
    std::span<const Instance> instances, const Vocabulary& vocab_B,
    const Vocabulary& vocab_A, std::size_t window,
    const PosStopList& stop = default_stop_pos());

/// Accumulates direction-agnostic dependency-arc counts into a
/// vocab_B x vocab_A matrix. Memory grows with the number of distinct
/// in-vocabulary pairs, never with corpus length.
class DependencyArcCounter {
 public:
  DependencyArcCounter(const Vocabulary& vocab_B, const Vocabulary& vocab_A,
                       PosStopList stop = default_stop_pos());

  void add(const Sentence& sentence);
  SparseMatrix<double> matrix() const;

 private:
  const Vocabulary* vocab_B_;
  const Vocabulary* vocab_A_;
  PosStopList stop_;
  std::map<std::pair<Index, Index>, double> counts_;
};

/// Single streaming pass over a sentence JSONL corpus.
SparseMatrix<double> build_matrix_D_global(
    const std::filesystem::path& global_corpus, const Vocabulary& vocab_B,
    const Vocabulary& vocab_A, const PosStopList& stop = default_stop_pos());

SparseMatrix<double> build_matrix_D_global(
    std::istream& global_corpus, const Vocabulary& vocab_B,
    const Vocabulary& vocab_A, const PosStopList& stop = default_stop_pos());

/// Everything needed to train one target word.
struct CorpusMatrices {
  std::string target_lemma;
  SparseMatrix<double> A;  // instances x vocab_A
  SparseMatrix<double> B;  // instances x vocab_B
  std::optional<SparseMatrix<double>> C;  // vocab_B x vocab_A, training set
  std::optional<SparseMatrix<double>> D;  // vocab_B x vocab_A, global corpus
  Vocabulary vocab_A;
  Vocabulary vocab_B;
  /// Sense label of each row of A and B (empty when unlabeled).
  std::vector<std::string> labels;
  std::vector<std::string> instance_ids;
  CountingOptions options;
};

/// Builds vocabularies, A, B and C for one target word's training instances.
/// D is left empty; fill it with a DependencyArcCounter or
/// build_matrix_D_global.
CorpusMatrices build_corpus_matrices(std::span<const Instance> instances,
                                     const CountingOptions& options);

}  // namespace nmfwsd
