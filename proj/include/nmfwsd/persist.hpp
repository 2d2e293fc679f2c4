#pragma once

// On-disk layouts.
//
// Matrices directory (one target word):
//   A.txt B.txt [C.txt] [D.txt]   triplet format (matrix_io.hpp)
//   vocab_A.txt vocab_B.txt       one lemma per line, index = line number
//   labels.txt                    sense label per row of A ("" = unlabeled)
//   meta.json                     target_lemma, window, min_count, stop_pos,
//                                 instance_ids
//
// Model directory (one target word):
//   H.txt [G.txt] sense_vectors.txt vocab_A.txt vocab_B.txt
//   manifest.json                 variant, k, window, sense_ids,
//                                 most_frequent_sense, target_lemma, stop_pos
//
// Several targets share a parent directory holding index.json, which maps
// each target lemma to its subdirectory.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nmfwsd/corpus.hpp"
#include "nmfwsd/wsd.hpp"

namespace nmfwsd {

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

void save_corpus_matrices(const std::filesystem::path& dir,
                          const CorpusMatrices& matrices);
CorpusMatrices load_corpus_matrices(const std::filesystem::path& dir);

void save_model(const std::filesystem::path& dir, const SenseModel& model);
SenseModel load_model(const std::filesystem::path& dir);

struct TargetEntry {
  std::string target_lemma;
  /// Relative to the index directory.
  std::string subdir;
};

/// Subdirectory name for the i-th target ("w000", "w001", ...).
std::string target_subdir(std::size_t i);
void write_target_index(const std::filesystem::path& dir,
                        const std::vector<TargetEntry>& entries);
std::vector<TargetEntry> read_target_index(const std::filesystem::path& dir);

}  // namespace nmfwsd
