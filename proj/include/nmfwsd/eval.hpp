#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmfwsd/corpus.hpp"
#include "nmfwsd/wsd.hpp"

namespace nmfwsd {

/// One experiment: a system trained and scored once per seed.
struct RunSpec {
  Variant variant = Variant::LatentGlobal;
  Index k = 10;
  CountingOptions counting;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  Objective objective = Objective::KL;
  /// Baseline1 NMF iterations.
  int max_iters = 200;
  double tol = 1e-6;
  int outer_iters = 50;
  int inner_iters = 10;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  /// Empty when no global corpus is used.
  std::filesystem::path global_path;

  void validate() const;
  /// Training configuration for one word, all randomness from word_seed.
  TrainConfig train_config(std::uint64_t word_seed) const;
};

/// Seed for one target word in one run: splitmix64(run_seed ^ fnv1a64(word)).
/// Independent of where the word sits in the input.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view target);

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t fallbacks = 0;
  /// correct / total over every test instance of every word.
  double micro_precision = 0;

  bool operator==(const RunResult&) const = default;
};

struct WordResult {
  std::string target;
  std::size_t test_count = 0;
  /// Per run, aligned with EvalReport::runs.
  std::vector<std::size_t> correct;
  std::vector<std::size_t> fallbacks;
  std::vector<double> precision;

  bool operator==(const WordResult&) const = default;
};

struct EvalReport {
  std::string system;
  /// Echo of the settings that produced the report, in a fixed order.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<RunResult> runs;
  std::vector<WordResult> words;
  /// Arithmetic mean of the runs' micro precisions.
  double average_precision = 0;

  bool operator==(const EvalReport&) const = default;
};

enum class ReportFormat { TSV, JSON };
ReportFormat parse_report_format(const std::string& name);

/// Fraction of positions where predicted equals gold.
double precision(std::span<const std::string> predicted,
                 std::span<const std::string> gold);

double average_precision(std::span<const RunResult> runs);

/// Index of the first maximum; the cell flagged in rendered reports.
std::size_t best_index(std::span<const double> values);

/// Recomputes average_precision from the runs.
void finalize_report(EvalReport& report);

/// Feeds every sentence of a global corpus to a callback.
using SentenceSource =
    std::function<void(const std::function<void(const Sentence&)>&)>;

SentenceSource sentences_from_file(std::filesystem::path path);
SentenceSource sentences_from(std::span<const Sentence> sentences);

/// Loads the files named in spec and runs the protocol.
EvalReport run_experiment(const RunSpec& spec);

/// For every seed and every target word (in order of first appearance in
/// train): train on that word's instances and classify its test instances.
/// Matrices are built once; the global corpus, when needed, is read in a
/// single pass shared by all words.
EvalReport run_experiment(const RunSpec& spec, std::span<const Instance> train,
                          std::span<const Instance> test,
                          const SentenceSource& global);

/// TSV: a header, one row for the pooled system result and one per word;
/// per-run columns followed by the average, the best run of each row marked
/// with '*'. A report without words renders the header alone.
std::string report_render(const EvalReport& report, ReportFormat format);

EvalReport parse_report_json(const std::string& text);

}  // namespace nmfwsd
