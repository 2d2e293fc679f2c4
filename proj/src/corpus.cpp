#include "nmfwsd/corpus.hpp"

#include <fstream>
#include <istream>
#include <unordered_map>

#include "json.hpp"

namespace nmfwsd {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

PosStopList default_stop_pos() {
  return {"PUNCT", "補助記号", ".", ",", ":", "``", "''", "-LRB-", "-RRB-"};
}

// ---- Vocabulary -------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> lemmas) {
  for (auto& l : lemmas) add(l);
  frozen_ = true;
}

Index Vocabulary::add(std::string_view lemma) {
  if (auto it = index_.find(lemma); it != index_.end()) return it->second;
  if (frozen_)
    throw ConfigError("vocabulary is frozen; cannot add '" +
                      std::string(lemma) + "'");
  const Index id = size();
  lemmas_.emplace_back(lemma);
  index_.emplace(lemmas_.back(), id);
  return id;
}

std::optional<Index> Vocabulary::find(std::string_view lemma) const {
  if (auto it = index_.find(lemma); it != index_.end()) return it->second;
  return std::nullopt;
}

const std::string& Vocabulary::lemma(Index index) const {
  if (index < 0 || index >= size())
    throw IndexError("vocabulary index " + std::to_string(index) +
                     " out of range");
  return lemmas_[static_cast<std::size_t>(index)];
}

// ---- JSONL ------------------------------------------------------------------

namespace {

const json& field(const json& obj, const char* name, std::size_t line_no) {
  auto it = obj.find(name);
  if (it == obj.end())
    throw ParseError(line_no, std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name,
                         std::size_t line_no) {
  const auto& v = field(obj, name, line_no);
  if (!v.is_string())
    throw ParseError(line_no, std::string("field '") + name +
                                  "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* name,
                                           std::size_t line_no) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw ParseError(line_no, std::string("field '") + name +
                                  "' must be a string or null");
  return it->get<std::string>();
}

json parse_object(std::string_view text, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
  return obj;
}

Sentence parse_tokens(const json& obj, std::size_t line_no) {
  const auto& arr = field(obj, "tokens", line_no);
  if (!arr.is_array()) throw ParseError(line_no, "'tokens' must be an array");
  Sentence tokens;
  tokens.reserve(arr.size());
  for (const auto& t : arr) {
    if (!t.is_object()) throw ParseError(line_no, "token must be an object");
    Token tok;
    tok.surface = string_field(t, "surface", line_no);
    tok.lemma = string_field(t, "lemma", line_no);
    tok.pos = string_field(t, "pos", line_no);
    if (auto h = t.find("head"); h != t.end() && !h->is_null()) {
      if (!h->is_number_integer())
        throw ParseError(line_no, "'head' must be an integer or null");
      const auto v = h->get<long long>();
      if (v < 0) throw ParseError(line_no, "negative head index");
      tok.head = static_cast<std::size_t>(v);
    }
    tok.deprel = optional_string(t, "deprel", line_no);
    tokens.push_back(std::move(tok));
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& h = tokens[i].head;
    if (h && *h >= tokens.size())
      throw ParseError(line_no, "token " + std::to_string(i) + " has head " +
                                    std::to_string(*h) + " outside sentence of " +
                                    std::to_string(tokens.size()) + " tokens");
    if (h && *h == i)
      throw ParseError(line_no,
                       "token " + std::to_string(i) + " is its own head");
  }
  return tokens;
}

ordered_json tokens_to_json(const Sentence& tokens) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : tokens) {
    ordered_json o;
    o["surface"] = t.surface;
    o["lemma"] = t.lemma;
    o["pos"] = t.pos;
    o["head"] = t.head ? ordered_json(*t.head) : ordered_json(nullptr);
    o["deprel"] = t.deprel ? ordered_json(*t.deprel) : ordered_json(nullptr);
    arr.push_back(std::move(o));
  }
  return arr;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

bool stopped(const Token& t, const PosStopList& stop) {
  return stop.find(t.pos) != stop.end();
}

}  // namespace

Instance parse_instance(std::string_view json_line, std::size_t line_no) {
  const json obj = parse_object(json_line, line_no);
  Instance inst;
  inst.id = string_field(obj, "id", line_no);
  inst.target_lemma = string_field(obj, "target_lemma", line_no);
  const auto& ti = field(obj, "target_index", line_no);
  if (!ti.is_number_integer() || ti.get<long long>() < 0)
    throw ParseError(line_no, "'target_index' must be a non-negative integer");
  inst.target_index = ti.get<std::size_t>();
  inst.sense_id = optional_string(obj, "sense_id", line_no);
  inst.tokens = parse_tokens(obj, line_no);
  if (inst.tokens.empty()) throw ParseError(line_no, "instance has no tokens");
  if (inst.target_index >= inst.tokens.size())
    throw ParseError(line_no, "target_index " +
                                  std::to_string(inst.target_index) +
                                  " outside sentence of " +
                                  std::to_string(inst.tokens.size()) +
                                  " tokens");
  return inst;
}

Sentence parse_sentence(std::string_view json_line, std::size_t line_no) {
  return parse_tokens(parse_object(json_line, line_no), line_no);
}

std::string to_json_line(const Instance& instance) {
  ordered_json o;
  o["id"] = instance.id;
  o["target_lemma"] = instance.target_lemma;
  o["target_index"] = instance.target_index;
  o["sense_id"] = instance.sense_id ? ordered_json(*instance.sense_id)
                                    : ordered_json(nullptr);
  o["tokens"] = tokens_to_json(instance.tokens);
  return o.dump();
}

std::string to_json_line(const Sentence& sentence) {
  ordered_json o;
  o["tokens"] = tokens_to_json(sentence);
  return o.dump();
}

std::vector<Instance> read_instances(std::istream& is) {
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    out.push_back(parse_instance(line, line_no));
  }
  return out;
}

std::vector<Instance> load_instances(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  try {
    return read_instances(is);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  }
}

namespace {

template <typename T>
void save_lines(const std::filesystem::path& path, std::span<const T> items) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  for (const auto& item : items) os << to_json_line(item) << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

void save_instances(const std::filesystem::path& path,
                    std::span<const Instance> instances) {
  save_lines(path, instances);
}

void save_sentences(const std::filesystem::path& path,
                    std::span<const Sentence> sentences) {
  save_lines(path, sentences);
}

void for_each_sentence(std::istream& is,
                       const std::function<void(const Sentence&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    fn(parse_sentence(line, line_no));
  }
}

void for_each_sentence(const std::filesystem::path& path,
                       const std::function<void(const Sentence&)>& fn) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  try {
    for_each_sentence(is, fn);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.message());
  }
}

std::vector<std::pair<std::string, std::vector<Instance>>> group_by_target(
    std::span<const Instance> instances) {
  std::vector<std::pair<std::string, std::vector<Instance>>> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& inst : instances) {
    auto [it, inserted] = slot.emplace(inst.target_lemma, groups.size());
    if (inserted) groups.emplace_back(inst.target_lemma, std::vector<Instance>{});
    groups[it->second].second.push_back(inst);
  }
  return groups;
}

// ---- features ---------------------------------------------------------------

void for_each_sentence_feature(
    const Instance& instance, const PosStopList& stop,
    const std::function<void(const std::string&)>& fn) {
  for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
    if (i == instance.target_index) continue;
    const auto& t = instance.tokens[i];
    if (!stopped(t, stop)) fn(t.lemma);
  }
}

void for_each_window_position(const Instance& instance, std::size_t window,
                              const PosStopList& stop,
                              const std::function<void(std::size_t)>& fn) {
  const std::size_t target = instance.target_index;
  const std::size_t lo = target >= window ? target - window : 0;
  const std::size_t hi = std::min(instance.tokens.size() - 1, target + window);
  for (std::size_t i = lo; i <= hi; ++i) {
    if (i == target || stopped(instance.tokens[i], stop)) continue;
    fn(i);
  }
}

Vector<double> sentence_vector(const Instance& instance,
                               const Vocabulary& vocab_A,
                               const PosStopList& stop) {
  Vector<double> v = Vector<double>::Zero(vocab_A.size());
  for_each_sentence_feature(instance, stop, [&](const std::string& lemma) {
    if (auto j = vocab_A.find(lemma)) v(*j) += 1;
  });
  return v;
}

Vector<double> window_vector(const Instance& instance, const Vocabulary& vocab_B,
                             std::size_t window, const PosStopList& stop) {
  Vector<double> v = Vector<double>::Zero(vocab_B.size());
  for_each_window_position(instance, window, stop, [&](std::size_t i) {
    if (auto j = vocab_B.find(instance.tokens[i].lemma)) v(*j) += 1;
  });
  return v;
}

// ---- builders ---------------------------------------------------------------

Vocabulary build_vocab(std::span<const Instance> instances, VocabRole role,
                       std::size_t min_count, std::size_t window,
                       const PosStopList& stop) {
  // First-occurrence order, then filter by frequency.
  Vocabulary seen;
  std::vector<std::size_t> counts;
  auto bump = [&](const std::string& lemma) {
    const auto id = static_cast<std::size_t>(seen.add(lemma));
    if (id == counts.size()) counts.push_back(0);
    ++counts[id];
  };
  for (const auto& inst : instances) {
    if (role == VocabRole::AColumns) {
      for_each_sentence_feature(inst, stop, bump);
    } else {
      for_each_window_position(inst, window, stop, [&](std::size_t i) {
        bump(inst.tokens[i].lemma);
      });
    }
  }
  Vocabulary vocab;
  for (Index i = 0; i < seen.size(); ++i)
    if (counts[static_cast<std::size_t>(i)] >= min_count) vocab.add(seen.lemma(i));
  vocab.freeze();
  return vocab;
}

SparseMatrix<double> build_matrix_A(std::span<const Instance> instances,
                                    const Vocabulary& vocab_A,
                                    const PosStopList& stop) {
  std::vector<Triplet<double>> t;
  for (std::size_t r = 0; r < instances.size(); ++r)
    for_each_sentence_feature(instances[r], stop, [&](const std::string& lemma) {
      if (auto j = vocab_A.find(lemma))
        t.emplace_back(static_cast<Index>(r), *j, 1.0);
    });
  return from_triplets(static_cast<Index>(instances.size()), vocab_A.size(), t);
}

SparseMatrix<double> build_matrix_B(std::span<const Instance> instances,
                                    const Vocabulary& vocab_B,
                                    std::size_t window,
                                    const PosStopList& stop) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<Triplet<double>> t;
  for (std::size_t r = 0; r < instances.size(); ++r) {
    const auto& inst = instances[r];
    for_each_window_position(inst, window, stop, [&](std::size_t i) {
      if (auto j = vocab_B.find(inst.tokens[i].lemma))
        t.emplace_back(static_cast<Index>(r), *j, 1.0);
    });
  }
  return from_triplets(static_cast<Index>(instances.size()), vocab_B.size(), t);
}

SparseMatrix<double> build_matrix_C_local(std::span<const Instance> instances,
                                          const Vocabulary& vocab_B,
                                          const Vocabulary& vocab_A,
                                          std::size_t window,
                                          const PosStopList& stop) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<Triplet<double>> t;
  for (const auto& inst : instances) {
    for_each_window_position(inst, window, stop, [&](std::size_t ci) {
      const auto row = vocab_B.find(inst.tokens[ci].lemma);
      if (!row) return;
      for (std::size_t wi = 0; wi < inst.tokens.size(); ++wi) {
        if (wi == ci || stopped(inst.tokens[wi], stop)) continue;
        if (auto col = vocab_A.find(inst.tokens[wi].lemma))
          t.emplace_back(*row, *col, 1.0);
      }
    });
  }
  return from_triplets(vocab_B.size(), vocab_A.size(), t);
}

DependencyArcCounter::DependencyArcCounter(const Vocabulary& vocab_B,
                                           const Vocabulary& vocab_A,
                                           PosStopList stop)
    : vocab_B_(&vocab_B), vocab_A_(&vocab_A), stop_(std::move(stop)) {}

void DependencyArcCounter::add(const Sentence& sentence) {
  for (std::size_t d = 0; d < sentence.size(); ++d) {
    const auto& dep = sentence[d];
    if (!dep.head || *dep.head >= sentence.size() || *dep.head == d) continue;
    const auto& head = sentence[*dep.head];
    if (stopped(dep, stop_) || stopped(head, stop_)) continue;
    if (auto r = vocab_B_->find(head.lemma))
      if (auto c = vocab_A_->find(dep.lemma)) counts_[{*r, *c}] += 1;
    if (auto r = vocab_B_->find(dep.lemma))
      if (auto c = vocab_A_->find(head.lemma)) counts_[{*r, *c}] += 1;
  }
}

SparseMatrix<double> DependencyArcCounter::matrix() const {
  std::vector<Triplet<double>> t;
  t.reserve(counts_.size());
  for (const auto& [rc, v] : counts_) t.emplace_back(rc.first, rc.second, v);
  return from_triplets(vocab_B_->size(), vocab_A_->size(), t);
}

SparseMatrix<double> build_matrix_D_global(std::istream& global_corpus,
                                           const Vocabulary& vocab_B,
                                           const Vocabulary& vocab_A,
                                           const PosStopList& stop) {
  DependencyArcCounter counter(vocab_B, vocab_A, stop);
  for_each_sentence(global_corpus,
                    [&](const Sentence& s) { counter.add(s); });
  return counter.matrix();
}

SparseMatrix<double> build_matrix_D_global(
    const std::filesystem::path& global_corpus, const Vocabulary& vocab_B,
    const Vocabulary& vocab_A, const PosStopList& stop) {
  DependencyArcCounter counter(vocab_B, vocab_A, stop);
  for_each_sentence(global_corpus,
                    [&](const Sentence& s) { counter.add(s); });
  return counter.matrix();
}

CorpusMatrices build_corpus_matrices(std::span<const Instance> instances,
                                     const CountingOptions& options) {
  if (instances.empty()) throw ConfigError("no instances to build matrices from");
  if (options.window < 1) throw ConfigError("window must be >= 1");
  CorpusMatrices cm;
  cm.target_lemma = instances.front().target_lemma;
  cm.options = options;
  cm.vocab_A = build_vocab(instances, VocabRole::AColumns, options.min_count,
                           options.window, options.stop_pos);
  cm.vocab_B = build_vocab(instances, VocabRole::BColumns, options.min_count,
                           options.window, options.stop_pos);
  cm.A = build_matrix_A(instances, cm.vocab_A, options.stop_pos);
  cm.B = build_matrix_B(instances, cm.vocab_B, options.window, options.stop_pos);
  cm.C = build_matrix_C_local(instances, cm.vocab_B, cm.vocab_A, options.window,
                              options.stop_pos);
  for (const auto& inst : instances) {
    cm.labels.push_back(inst.sense_id.value_or(""));
    cm.instance_ids.push_back(inst.id);
  }
  return cm;
}

}  // namespace nmfwsd
