#include "nmfwsd/persist.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "nmfwsd/matrix_io.hpp"

namespace nmfwsd {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

template <typename T>
T get_field(const json& j, const char* name, const fs::path& path) {
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError(0, path.string() + ": missing field '" + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(0, path.string() + ": field '" + name + "' has wrong type");
  }
}

void save_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) {
    if (l.find('\n') != std::string::npos)
      throw IoError("cannot store '" + l + "' one per line in " + path.string());
    text += l;
    text += '\n';
  }
  write_text(path, text);
}

std::vector<std::string> load_lines(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> stop_list_vector(const PosStopList& stop) {
  return {stop.begin(), stop.end()};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void save_vocabulary(const fs::path& path, const Vocabulary& vocab) {
  save_lines(path, vocab.lemmas());
}

Vocabulary load_vocabulary(const fs::path& path) {
  auto lines = load_lines(path);
  const auto n = lines.size();
  Vocabulary v(std::move(lines));
  if (static_cast<std::size_t>(v.size()) != n)
    throw ParseError(0, path.string() + ": duplicate lemma");
  return v;
}

void save_corpus_matrices(const fs::path& dir, const CorpusMatrices& m) {
  ensure_dir(dir);
  save_matrix(dir / "A.txt", m.A);
  save_matrix(dir / "B.txt", m.B);
  if (m.C) save_matrix(dir / "C.txt", *m.C);
  if (m.D) save_matrix(dir / "D.txt", *m.D);
  save_vocabulary(dir / "vocab_A.txt", m.vocab_A);
  save_vocabulary(dir / "vocab_B.txt", m.vocab_B);
  save_lines(dir / "labels.txt", m.labels);
  ordered_json meta;
  meta["target_lemma"] = m.target_lemma;
  meta["window"] = m.options.window;
  meta["min_count"] = m.options.min_count;
  meta["stop_pos"] = stop_list_vector(m.options.stop_pos);
  meta["instance_ids"] = m.instance_ids;
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

CorpusMatrices load_corpus_matrices(const fs::path& dir) {
  CorpusMatrices m;
  const auto meta_path = dir / "meta.json";
  const json meta = read_json(meta_path);
  m.target_lemma = get_field<std::string>(meta, "target_lemma", meta_path);
  m.options.window = get_field<std::size_t>(meta, "window", meta_path);
  m.options.min_count = get_field<std::size_t>(meta, "min_count", meta_path);
  const auto stop = get_field<std::vector<std::string>>(meta, "stop_pos", meta_path);
  m.options.stop_pos = PosStopList(stop.begin(), stop.end());
  m.instance_ids =
      get_field<std::vector<std::string>>(meta, "instance_ids", meta_path);
  m.A = load_sparse(dir / "A.txt");
  m.B = load_sparse(dir / "B.txt");
  if (fs::exists(dir / "C.txt")) m.C = load_sparse(dir / "C.txt");
  if (fs::exists(dir / "D.txt")) m.D = load_sparse(dir / "D.txt");
  m.vocab_A = load_vocabulary(dir / "vocab_A.txt");
  m.vocab_B = load_vocabulary(dir / "vocab_B.txt");
  m.labels = load_lines(dir / "labels.txt");
  if (static_cast<Index>(m.labels.size()) != m.A.rows() ||
      m.B.rows() != m.A.rows() || m.A.cols() != m.vocab_A.size() ||
      m.B.cols() != m.vocab_B.size())
    throw ParseError(0, dir.string() + ": matrices, labels and vocabularies disagree");
  return m;
}

void save_model(const fs::path& dir, const SenseModel& model) {
  ensure_dir(dir);
  save_matrix(dir / "H.txt", model.fold_matrix_train);
  if (model.variant != Variant::Baseline1)
    save_matrix(dir / "G.txt", model.fold_matrix_test);
  DenseMatrix<double> sv(static_cast<Index>(model.sense_vectors.size()), model.k);
  for (std::size_t s = 0; s < model.sense_vectors.size(); ++s)
    sv.row(static_cast<Index>(s)) = model.sense_vectors[s].transpose();
  save_matrix(dir / "sense_vectors.txt", sv);
  save_vocabulary(dir / "vocab_A.txt", model.vocab_A);
  save_vocabulary(dir / "vocab_B.txt", model.vocab_B);
  ordered_json manifest;
  manifest["variant"] = to_string(model.variant);
  manifest["k"] = model.k;
  manifest["window"] = model.window;
  manifest["sense_ids"] = model.sense_ids;
  manifest["most_frequent_sense"] = model.most_frequent_sense;
  manifest["target_lemma"] = model.target_lemma;
  manifest["stop_pos"] = stop_list_vector(model.stop_pos);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

SenseModel load_model(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  const json manifest = read_json(path);
  SenseModel model;
  model.variant = parse_variant(get_field<std::string>(manifest, "variant", path));
  model.k = get_field<Index>(manifest, "k", path);
  model.window = get_field<std::size_t>(manifest, "window", path);
  model.sense_ids = get_field<std::vector<std::string>>(manifest, "sense_ids", path);
  model.most_frequent_sense =
      get_field<std::string>(manifest, "most_frequent_sense", path);
  model.target_lemma = get_field<std::string>(manifest, "target_lemma", path);
  const auto stop = get_field<std::vector<std::string>>(manifest, "stop_pos", path);
  model.stop_pos = PosStopList(stop.begin(), stop.end());

  model.fold_matrix_train = load_dense(dir / "H.txt");
  model.fold_matrix_test = model.variant == Variant::Baseline1
                               ? model.fold_matrix_train
                               : load_dense(dir / "G.txt");
  const DenseMatrix<double> sv = load_dense(dir / "sense_vectors.txt");
  model.vocab_A = load_vocabulary(dir / "vocab_A.txt");
  model.vocab_B = load_vocabulary(dir / "vocab_B.txt");

  if (sv.rows() != static_cast<Index>(model.sense_ids.size()) ||
      sv.cols() != model.k || model.fold_matrix_train.rows() != model.k ||
      model.fold_matrix_test.rows() != model.k ||
      model.fold_matrix_train.cols() != model.vocab_A.size() ||
      (model.variant != Variant::Baseline1 &&
       model.fold_matrix_test.cols() != model.vocab_B.size()))
    throw ParseError(0, dir.string() + ": model files disagree on dimensions");
  for (Index s = 0; s < sv.rows(); ++s)
    model.sense_vectors.push_back(sv.row(s).transpose());
  return model;
}

std::string target_subdir(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w%03zu", i);
  return buf;
}

void write_target_index(const fs::path& dir,
                        const std::vector<TargetEntry>& entries) {
  ensure_dir(dir);
  ordered_json index;
  index["targets"] = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json o;
    o["target_lemma"] = e.target_lemma;
    o["dir"] = e.subdir;
    index["targets"].push_back(std::move(o));
  }
  write_text(dir / "index.json", index.dump(2) + "\n");
}

std::vector<TargetEntry> read_target_index(const fs::path& dir) {
  const auto path = dir / "index.json";
  const json index = read_json(path);
  auto it = index.find("targets");
  if (it == index.end() || !it->is_array())
    throw ParseError(0, path.string() + ": missing 'targets' array");
  std::vector<TargetEntry> out;
  for (const auto& t : *it)
    out.push_back({get_field<std::string>(t, "target_lemma", path),
                   get_field<std::string>(t, "dir", path)});
  return out;
}

}  // namespace nmfwsd
