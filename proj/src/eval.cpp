#include "nmfwsd/eval.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nmfwsd/matrix_io.hpp"

namespace nmfwsd {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void RunSpec::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (counting.window < 1) throw ConfigError("window must be >= 1");
  if (max_iters < 1 || outer_iters < 1 || inner_iters < 1)
    throw ConfigError("iteration counts must be >= 1");
  if (!(tol >= 0)) throw ConfigError("tol must be >= 0");
}

TrainConfig RunSpec::train_config(std::uint64_t word_seed) const {
  TrainConfig c;
  c.variant = variant;
  c.nmf.k = k;
  c.nmf.max_iters = max_iters;
  c.nmf.tol = tol;
  c.nmf.seed = word_seed;
  c.nmf.objective = objective;
  c.interleaved.k = k;
  c.interleaved.outer_iters = outer_iters;
  c.interleaved.inner = c.nmf;
  c.interleaved.inner.max_iters = inner_iters;
  return c;
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view target) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : target) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = run_seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "tsv" || name == "TSV") return ReportFormat::TSV;
  if (name == "json" || name == "JSON") return ReportFormat::JSON;
  throw ConfigError("unknown report format '" + name + "' (expected tsv|json)");
}

double precision(std::span<const std::string> predicted,
                 std::span<const std::string> gold) {
  if (predicted.size() != gold.size())
    throw ConfigError("precision: " + std::to_string(predicted.size()) +
                      " predictions for " + std::to_string(gold.size()) +
                      " gold labels");
  if (gold.empty()) throw ConfigError("precision: no instances");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double average_precision(std::span<const RunResult> runs) {
  if (runs.empty()) return 0;
  double sum = 0;
  for (const auto& r : runs) sum += r.micro_precision;
  return sum / static_cast<double>(runs.size());
}

std::size_t best_index(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

void finalize_report(EvalReport& report) {
  report.average_precision = average_precision(report.runs);
}

SentenceSource sentences_from_file(std::filesystem::path path) {
  return [path = std::move(path)](const std::function<void(const Sentence&)>& fn) {
    for_each_sentence(path, fn);
  };
}

SentenceSource sentences_from(std::span<const Sentence> sentences) {
  return [sentences](const std::function<void(const Sentence&)>& fn) {
    for (const auto& s : sentences) fn(s);
  };
}

namespace {

/// Rethrows e with the target word prepended, keeping its type.
[[noreturn]] void rethrow_for_target(const std::string& target) {
  const std::string prefix = "target '" + target + "': ";
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(e.line(), prefix + e.message());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(prefix + e.what());
  }
}

std::string format_seeds(std::span<const std::uint64_t> seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(seeds[i]);
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunSpec& spec) {
  return {
      {"variant", to_string(spec.variant)},
      {"k", std::to_string(spec.k)},
      {"window", std::to_string(spec.counting.window)},
      {"min_count", std::to_string(spec.counting.min_count)},
      {"objective", to_string(spec.objective)},
      {"max_iters", std::to_string(spec.max_iters)},
      {"tol", detail::format_real(spec.tol)},
      {"outer_iters", std::to_string(spec.outer_iters)},
      {"inner_iters", std::to_string(spec.inner_iters)},
      {"seeds", format_seeds(spec.seeds)},
      {"train", spec.train_path.string()},
      {"test", spec.test_path.string()},
      {"global", spec.global_path.string()},
  };
}

}  // namespace

EvalReport run_experiment(const RunSpec& spec) {
  spec.validate();
  const auto train = load_instances(spec.train_path);
  const auto test = load_instances(spec.test_path);
  SentenceSource global;
  if (!spec.global_path.empty()) global = sentences_from_file(spec.global_path);
  return run_experiment(spec, train, test, global);
}

EvalReport run_experiment(const RunSpec& spec, std::span<const Instance> train,
                          std::span<const Instance> test,
                          const SentenceSource& global) {
  spec.validate();
  const auto groups = group_by_target(train);

  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t w = 0; w < groups.size(); ++w) slot.emplace(groups[w].first, w);
  std::vector<std::vector<const Instance*>> test_of(groups.size());
  for (const auto& inst : test) {
    auto it = slot.find(inst.target_lemma);
    if (it == slot.end())
      throw ConfigError("test instance '" + inst.id + "': target '" +
                        inst.target_lemma + "' has no training instances");
    if (!inst.sense_id)
      throw ConfigError("test instance '" + inst.id + "' has no gold sense_id");
    test_of[it->second].push_back(&inst);
  }

  std::vector<CorpusMatrices> matrices;
  matrices.reserve(groups.size());
  for (const auto& [target, instances] : groups) {
    try {
      matrices.push_back(build_corpus_matrices(instances, spec.counting));
    } catch (const Error&) {
      rethrow_for_target(target);
    }
  }

  if (spec.variant == Variant::LatentGlobal) {
    if (!global) throw ConfigError("variant global needs a global corpus");
    std::vector<DependencyArcCounter> counters;
    counters.reserve(matrices.size());
    for (const auto& m : matrices)
      counters.emplace_back(m.vocab_B, m.vocab_A, spec.counting.stop_pos);
    global([&](const Sentence& s) {
      for (auto& c : counters) c.add(s);
    });
    for (std::size_t w = 0; w < matrices.size(); ++w)
      matrices[w].D = counters[w].matrix();
  }

  EvalReport report;
  report.system = to_string(spec.variant);
  report.config = config_echo(spec);
  for (std::size_t w = 0; w < groups.size(); ++w) {
    if (test_of[w].empty()) continue;
    WordResult wr;
    wr.target = groups[w].first;
    wr.test_count = test_of[w].size();
    report.words.push_back(std::move(wr));
  }

  for (const auto seed : spec.seeds) {
    RunResult run;
    run.seed = seed;
    std::size_t word_slot = 0;
    for (std::size_t w = 0; w < groups.size(); ++w) {
      if (test_of[w].empty()) continue;
      const auto& target = groups[w].first;
      auto& wr = report.words[word_slot++];
      std::size_t correct = 0;
      std::size_t fallbacks = 0;
      try {
        const auto model = nmfwsd::train(groups[w].second, matrices[w],
                                 spec.train_config(derive_seed(seed, target)));
        for (const Instance* inst : test_of[w]) {
          const auto result = classify(model, *inst);
          correct += result.sense == *inst->sense_id;
          fallbacks += result.fallback;
        }
      } catch (const Error&) {
        rethrow_for_target(target);
      }
      wr.correct.push_back(correct);
      wr.fallbacks.push_back(fallbacks);
      wr.precision.push_back(static_cast<double>(correct) /
                             static_cast<double>(wr.test_count));
      run.correct += correct;
      run.fallbacks += fallbacks;
      run.total += wr.test_count;
    }
    run.micro_precision = run.total == 0 ? 0.0
                                         : static_cast<double>(run.correct) /
                                               static_cast<double>(run.total);
    report.runs.push_back(run);
  }
  finalize_report(report);
  return report;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void render_row(std::ostringstream& os, const std::string& label,
                const std::vector<double>& values) {
  os << label;
  const auto best = best_index(values);
  double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << '\t' << fixed6(values[i]);
    if (i == best) os << '*';
    sum += values[i];
  }
  os << '\t' << fixed6(values.empty() ? 0.0 : sum / static_cast<double>(values.size()))
     << '\n';
}

std::string render_tsv(const EvalReport& report) {
  std::ostringstream os;
  os << "system";
  for (std::size_t r = 0; r < report.runs.size(); ++r) os << "\trun_" << r + 1;
  os << "\taverage\n";
  if (report.words.empty()) return os.str();

  std::vector<double> micro;
  for (const auto& r : report.runs) micro.push_back(r.micro_precision);
  os << report.system;
  const auto best = best_index(micro);
  for (std::size_t i = 0; i < micro.size(); ++i) {
    os << '\t' << fixed6(micro[i]);
    if (i == best) os << '*';
  }
  os << '\t' << fixed6(report.average_precision) << '\n';

  for (const auto& w : report.words)
    render_row(os, report.system + "/" + w.target, w.precision);
  return os.str();
}

std::string render_json(const EvalReport& report) {
  ordered_json j;
  j["system"] = report.system;
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  j["config"] = config;
  j["runs"] = ordered_json::array();
  for (const auto& r : report.runs) {
    ordered_json o;
    o["seed"] = r.seed;
    o["correct"] = r.correct;
    o["total"] = r.total;
    o["fallbacks"] = r.fallbacks;
    o["micro_precision"] = r.micro_precision;
    j["runs"].push_back(std::move(o));
  }
  j["average_precision"] = report.average_precision;
  std::vector<double> micro;
  for (const auto& r : report.runs) micro.push_back(r.micro_precision);
  j["best_run"] = micro.empty() ? ordered_json(nullptr)
                                : ordered_json(best_index(micro));
  j["words"] = ordered_json::array();
  for (const auto& w : report.words) {
    ordered_json o;
    o["target"] = w.target;
    o["test_count"] = w.test_count;
    o["correct"] = w.correct;
    o["fallbacks"] = w.fallbacks;
    o["precision"] = w.precision;
    j["words"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string report_render(const EvalReport& report, ReportFormat format) {
  return format == ReportFormat::TSV ? render_tsv(report) : render_json(report);
}

EvalReport parse_report_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    EvalReport r;
    r.system = j.at("system").get<std::string>();
    for (const auto& [k, v] : j.at("config").items())
      r.config.emplace_back(k, v.get<std::string>());
    for (const auto& o : j.at("runs")) {
      RunResult run;
      run.seed = o.at("seed").get<std::uint64_t>();
      run.correct = o.at("correct").get<std::size_t>();
      run.total = o.at("total").get<std::size_t>();
      run.fallbacks = o.at("fallbacks").get<std::size_t>();
      run.micro_precision = o.at("micro_precision").get<double>();
      r.runs.push_back(run);
    }
    r.average_precision = j.at("average_precision").get<double>();
    for (const auto& o : j.at("words")) {
      WordResult w;
      w.target = o.at("target").get<std::string>();
      w.test_count = o.at("test_count").get<std::size_t>();
      w.correct = o.at("correct").get<std::vector<std::size_t>>();
      w.fallbacks = o.at("fallbacks").get<std::vector<std::size_t>>();
      w.precision = o.at("precision").get<std::vector<double>>();
      r.words.push_back(std::move(w));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("report JSON: ") + e.what());
  }
}

}  // namespace nmfwsd
