// Command-line front end: build-matrices, train, classify, evaluate.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nmfwsd/corpus.hpp"
#include "nmfwsd/eval.hpp"
#include "nmfwsd/persist.hpp"
#include "nmfwsd/wsd.hpp"

namespace fs = std::filesystem;
using namespace nmfwsd;

namespace {

struct CountingArgs {
  std::size_t window = 5;
  std::size_t min_count = 1;
  std::vector<std::string> stop_pos;
  bool stop_pos_given = false;

  CountingOptions options() const {
    CountingOptions o;
    o.window = window;
    o.min_count = min_count;
    if (stop_pos_given) o.stop_pos = PosStopList(stop_pos.begin(), stop_pos.end());
    return o;
  }
};

struct SolverArgs {
  std::string objective = "kl";
  int max_iters = 200;
  double tol = 1e-6;
  int outer_iters = 50;
  int inner_iters = 10;
};

void add_counting_options(CLI::App* cmd, CountingArgs& args) {
  cmd->add_option("--window", args.window, "Context window, tokens each side")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", args.min_count, "Minimum lemma frequency");
  cmd->add_option("--stop-pos", args.stop_pos,
                  "POS tags ignored by all counts (comma separated)")
      ->delimiter(',')
      ->each([&args](const std::string&) { args.stop_pos_given = true; });
}

void add_solver_options(CLI::App* cmd, SolverArgs& args) {
  cmd->add_option("--objective", args.objective, "kl or frobenius");
  cmd->add_option("--max-iters", args.max_iters, "NMF iterations (baseline1)");
  cmd->add_option("--tol", args.tol, "Relative improvement threshold");
  cmd->add_option("--outer-iters", args.outer_iters, "Interleaved cycles");
  cmd->add_option("--inner-iters", args.inner_iters,
                  "NMF iterations per block and cycle");
}

RunSpec make_spec(const std::string& variant, Index k, const SolverArgs& solver,
                  const CountingOptions& counting) {
  RunSpec spec;
  spec.variant = parse_variant(variant);
  spec.k = k;
  spec.counting = counting;
  spec.objective = parse_objective(solver.objective);
  spec.max_iters = solver.max_iters;
  spec.tol = solver.tol;
  spec.outer_iters = solver.outer_iters;
  spec.inner_iters = solver.inner_iters;
  return spec;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

void build_matrices(const fs::path& train_path, const fs::path& global_path,
                    const fs::path& out, const CountingOptions& counting) {
  const auto instances = load_instances(train_path);
  const auto groups = group_by_target(instances);
  std::vector<CorpusMatrices> matrices;
  matrices.reserve(groups.size());
  for (const auto& [target, group] : groups)
    matrices.push_back(build_corpus_matrices(group, counting));

  if (!global_path.empty()) {
    std::vector<DependencyArcCounter> counters;
    counters.reserve(matrices.size());
    for (const auto& m : matrices)
      counters.emplace_back(m.vocab_B, m.vocab_A, counting.stop_pos);
    for_each_sentence(global_path, [&](const Sentence& s) {
      for (auto& c : counters) c.add(s);
    });
    for (std::size_t i = 0; i < matrices.size(); ++i)
      matrices[i].D = counters[i].matrix();
  }

  std::vector<TargetEntry> index;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    index.push_back({matrices[i].target_lemma, target_subdir(i)});
    save_corpus_matrices(out / index.back().subdir, matrices[i]);
  }
  write_target_index(out, index);
  std::cerr << "wrote matrices for " << index.size() << " target(s) to "
            << out.string() << "\n";
}

void train_models(const fs::path& matrices_dir, const RunSpec& spec,
                  std::uint64_t seed, const fs::path& out) {
  std::vector<TargetEntry> index;
  for (const auto& entry : read_target_index(matrices_dir)) {
    const auto matrices = load_corpus_matrices(matrices_dir / entry.subdir);
    SenseModel model;
    try {
      model = train(matrices.labels, matrices,
                    spec.train_config(derive_seed(seed, entry.target_lemma)));
    } catch (const Error& e) {
      throw ConfigError("target '" + entry.target_lemma + "': " + e.what());
    }
    index.push_back({entry.target_lemma, target_subdir(index.size())});
    save_model(out / index.back().subdir, model);
  }
  write_target_index(out, index);
  std::cerr << "trained " << index.size() << " model(s) into " << out.string()
            << "\n";
}

void classify_file(const fs::path& model_dir, const fs::path& input,
                   const fs::path& out) {
  std::map<std::string, SenseModel, std::less<>> models;
  for (const auto& entry : read_target_index(model_dir))
    models.emplace(entry.target_lemma, load_model(model_dir / entry.subdir));

  std::ostringstream os;
  os << "id\ttarget\tpredicted\tfallback\tscores\n";
  for (const auto& inst : load_instances(input)) {
    auto it = models.find(inst.target_lemma);
    if (it == models.end())
      throw ConfigError("instance '" + inst.id + "': no model for target '" +
                        inst.target_lemma + "'");
    const auto& model = it->second;
    const auto result = classify(model, inst);
    os << inst.id << '\t' << inst.target_lemma << '\t' << result.sense << '\t'
       << (result.fallback ? 1 : 0) << '\t';
    for (std::size_t s = 0; s < result.scores.size(); ++s) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", result.scores[s]);
      os << (s ? "," : "") << model.sense_ids[s] << ':' << buf;
    }
    os << '\n';
  }
  write_file(out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word sense disambiguation with interleaved NMF"};
  app.require_subcommand(1);

  // build-matrices
  auto* build = app.add_subcommand("build-matrices",
                                   "Count A, B, C (and D) per target word");
  fs::path build_train, build_global, build_out;
  CountingArgs build_counting;
  build->add_option("--train", build_train, "Training instances (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--global", build_global,
                    "Dependency-parsed global corpus (JSONL)")
      ->check(CLI::ExistingFile);
  build->add_option("--out", build_out, "Output directory")->required();
  add_counting_options(build, build_counting);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train sense models");
  fs::path train_matrices, train_out;
  std::string train_variant;
  Index train_k = 0;
  std::uint64_t train_seed = 0;
  SolverArgs train_solver;
  train_cmd->add_option("--matrices", train_matrices, "build-matrices output")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--variant", train_variant, "baseline1|local|global")
      ->required();
  train_cmd->add_option("--k", train_k, "Latent dimensions")
      ->required()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train_seed, "Random seed")->required();
  train_cmd->add_option("--out", train_out, "Model directory")->required();
  add_solver_options(train_cmd, train_solver);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Label instances");
  fs::path classify_model, classify_input, classify_out;
  classify_cmd->add_option("--model", classify_model, "Model directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  classify_cmd->add_option("--input", classify_input, "Instances (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--out", classify_out, "Predictions (TSV)")
      ->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Multi-seed precision report");
  fs::path eval_train, eval_test, eval_global, eval_out;
  std::string eval_variant, eval_format = "tsv";
  Index eval_k = 0;
  std::vector<std::uint64_t> eval_seeds{1, 2, 3};
  SolverArgs eval_solver;
  CountingArgs eval_counting;
  eval_cmd->add_option("--train", eval_train, "Training instances (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", eval_test, "Test instances (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--global", eval_global, "Global corpus (JSONL)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--variant", eval_variant, "baseline1|local|global")
      ->required();
  eval_cmd->add_option("--k", eval_k, "Latent dimensions")
      ->required()
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seeds", eval_seeds, "Comma separated run seeds")
      ->delimiter(',');
  eval_cmd->add_option("--format", eval_format, "tsv|json");
  eval_cmd->add_option("--out", eval_out, "Report path")->required();
  add_solver_options(eval_cmd, eval_solver);
  add_counting_options(eval_cmd, eval_counting);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      build_matrices(build_train, build_global, build_out,
                     build_counting.options());
    } else if (*train_cmd) {
      const auto spec =
          make_spec(train_variant, train_k, train_solver, CountingOptions{});
      spec.validate();
      train_models(train_matrices, spec, train_seed, train_out);
    } else if (*classify_cmd) {
      classify_file(classify_model, classify_input, classify_out);
    } else if (*eval_cmd) {
      auto spec = make_spec(eval_variant, eval_k, eval_solver,
                            eval_counting.options());
      spec.seeds = eval_seeds;
      spec.train_path = eval_train;
      spec.test_path = eval_test;
      spec.global_path = eval_global;
      const auto format = parse_report_format(eval_format);
      const auto report = run_experiment(spec);
      write_file(eval_out, report_render(report, format));
      std::cerr << report.system << ": average precision "
                << report.average_precision << " over " << report.runs.size()
                << " run(s)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "nmfwsd: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
