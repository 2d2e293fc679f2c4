#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nmfwsd/eval.hpp"
#include "synthetic.hpp"

using namespace nmfwsd;

namespace {

EvalReport report_with(std::vector<double> runs, std::string system = "proposed") {
  EvalReport r;
  r.system = system;
  WordResult w;
  w.target = "bank";
  w.test_count = 10000;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    RunResult run;
    run.seed = i + 1;
    run.total = 10000;
    run.correct = static_cast<std::size_t>(std::lround(runs[i] * 10000));
    run.micro_precision = runs[i];
    r.runs.push_back(run);
    w.correct.push_back(run.correct);
    w.fallbacks.push_back(0);
    w.precision.push_back(runs[i]);
  }
  r.words.push_back(w);
  finalize_report(r);
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string c; std::getline(is, c, '\t');) out.push_back(c);
  return out;
}

synthetic::Dataset two_words() {
  synthetic::Options o;
  o.targets = {"bank", "plant", "bass"};
  o.train_per_sense = 8;
  o.test_per_sense = 6;
  o.global_sentences = 120;
  return synthetic::generate(o);
}

}  // namespace

TEST_CASE("precision") {
  const std::vector<std::string> gold{"a", "b", "a", "b"};
  CHECK(precision(gold, gold) == 1.0);
  const std::vector<std::string> half{"a", "a", "a", "a"};
  CHECK(precision(half, gold) == 0.5);
  const std::vector<std::string> none{"c", "c", "c", "c"};
  CHECK(precision(none, gold) == 0.0);
  const std::vector<std::string> short_list{"a"};
  CHECK_THROWS_AS(precision(short_list, gold), ConfigError);
  const std::vector<std::string> empty;
  CHECK_THROWS_AS(precision(empty, empty), ConfigError);
}

TEST_CASE("average of the table row") {
  const auto r = report_with({0.6044, 0.6148, 0.6104});
  CHECK(std::abs(r.average_precision - 0.609867) < 1e-6);
  const std::vector<double> values{0.6044, 0.6148, 0.6104};
  CHECK(best_index(values) == 1);
  const double mean = (0.6044 + 0.6148 + 0.6104) / 3;
  CHECK(std::abs(r.average_precision - mean) < 1e-12);
}

TEST_CASE("best_index takes the first maximum") {
  const std::vector<double> tie{0.2, 0.7, 0.7};
  CHECK(best_index(tie) == 1);
  const std::vector<double> one{0.3};
  CHECK(best_index(one) == 0);
}

TEST_CASE("TSV flags the best run") {
  const auto text = report_render(report_with({0.5328, 0.5388, 0.5180}, "baseline1"),
                                  ReportFormat::TSV);
  const auto ls = lines(text);
  REQUIRE(ls.size() == 3);
  CHECK(cells(ls[0]) == std::vector<std::string>{"system", "run_1", "run_2",
                                                 "run_3", "average"});
  CHECK(cells(ls[1]) == std::vector<std::string>{"baseline1", "0.532800",
                                                 "0.538800*", "0.518000",
                                                 "0.529867"});
  CHECK(cells(ls[2])[0] == "baseline1/bank");
  CHECK(cells(ls[2])[2] == "0.538800*");
  CHECK(std::count(text.begin(), text.end(), '*') == 2);
}

TEST_CASE("report without words renders the header only") {
  EvalReport r;
  r.system = "global";
  RunResult run;
  run.seed = 1;
  r.runs.push_back(run);
  CHECK(report_render(r, ReportFormat::TSV) == "system\trun_1\taverage\n");
}

TEST_CASE("JSON round trip") {
  auto r = report_with({0.25, 1.0 / 3.0, 0.1});
  r.config = {{"variant", "global"}, {"k", "10"}, {"seeds", "1,2,3"}};
  r.runs[1].fallbacks = 4;
  r.words[0].fallbacks[1] = 4;
  const auto text = report_render(r, ReportFormat::JSON);
  CHECK(parse_report_json(text) == r);
  CHECK(report_render(parse_report_json(text), ReportFormat::JSON) == text);
  CHECK_THROWS_AS(parse_report_json("{}"), ParseError);
}

TEST_CASE("report formats") {
  CHECK(parse_report_format("tsv") == ReportFormat::TSV);
  CHECK(parse_report_format("json") == ReportFormat::JSON);
  CHECK_THROWS_AS(parse_report_format("csv"), ConfigError);
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed(1, "bank") == derive_seed(1, "bank"));
  CHECK(derive_seed(1, "bank") != derive_seed(2, "bank"));
  CHECK(derive_seed(1, "bank") != derive_seed(1, "plant"));
}

TEST_CASE("run spec validation") {
  RunSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.seeds.clear();
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.k = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.counting.window = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("separable data is classified perfectly by every variant") {
  const auto data = two_words();
  for (auto v : {Variant::Baseline1, Variant::LatentLocal, Variant::LatentGlobal}) {
    RunSpec spec;
    spec.variant = v;
    spec.k = 2;
    const auto r = run_experiment(spec, data.train, data.test,
                                  sentences_from(data.global));
    REQUIRE(r.runs.size() == 3);
    CHECK(r.words.size() == 3);
    for (const auto& run : r.runs) {
      CHECK(run.total == data.test.size());
      CHECK(run.micro_precision == 1.0);
    }
    CHECK(r.average_precision == 1.0);
  }
}

TEST_CASE("single test instance gives one precision cell") {
  const auto data = synthetic::generate({});
  RunSpec spec;
  spec.variant = Variant::Baseline1;
  spec.k = 2;
  spec.seeds = {5};
  const std::vector<Instance> one{data.test.front()};
  const auto r = run_experiment(spec, data.train, one, {});
  REQUIRE(r.words.size() == 1);
  REQUIRE(r.words[0].precision.size() == 1);
  const double p = r.words[0].precision[0];
  CHECK((p == 0.0 || p == 1.0));
}

TEST_CASE("reports are reproducible") {
  const auto data = two_words();
  RunSpec spec;
  spec.k = 3;
  const auto a = run_experiment(spec, data.train, data.test,
                                sentences_from(data.global));
  const auto b = run_experiment(spec, data.train, data.test,
                                sentences_from(data.global));
  CHECK(report_render(a, ReportFormat::TSV) == report_render(b, ReportFormat::TSV));
  CHECK(report_render(a, ReportFormat::JSON) == report_render(b, ReportFormat::JSON));
}

TEST_CASE("word order does not change any precision") {
  auto data = two_words();
  RunSpec spec;
  spec.k = 3;
  spec.seeds = {1, 9};
  const auto a = run_experiment(spec, data.train, data.test,
                                sentences_from(data.global));
  std::stable_sort(data.train.begin(), data.train.end(),
                   [](const Instance& x, const Instance& y) {
                     return x.target_lemma > y.target_lemma;
                   });
  std::reverse(data.test.begin(), data.test.end());
  const auto b = run_experiment(spec, data.train, data.test,
                                sentences_from(data.global));
  REQUIRE(a.words.size() == b.words.size());
  for (const auto& wa : a.words) {
    const auto it = std::find_if(b.words.begin(), b.words.end(),
                                 [&](const WordResult& w) { return w.target == wa.target; });
    REQUIRE(it != b.words.end());
    CHECK(it->precision == wa.precision);
  }
  for (std::size_t r = 0; r < a.runs.size(); ++r)
    CHECK(a.runs[r].micro_precision == b.runs[r].micro_precision);
}

TEST_CASE("errors name the target word") {
  auto data = synthetic::generate({});
  RunSpec spec;
  spec.variant = Variant::LatentGlobal;
  spec.k = 2;
  CHECK_THROWS_AS(run_experiment(spec, data.train, data.test, {}), ConfigError);

  spec.k = 1000;
  try {
    run_experiment(spec, data.train, data.test, sentences_from(data.global));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bank") != std::string::npos);
  }

  auto test = data.test;
  test[0].target_lemma = "nowhere";
  spec.k = 2;
  CHECK_THROWS_AS(run_experiment(spec, data.train, test,
                                 sentences_from(data.global)),
                  ConfigError);
}
