#include <cmath>

#include "doctest.h"
#include "nmfwsd/eval.hpp"
#include "nmfwsd/wsd.hpp"
#include "synthetic.hpp"

using namespace nmfwsd;
using Dense = DenseMatrix<double>;

namespace {

Vector<double> vec(std::initializer_list<double> values) {
  Vector<double> v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Instance sentence(std::vector<std::string> lemmas, std::size_t target,
                  std::optional<std::string> sense) {
  Instance x;
  x.id = "x";
  x.target_lemma = lemmas.at(target);
  x.target_index = target;
  x.sense_id = std::move(sense);
  for (auto& l : lemmas) x.tokens.push_back({l, l, "NOUN", {}, {}});
  return x;
}

/// Two senses, each with its own context words; every instance carries its
/// sense's words around the target.
std::vector<Instance> two_clusters() {
  std::vector<Instance> xs;
  for (int r = 0; r < 4; ++r) {
    xs.push_back(sentence({"a1", "a2", "t", "a3"}, 2, "t.1"));
    xs.push_back(sentence({"b1", "t", "b2", "b3"}, 1, "t.2"));
  }
  return xs;
}

TrainConfig config_for(Variant v, Index k, std::uint64_t seed = 1) {
  RunSpec spec;
  spec.variant = v;
  spec.k = k;
  return spec.train_config(seed);
}

}  // namespace

TEST_CASE("variant names") {
  for (auto v : {Variant::Baseline1, Variant::LatentLocal, Variant::LatentGlobal})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK(parse_variant("LatentGlobal") == Variant::LatentGlobal);
  CHECK_THROWS_AS(parse_variant("baseline2"), ConfigError);
}

TEST_CASE("sense_centroids") {
  std::vector<Triplet<double>> t{{0, 0, 1.0}, {1, 1, 1.0}};
  const auto rows = from_triplets(2, 2, t);
  SUBCASE("mean of one sense") {
    const std::vector<std::string> labels{"s", "s"};
    const auto c = sense_centroids(rows, labels);
    REQUIRE(c.size() == 1);
    CHECK(c[0].second == vec({0.5, 0.5}));
  }
  SUBCASE("one row per sense") {
    const std::vector<std::string> labels{"y", "x"};
    const auto c = sense_centroids(rows, labels);
    REQUIRE(c.size() == 2);
    CHECK(c[0].first == "y");
    CHECK(c[0].second == vec({1, 0}));
    CHECK(c[1].second == vec({0, 1}));
  }
  SUBCASE("single row") {
    std::vector<Triplet<double>> one{{0, 1, 3.0}};
    const std::vector<std::string> labels{"s"};
    CHECK(sense_centroids(from_triplets(1, 2, one), labels)[0].second ==
          vec({0, 3}));
  }
  SUBCASE("listed sense without rows") {
    const std::vector<std::string> labels{"s", "s"};
    const std::vector<std::string> senses{"s", "missing"};
    CHECK_THROWS_AS(sense_centroids(rows, labels, senses), ConfigError);
  }
}

TEST_CASE("fold_in") {
  Dense m(2, 3);
  m << 1, 2, 3, 0, 1, 0.5;
  CHECK(fold_in(Vector<double>::Zero(3), m) == Vector<double>::Zero(2));
  CHECK(fold_in(vec({1, 2, 3}), Dense::Identity(3, 3)) == vec({1, 2, 3}));
  CHECK(fold_in(vec({1, 0, 2}), m) == vec({7, 1}));
  const auto u = vec({0.3, 1.7, 2.2}), w = vec({4, 0.1, 0.9});
  const double a = 2.5, b = -0.75;
  const Vector<double> lhs = fold_in(Vector<double>(a * u + b * w), m);
  const Vector<double> rhs = a * fold_in(u, m) + b * fold_in(w, m);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(fold_in(vec({1, 2}), m), ShapeError);
}

TEST_CASE("cosine") {
  CHECK(cosine(vec({1, 2}), vec({1, 2})) == doctest::Approx(1.0));
  CHECK(cosine(vec({1, 0}), vec({0, 1})) == 0.0);
  CHECK(cosine(vec({0, 0}), vec({1, 1})) == 0.0);
  CHECK(cosine(vec({1, 1}), vec({0, 0})) == 0.0);
  CHECK(cosine(vec({1, 0}), vec({-1, 0})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine(vec({1}), vec({1, 2})), ShapeError);
}

TEST_CASE("train shape contract") {
  const std::vector<Instance> xs{sentence({"t", "a"}, 0, "s1"),
                                 sentence({"t", "b"}, 0, "s2")};
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  for (auto v : {Variant::Baseline1, Variant::LatentLocal}) {
    const auto model = train(std::span<const Instance>(xs), m, config_for(v, 2));
    REQUIRE(model.sense_vectors.size() == 2);
    CHECK(model.sense_vectors[0].size() == 2);
    CHECK(model.sense_ids == std::vector<std::string>{"s1", "s2"});
    CHECK(model.k == 2);
  }
}

TEST_CASE("single sense model is the folded mean row") {
  const std::vector<Instance> xs{sentence({"t", "a", "b"}, 0, "s"),
                                 sentence({"t", "b", "c"}, 0, "s")};
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  const auto model = train(std::span<const Instance>(xs), m,
                           config_for(Variant::Baseline1, 1));
  REQUIRE(model.sense_vectors.size() == 1);
  const Vector<double> mean = m.A.densify().colwise().mean().transpose();
  const Vector<double> expected = fold_in(mean, model.fold_matrix_train);
  CHECK((model.sense_vectors[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("train rejects bad input") {
  auto xs = two_clusters();
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  CHECK_THROWS_AS(train(std::span<const Instance>(xs), m,
                        config_for(Variant::LatentGlobal, 2)),
                  ConfigError);
  xs[3].sense_id.reset();
  CHECK_THROWS_AS(train(std::span<const Instance>(xs), m,
                        config_for(Variant::Baseline1, 2)),
                  ConfigError);
  const std::vector<std::string> blank(xs.size(), "");
  CHECK_THROWS_AS(train(blank, m, config_for(Variant::Baseline1, 2)),
                  ConfigError);
}

TEST_CASE("most frequent sense breaks ties by first appearance") {
  std::vector<Instance> xs{sentence({"t", "a"}, 0, "late"),
                           sentence({"t", "b"}, 0, "early"),
                           sentence({"t", "b"}, 0, "early"),
                           sentence({"t", "a"}, 0, "late")};
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  auto model = train(std::span<const Instance>(xs), m,
                     config_for(Variant::Baseline1, 1));
  CHECK(model.most_frequent_sense == "late");
  xs.push_back(sentence({"t", "b"}, 0, "early"));
  const auto m2 = build_corpus_matrices(xs, CountingOptions{});
  model = train(std::span<const Instance>(xs), m2,
                config_for(Variant::Baseline1, 1));
  CHECK(model.most_frequent_sense == "early");
}

TEST_CASE("two clusters give nearly orthogonal sense vectors") {
  const auto xs = two_clusters();
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  for (auto v : {Variant::Baseline1, Variant::LatentLocal}) {
    const auto model = train(std::span<const Instance>(xs), m, config_for(v, 2));
    REQUIRE(model.sense_vectors.size() == 2);
    CHECK(cosine(model.sense_vectors[0], model.sense_vectors[1]) < 0.5);
  }
}

TEST_CASE("classify") {
  const auto xs = two_clusters();
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  const auto model = train(std::span<const Instance>(xs), m,
                           config_for(Variant::LatentLocal, 2));

  SUBCASE("training rows are recovered") {
    for (const auto& x : xs) {
      const auto c = classify(model, x);
      CHECK(c.sense == *x.sense_id);
      CHECK_FALSE(c.fallback);
      REQUIRE(c.scores.size() == 2);
      for (double s : c.scores) {
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
      }
    }
  }
  SUBCASE("unknown context falls back") {
    const auto c = classify(model, sentence({"q", "t", "r"}, 1, std::nullopt));
    CHECK(c.fallback);
    CHECK(c.sense == model.most_frequent_sense);
    CHECK(c.scores.size() == 2);
  }
  SUBCASE("deterministic") {
    const auto x = sentence({"a1", "t", "b2"}, 1, std::nullopt);
    const auto c1 = classify(model, x);
    const auto c2 = classify(model, x);
    CHECK(c1.sense == c2.sense);
    CHECK(c1.scores == c2.scores);
  }
  SUBCASE("decision is invariant to feature scaling") {
    const auto x = sentence({"a1", "b1", "t", "a3", "b2"}, 2, std::nullopt);
    const auto expected = classify(model, x);
    const Vector<double> f = test_features(model, x);
    for (double alpha : {1e-3, 0.5, 3.0, 1e4}) {
      const Vector<double> d = fold_in(Vector<double>(alpha * f), model.fold_matrix_test);
      std::size_t best = 0;
      std::vector<double> scores;
      for (const auto& b : model.sense_vectors) scores.push_back(cosine(d, b));
      for (std::size_t s = 1; s < scores.size(); ++s)
        if (scores[s] > scores[best]) best = s;
      CHECK(model.sense_ids[best] == expected.sense);
      for (std::size_t s = 0; s < scores.size(); ++s)
        CHECK(scores[s] == doctest::Approx(expected.scores[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("baseline1 uses sentence-wide features") {
  const auto xs = two_clusters();
  const auto m = build_corpus_matrices(xs, CountingOptions{});
  const auto model = train(std::span<const Instance>(xs), m,
                           config_for(Variant::Baseline1, 2));
  CHECK(model.fold_matrix_test == model.fold_matrix_train);
  // a1 sits far outside a window of 1 but still counts for baseline1.
  auto x = sentence({"a1", "z", "z", "z", "t"}, 4, std::nullopt);
  CHECK(test_features(model, x).sum() == 1.0);
  CHECK(classify(model, x).sense == "t.1");
}

TEST_CASE("synthetic corpus end to end") {
  const auto data = synthetic::generate({});
  RunSpec spec;
  spec.variant = Variant::LatentGlobal;
  spec.k = 2;
  spec.seeds = {7};
  const auto report = run_experiment(spec, data.train, data.test,
                                     sentences_from(data.global));
  REQUIRE(report.runs.size() == 1);
  CHECK(report.runs[0].total == data.test.size());
  CHECK(report.runs[0].micro_precision >= 0.95);
}
