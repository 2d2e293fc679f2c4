#include "synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace synthetic {

namespace {

using nmfwsd::Instance;
using nmfwsd::Sentence;
using nmfwsd::Token;

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string word(std::size_t target, std::size_t sense, std::size_t i) {
  return "t" + std::to_string(target) + "s" + std::to_string(sense) + "w" +
         std::to_string(i);
}

/// Random projective-agnostic tree rooted at `root`.
void attach_random_tree(Sentence& s, std::size_t root, std::mt19937_64& rng) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::iter_swap(order.begin(), std::find(order.begin(), order.end(), root));
  s[root].head.reset();
  s[root].deprel = "root";
  for (std::size_t n = 1; n < order.size(); ++n) {
    s[order[n]].head = order[draw(rng, 0, n - 1)];
    s[order[n]].deprel = "dep";
  }
}

Sentence content_tokens(std::size_t target, std::size_t sense,
                        std::size_t count, std::size_t pool,
                        std::mt19937_64& rng) {
  Sentence s;
  for (std::size_t i = 0; i < count; ++i) {
    const auto w = word(target, sense, draw(rng, 0, pool - 1));
    s.push_back(Token{w, w, "NOUN", std::nullopt, std::nullopt});
  }
  return s;
}

Instance make_instance(const std::string& target_lemma, std::size_t target,
                       std::size_t sense, const std::string& id,
                       const Options& o, std::mt19937_64& rng) {
  Instance inst;
  inst.id = id;
  inst.target_lemma = target_lemma;
  inst.sense_id = target_lemma + ".s" + std::to_string(sense);
  inst.tokens = content_tokens(target, sense, draw(rng, 6, 10),
                               o.words_per_sense, rng);
  inst.target_index = draw(rng, 0, inst.tokens.size());
  inst.tokens.insert(inst.tokens.begin() + static_cast<long>(inst.target_index),
                     Token{target_lemma, target_lemma, "NOUN", std::nullopt,
                           std::nullopt});
  inst.tokens.push_back(Token{".", ".", "PUNCT", std::nullopt, std::nullopt});
  attach_random_tree(inst.tokens, inst.target_index, rng);
  return inst;
}

}  // namespace

Dataset generate(const Options& o) {
  std::mt19937_64 rng(o.seed);
  Dataset d;
  for (std::size_t t = 0; t < o.targets.size(); ++t) {
    const auto& lemma = o.targets[t];
    for (const auto& [split, per_sense, out] :
         {std::tuple{"train", o.train_per_sense, &d.train},
          std::tuple{"test", o.test_per_sense, &d.test}}) {
      std::vector<std::size_t> senses;
      for (std::size_t s = 0; s < o.senses; ++s)
        senses.insert(senses.end(), per_sense, s);
      std::shuffle(senses.begin(), senses.end(), rng);
      for (std::size_t n = 0; n < senses.size(); ++n)
        out->push_back(make_instance(lemma, t, senses[n],
                                     lemma + "." + split + "." + std::to_string(n),
                                     o, rng));
    }
  }
  for (std::size_t n = 0; n < o.global_sentences; ++n) {
    const auto t = draw(rng, 0, o.targets.size() - 1);
    const auto s = draw(rng, 0, o.senses - 1);
    Sentence sent = content_tokens(t, s, draw(rng, 5, 10), o.words_per_sense, rng);
    sent.push_back(Token{".", ".", "PUNCT", std::nullopt, std::nullopt});
    attach_random_tree(sent, 0, rng);
    d.global.push_back(std::move(sent));
  }
  return d;
}

}  // namespace synthetic
