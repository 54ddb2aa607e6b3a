#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "vocadapt/adapter.hpp"
#include "vocadapt/bpe.hpp"
#include "vocadapt/corpus.hpp"
#include "vocadapt/loss.hpp"
#include "vocadapt/tokenizer.hpp"

namespace {

using namespace vocadapt;

// Zipf-ish synthetic corpus: a few thousand distinct words, heavy head.
PreTokenizedCorpus synthetic_corpus(std::size_t total_words, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len(2, 10);
  std::uniform_int_distribution<int> chr(0, 25);
  std::vector<std::string> lexicon;
  for (int i = 0; i < 4000; ++i) {
    std::string word;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) word.push_back(static_cast<char>('a' + chr(rng)));
    lexicon.push_back(std::move(word));
  }

  PreTokenizedCorpus corpus;
  std::vector<std::string> sentence;
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (std::size_t w = 0; w < total_words; ++w) {
    const auto idx = static_cast<std::size_t>(std::pow(pick(rng), 3.0) * (lexicon.size() - 1));
    sentence.push_back(lexicon[idx]);
    if (sentence.size() == 16) {
      corpus.sentences.push_back(sentence);
      sentence.clear();
    }
  }
  if (!sentence.empty()) corpus.sentences.push_back(sentence);
  for (const auto& s : corpus.sentences) {
    for (const auto& word : s) {
      ++corpus.word_freq[word];
      ++corpus.total_words;
    }
  }
  return corpus;
}

Vocabulary singles_vocab() {
  std::vector<std::string> tokens{"[UNK]"};
  for (char c = 'a'; c <= 'z'; ++c) {
    tokens.push_back(std::string(1, c));
    tokens.push_back("##" + std::string(1, c));
  }
  return Vocabulary::from_tokens(std::move(tokens), VocabLabel::Pretrained);
}

void TokenizeCorpus(benchmark::State& state) {
  const auto corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 7);
  const Vocabulary vocab = singles_vocab();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenize_corpus(vocab, corpus));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(TokenizeCorpus)->Arg(10000)->Arg(50000);

void TrainBpe(benchmark::State& state) {
  const auto corpus = synthetic_corpus(50000, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train_bpe(corpus, {.target_size = static_cast<std::size_t>(state.range(0))}));
  }
}
BENCHMARK(TrainBpe)->Arg(1000)->Arg(4000);

void AdaptVocabulary(benchmark::State& state) {
  const auto corpus = synthetic_corpus(50000, 13);
  const auto [domain, merges] = train_bpe(corpus, {.target_size = 4000});
  const Vocabulary pretrained = singles_vocab();
  AdaptConfig cfg;
  cfg.alpha = 100;
  cfg.beta = 50;
  cfg.gamma = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt_vocabulary(pretrained, domain, corpus, cfg));
  }
}
BENCHMARK(AdaptVocabulary);

void ContrastiveReg(benchmark::State& state) {
  std::mt19937 rng(3);
  std::normal_distribution<double> dist(0.0, 1.0);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> h_a(batch, std::vector<double>(64));
  std::vector<std::vector<double>> h_p(batch, std::vector<double>(64));
  for (auto& v : h_a) {
    for (double& x : v) x = dist(rng);
    v[0] += 4.0;
  }
  for (auto& v : h_p) {
    for (double& x : v) x = dist(rng);
    v[0] += 4.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(contrastive_reg(h_a, h_p, 2.0, RegForm::PerSample));
  }
}
BENCHMARK(ContrastiveReg)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
