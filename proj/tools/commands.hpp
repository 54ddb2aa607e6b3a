#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vocadapt::cli {

/// Shared corpus-loading flags.
struct CorpusArgs {
  std::string path;
  std::string format = "plain";  // plain | jsonl
  std::string jsonl_field = "text";
  bool no_lowercase = false;
  bool no_split_punct = false;
  bool drop_punct = false;
};

struct TrainDomainVocabArgs {
  CorpusArgs corpus;
  std::size_t size = 10000;
  std::uint64_t min_pair_freq = 2;
  std::string out_dir;
};

struct AdaptArgs {
  CorpusArgs corpus;
  std::string pretrained_vocab;
  std::string domain_vocab;
  std::string merges;
  std::size_t alpha = 500;
  std::size_t beta = 50;
  double gamma = 3.0;
  std::optional<std::size_t> n_override;
  std::size_t diff_top = 20;
  std::string out_dir;
};

struct ScoreArgs {
  CorpusArgs corpus;
  std::string vocab;
  std::string dump_word_freq;  // optional TSV dump path
};

struct DiffArgs {
  CorpusArgs corpus;
  std::string vocab_a;
  std::string vocab_b;
  std::size_t top = 0;  // 0 = all
};

struct AnalyzeArgs {
  std::vector<std::string> corpora;
  std::vector<std::string> vocabs;
  CorpusArgs corpus_opts;  // path unused; format/flags apply to every corpus
};

struct InitEmbeddingsArgs {
  std::string base_table;
  std::string pretrained_vocab;
  std::string adapted_vocab;
  std::string out_file;
};

struct DemoLossArgs {
  CorpusArgs corpus;
  std::string pretrained_vocab;
  std::string adapted_vocab;
  std::string embeddings;
  std::size_t batch_size = 16;
  double tau = 2.5;
  double lambda = 1.0;
  std::string form = "per-sample";  // per-sample | eq2-literal
  std::string pooling = "mean";     // mean | first
  std::size_t classes = 2;
  std::uint64_t seed = 0;
};

struct GradCheckArgs {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
};

int cmd_train_domain_vocab(const TrainDomainVocabArgs& args);
int cmd_adapt(const AdaptArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_diff(const DiffArgs& args);
int cmd_analyze(const AnalyzeArgs& args);
int cmd_init_embeddings(const InitEmbeddingsArgs& args);
int cmd_demo_loss(const DemoLossArgs& args);
int cmd_grad_check(const GradCheckArgs& args);

}  // namespace vocadapt::cli
