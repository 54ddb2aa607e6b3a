#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vocadapt/errors.hpp"

namespace {

using namespace vocadapt::cli;

void add_corpus_options(CLI::App* cmd, CorpusArgs& args, bool positional = true) {
  if (positional) {
    cmd->add_option("corpus", args.path, "corpus file (UTF-8)")->required();
  }
  cmd->add_option("--format", args.format, "corpus format: plain | jsonl")
      ->check(CLI::IsMember({"plain", "jsonl"}))
      ->capture_default_str();
  cmd->add_option("--jsonl-field", args.jsonl_field, "text field for jsonl records")
      ->capture_default_str();
  cmd->add_flag("--no-lowercase", args.no_lowercase, "keep the original casing");
  cmd->add_flag("--no-split-punct", args.no_split_punct, "do not isolate punctuation codepoints");
  cmd->add_flag("--drop-punct", args.drop_punct, "exclude punctuation words from all counts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subword vocabulary adaptation toolkit", "vocadapt"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags win");
#ifdef VOCADAPT_VERSION
  app.set_version_flag("--version", VOCADAPT_VERSION);
#endif

  TrainDomainVocabArgs train_args;
  CLI::App* train = app.add_subcommand("train-domain-vocab",
                                       "train BPE merges and a domain vocabulary from a corpus");
  add_corpus_options(train, train_args.corpus);
  train->add_option("--size", train_args.size, "target domain vocabulary size")
      ->capture_default_str();
  train->add_option("--min-pair-freq", train_args.min_pair_freq,
                    "minimum pair frequency for a merge")
      ->capture_default_str();
  train->add_option("--out", train_args.out_dir, "output directory")->required();

  AdaptArgs adapt_args;
  CLI::App* adapt =
      app.add_subcommand("adapt", "select domain tokens by fragment score and merge them");
  add_corpus_options(adapt, adapt_args.corpus);
  adapt->add_option("--pretrained-vocab", adapt_args.pretrained_vocab, "pretrained vocab.txt")
      ->required();
  adapt->add_option("--domain-vocab", adapt_args.domain_vocab, "domain vocabulary file")
      ->required();
  adapt->add_option("--merges", adapt_args.merges, "domain merges file")->required();
  adapt->add_option("--alpha", adapt_args.alpha, "initial token additions")->capture_default_str();
  adapt->add_option("--beta", adapt_args.beta, "additions per iteration")->capture_default_str();
  adapt->add_option("--gamma", adapt_args.gamma, "fragment score lower bound")
      ->capture_default_str();
  adapt->add_option("--n-override", adapt_args.n_override,
                    "add exactly this many tokens, skipping the score guard");
  adapt->add_option("--diff-top", adapt_args.diff_top, "rows in the word diff report")
      ->capture_default_str();
  adapt->add_option("--out", adapt_args.out_dir, "output directory")->required();

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "fragment score of a vocabulary on a corpus");
  add_corpus_options(score, score_args.corpus);
  score->add_option("--vocab", score_args.vocab, "vocabulary file")->required();
  score->add_option("--dump-word-freq", score_args.dump_word_freq,
                    "also write a word<TAB>count dump to this path");

  DiffArgs diff_args;
  CLI::App* diff = app.add_subcommand("diff", "words tokenized differently by two vocabularies");
  add_corpus_options(diff, diff_args.corpus);
  diff->add_option("--vocab-a", diff_args.vocab_a, "first vocabulary")->required();
  diff->add_option("--vocab-b", diff_args.vocab_b, "second vocabulary")->required();
  diff->add_option("--top", diff_args.top, "keep only the most frequent rows (0 = all)")
      ->capture_default_str();

  AnalyzeArgs analyze_args;
  CLI::App* analyze =
      app.add_subcommand("analyze", "average subwords per word for every corpus x vocab pair");
  analyze->add_option("--corpus", analyze_args.corpora, "corpus file (repeatable)")
      ->required()
      ->take_all();
  analyze->add_option("--vocab", analyze_args.vocabs, "vocabulary file (repeatable)")
      ->required()
      ->take_all();
  add_corpus_options(analyze, analyze_args.corpus_opts, false);

  InitEmbeddingsArgs init_args;
  CLI::App* init = app.add_subcommand("init-embeddings",
                                      "extend a pretrained embedding table to an adapted vocab");
  init->add_option("--base", init_args.base_table, "pretrained embedding table")->required();
  init->add_option("--pretrained-vocab", init_args.pretrained_vocab, "pretrained vocab.txt")
      ->required();
  init->add_option("--adapted-vocab", init_args.adapted_vocab, "adapted vocab.txt")->required();
  init->add_option("--out", init_args.out_file, "output embedding file")->required();

  DemoLossArgs demo_args;
  CLI::App* demo = app.add_subcommand("demo-loss",
                                      "dual-tokenize a batch and print the fine-tuning losses");
  add_corpus_options(demo, demo_args.corpus);
  demo->add_option("--pretrained-vocab", demo_args.pretrained_vocab, "pretrained vocab.txt")
      ->required();
  demo->add_option("--adapted-vocab", demo_args.adapted_vocab, "adapted vocab.txt")->required();
  demo->add_option("--embeddings", demo_args.embeddings, "embedding table over the adapted vocab")
      ->required();
  demo->add_option("--batch-size", demo_args.batch_size, "sentences per batch")
      ->capture_default_str();
  demo->add_option("--tau", demo_args.tau, "softmax temperature")->capture_default_str();
  demo->add_option("--lambda", demo_args.lambda, "regularization weight")->capture_default_str();
  demo->add_option("--form", demo_args.form, "regularizer form: per-sample | eq2-literal")
      ->check(CLI::IsMember({"per-sample", "eq2-literal"}))
      ->capture_default_str();
  demo->add_option("--pooling", demo_args.pooling, "sentence pooling: mean | first")
      ->check(CLI::IsMember({"mean", "first"}))
      ->capture_default_str();
  demo->add_option("--classes", demo_args.classes, "classifier output classes")
      ->capture_default_str();
  demo->add_option("--seed", demo_args.seed, "seed for labels and classifier weights")
      ->required();

  GradCheckArgs grad_args;
  CLI::App* grad = app.add_subcommand(
      "grad-check", "compare analytic loss gradients against central finite differences");
  grad->add_option("--trials", grad_args.trials, "random instances to run")
      ->capture_default_str();
  grad->add_option("--seed", grad_args.seed, "seed for instance generation")->required();

  try {
    app.parse(argc, argv);
    if (train->parsed()) return cmd_train_domain_vocab(train_args);
    if (adapt->parsed()) return cmd_adapt(adapt_args);
    if (score->parsed()) return cmd_score(score_args);
    if (diff->parsed()) return cmd_diff(diff_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (init->parsed()) return cmd_init_embeddings(init_args);
    if (demo->parsed()) return cmd_demo_loss(demo_args);
    if (grad->parsed()) return cmd_grad_check(grad_args);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const vocadapt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_usage_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
