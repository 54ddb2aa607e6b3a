#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "manifest.hpp"
#include "vocadapt/adapter.hpp"
#include "vocadapt/bpe.hpp"
#include "vocadapt/corpus.hpp"
#include "vocadapt/embedding.hpp"
#include "vocadapt/errors.hpp"
#include "vocadapt/grad_check.hpp"
#include "vocadapt/loss.hpp"
#include "vocadapt/tokenizer.hpp"

namespace vocadapt::cli {
namespace {

using nlohmann::json;

PreTokenizedCorpus load_pretokenized(const CorpusArgs& args, const std::string& path) {
  CorpusFormat format = CorpusFormat::PlainLines;
  if (args.format == "jsonl") {
    format = CorpusFormat::JsonlField;
  } else if (args.format != "plain") {
    throw Error(ErrorCode::InvalidArgument, "unknown corpus format \"" + args.format + "\"");
  }
  const RawCorpus raw = load_corpus(path, format, args.jsonl_field);
  PreTokenizeOptions opts;
  opts.lowercase = !args.no_lowercase;
  opts.split_punct = !args.no_split_punct;
  opts.drop_punct_words = args.drop_punct;
  return pre_tokenize(raw, opts);
}

PreTokenizedCorpus load_pretokenized(const CorpusArgs& args) {
  return load_pretokenized(args, args.path);
}

json corpus_config(const CorpusArgs& args) {
  return json{{"corpus", args.path},
              {"format", args.format},
              {"jsonl_field", args.jsonl_field},
              {"lowercase", !args.no_lowercase},
              {"split_punct", !args.no_split_punct},
              {"drop_punct", args.drop_punct}};
}

json score_json(const Vocabulary& vocab, const PreTokenizedCorpus& corpus) {
  const TokenizationStats stats = tokenize_corpus(vocab, corpus);
  json histogram = json::object();
  for (const auto& [pieces, count] : stats.per_word_hist) {
    histogram[std::to_string(pieces)] = count;
  }
  return json{{"fragment_score", static_cast<double>(stats.total_subwords) /
                                     static_cast<double>(stats.total_words)},
              {"total_words", stats.total_words},
              {"total_subwords", stats.total_subwords},
              {"histogram", histogram}};
}

std::string join_pieces(const std::vector<std::string>& pieces) {
  std::string out;
  for (const std::string& piece : pieces) {
    if (!out.empty()) out += ' ';
    out += piece;
  }
  return out;
}

/// Corpus words tokenized differently by the two vocabularies, most
/// frequent first (ties lexicographic), truncated to `top` when nonzero.
json diff_rows(const Vocabulary& vocab_a, const Vocabulary& vocab_b,
               const PreTokenizedCorpus& corpus, std::size_t top) {
  std::vector<std::pair<std::string, std::uint64_t>> words(corpus.word_freq.begin(),
                                                           corpus.word_freq.end());
  std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  json rows = json::array();
  for (const auto& [word, count] : words) {
    if (top > 0 && rows.size() >= top) break;
    const WordTokenization a = tokenize_word(vocab_a, word);
    const WordTokenization b = tokenize_word(vocab_b, word);
    if (a.pieces == b.pieces) continue;
    rows.push_back(json{{"word", word},
                        {"count", count},
                        {"pretrained", a.pieces},
                        {"adapted", b.pieces}});
  }
  return json{{"rows", rows}};
}

/// Text rendering of the diff JSON; formatting only, no recomputation.
std::string render_diff_text(const json& diff) {
  std::string out = "word\tpretrained\tadapted\n";
  for (const json& row : diff.at("rows")) {
    std::vector<std::string> a = row.at("pretrained").get<std::vector<std::string>>();
    std::vector<std::string> b = row.at("adapted").get<std::vector<std::string>>();
    out += row.at("word").get<std::string>();
    out += '\t';
    out += join_pieces(a);
    out += '\t';
    out += join_pieces(b);
    out += '\n';
  }
  return out;
}

void require_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--out is required");
  }
  std::filesystem::create_directories(out_dir);
}

}  // namespace

int cmd_train_domain_vocab(const TrainDomainVocabArgs& args) {
  require_out_dir(args.out_dir);
  const PreTokenizedCorpus corpus = load_pretokenized(args.corpus);

  BpeOptions opts;
  opts.target_size = args.size;
  opts.min_pair_freq = args.min_pair_freq;
  const auto [domain, merges] = train_bpe(corpus, opts);

  const std::filesystem::path out(args.out_dir);
  save_vocab(domain.vocab, out / "domain_vocab.txt");
  save_merges(merges, out / "merges.txt");

  json config = corpus_config(args.corpus);
  config["size"] = args.size;
  config["min_pair_freq"] = args.min_pair_freq;
  write_json(make_manifest("train-domain-vocab", config, {args.corpus.path}),
             out / "manifest.json");

  std::cerr << "trained " << merges.size() << " merges, vocab size " << domain.vocab.size()
            << " (alphabet " << domain.alphabet_size << ")\n";
  return 0;
}

int cmd_adapt(const AdaptArgs& args) {
  require_out_dir(args.out_dir);
  const Vocabulary pretrained = load_vocab(args.pretrained_vocab, VocabLabel::Pretrained);
  const DomainVocab domain = domain_vocab_from_files(args.domain_vocab, args.merges);
  const PreTokenizedCorpus corpus = load_pretokenized(args.corpus);

  AdaptConfig cfg;
  cfg.alpha = args.alpha;
  cfg.beta = args.beta;
  cfg.gamma = args.gamma;
  cfg.domain_vocab_size = domain.vocab.size();
  cfg.n_override = args.n_override;
  const auto [adapted, report] = adapt_vocabulary(pretrained, domain, corpus, cfg);

  if (report.terminated_by == TerminatedBy::Exhausted && !args.n_override.has_value()) {
    std::cerr << "warning: domain vocabulary exhausted before the fragment score reached "
              << args.gamma << " (final score " << report.score_trace.back().second << ")\n";
  }

  const std::filesystem::path out(args.out_dir);
  save_vocab(adapted, out / "adapted_vocab.txt");

  json trace = json::array();
  for (const auto& [added, score] : report.score_trace) {
    trace.push_back(json{{"added", added}, {"fragment_score", score}});
  }
  const json report_json{{"n_added", report.n_added},
                         {"iterations", report.iterations},
                         {"terminated_by", std::string(to_string(report.terminated_by))},
                         {"score_trace", trace}};
  write_json(report_json, out / "adapt_report.json");

  const json diff = diff_rows(pretrained, adapted, corpus, args.diff_top);
  write_json(diff, out / "word_diff.json");
  std::ofstream diff_txt(out / "word_diff.txt", std::ios::binary | std::ios::trunc);
  diff_txt << render_diff_text(diff);
  diff_txt.close();

  json config = corpus_config(args.corpus);
  config["pretrained_vocab"] = args.pretrained_vocab;
  config["domain_vocab"] = args.domain_vocab;
  config["merges"] = args.merges;
  config["alpha"] = args.alpha;
  config["beta"] = args.beta;
  config["gamma"] = args.gamma;
  config["diff_top"] = args.diff_top;
  if (args.n_override.has_value()) {
    config["n_override"] = *args.n_override;
  } else {
    config["n_override"] = nullptr;
  }
  write_json(make_manifest("adapt", config,
                           {args.corpus.path, args.pretrained_vocab, args.domain_vocab,
                            args.merges}),
             out / "manifest.json");

  std::cerr << "added " << report.n_added << " tokens in " << report.iterations
            << " iterations, final score " << report.score_trace.back().second << "\n";
  return 0;
}

int cmd_score(const ScoreArgs& args) {
  const Vocabulary vocab = load_vocab(args.vocab, VocabLabel::Pretrained);
  const PreTokenizedCorpus corpus = load_pretokenized(args.corpus);
  if (!args.dump_word_freq.empty()) {
    std::ofstream tsv(args.dump_word_freq, std::ios::binary | std::ios::trunc);
    if (!tsv) {
      throw Error(ErrorCode::IoError, "cannot write " + args.dump_word_freq);
    }
    dump_word_frequencies_tsv(corpus, tsv);
  }
  std::cout << score_json(vocab, corpus).dump(2) << '\n';
  return 0;
}

int cmd_diff(const DiffArgs& args) {
  const Vocabulary vocab_a = load_vocab(args.vocab_a, VocabLabel::Pretrained);
  const Vocabulary vocab_b = load_vocab(args.vocab_b, VocabLabel::Adapted);
  const PreTokenizedCorpus corpus = load_pretokenized(args.corpus);
  const json diff = diff_rows(vocab_a, vocab_b, corpus, args.top);
  for (const json& row : diff.at("rows")) {
    std::cout << row.at("word").get<std::string>() << '\t'
              << join_pieces(row.at("pretrained").get<std::vector<std::string>>()) << '\t'
              << join_pieces(row.at("adapted").get<std::vector<std::string>>()) << '\n';
  }
  return 0;
}

int cmd_analyze(const AnalyzeArgs& args) {
  if (args.corpora.empty() || args.vocabs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "analyze needs at least one corpus and one vocab");
  }
  std::vector<Vocabulary> vocabs;
  vocabs.reserve(args.vocabs.size());
  for (const std::string& path : args.vocabs) {
    vocabs.push_back(load_vocab(path, VocabLabel::Pretrained));
  }

  json matrix = json::array();
  for (const std::string& corpus_path : args.corpora) {
    const PreTokenizedCorpus corpus = load_pretokenized(args.corpus_opts, corpus_path);
    json row = json::array();
    for (const Vocabulary& vocab : vocabs) {
      row.push_back(fragment_score(vocab, corpus));
    }
    matrix.push_back(std::move(row));
  }

  const json out{{"corpora", args.corpora}, {"vocabs", args.vocabs}, {"matrix", matrix}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_init_embeddings(const InitEmbeddingsArgs& args) {
  if (args.out_file.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--out is required");
  }
  const Vocabulary pretrained = load_vocab(args.pretrained_vocab, VocabLabel::Pretrained);
  const Vocabulary adapted = load_vocab(args.adapted_vocab, VocabLabel::Adapted);
  const EmbeddingTable base = load_embeddings(args.base_table, VocabLabel::Pretrained);
  const EmbeddingTable extended = init_added_embeddings(base, adapted, pretrained);

  const std::filesystem::path out(args.out_file);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  save_embeddings(extended, out);

  const json config{{"base_table", args.base_table},
                    {"pretrained_vocab", args.pretrained_vocab},
                    {"adapted_vocab", args.adapted_vocab},
                    {"out", args.out_file}};
  write_json(make_manifest("init-embeddings", config,
                           {args.base_table, args.pretrained_vocab, args.adapted_vocab}),
             out.string() + ".manifest.json");

  std::cerr << "initialized " << (extended.size() - base.size()) << " added tokens over dim "
            << extended.dim() << "\n";
  return 0;
}

int cmd_demo_loss(const DemoLossArgs& args) {
  if (args.batch_size == 0) {
    throw Error(ErrorCode::InvalidArgument, "--batch-size must be >= 1");
  }
  if (args.classes < 2) {
    throw Error(ErrorCode::InvalidArgument, "--classes must be >= 2");
  }
  RegForm form = RegForm::PerSample;
  if (args.form == "eq2-literal") {
    form = RegForm::Eq2Literal;
  } else if (args.form != "per-sample") {
    throw Error(ErrorCode::InvalidArgument, "unknown loss form \"" + args.form + "\"");
  }
  Pooling pooling = Pooling::Mean;
  if (args.pooling == "first") {
    pooling = Pooling::First;
  } else if (args.pooling != "mean") {
    throw Error(ErrorCode::InvalidArgument, "unknown pooling \"" + args.pooling + "\"");
  }

  const Vocabulary pretrained = load_vocab(args.pretrained_vocab, VocabLabel::Pretrained);
  const Vocabulary adapted = load_vocab(args.adapted_vocab, VocabLabel::Adapted);
  const EmbeddingTable table = load_embeddings(args.embeddings, VocabLabel::Adapted);
  const PreTokenizedCorpus corpus = load_pretokenized(args.corpus);

  std::mt19937 rng(static_cast<std::mt19937::result_type>(args.seed));
  const std::size_t batch_size = std::min(args.batch_size, corpus.sentences.size());

  DualBatch batch;
  for (std::size_t i = 0; i < batch_size; ++i) {
    DualBatchItem item;
    for (const std::string& word : corpus.sentences[i]) {
      for (std::string& piece : tokenize_word(pretrained, word).pieces) {
        item.pretrained_pieces.push_back(std::move(piece));
      }
      for (std::string& piece : tokenize_word(adapted, word).pieces) {
        item.adapted_pieces.push_back(std::move(piece));
      }
    }
    item.label = rng() % args.classes;
    batch.items.push_back(std::move(item));
  }

  Matrix classifier(table.dim(), args.classes);
  std::normal_distribution<double> weight(0.0, 1.0);
  for (double& x : classifier.data) x = weight(rng);

  EncoderStandIn encoder;
  encoder.embeddings = &table;
  encoder.classifier = classifier;

  LossConfig cfg;
  cfg.tau = args.tau;
  cfg.lambda = args.lambda;
  cfg.form = form;
  cfg.pooling = pooling;
  const ForwardBackwardResult chosen = forward_backward(batch, encoder, cfg);

  LossConfig other_cfg = cfg;
  other_cfg.form = form == RegForm::PerSample ? RegForm::Eq2Literal : RegForm::PerSample;
  const ForwardBackwardResult other = forward_backward(batch, encoder, other_cfg);

  const double reg_per_sample = form == RegForm::PerSample ? chosen.reg : other.reg;
  const double reg_literal = form == RegForm::Eq2Literal ? chosen.reg : other.reg;
  const json out{{"ce", chosen.ce},
                 {"reg_per_sample", reg_per_sample},
                 {"reg_literal", reg_literal},
                 {"total", chosen.loss}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_grad_check(const GradCheckArgs& args) {
  const GradCheckSummary summary = run_gradient_check(args.seed, args.trials);
  const bool pass = summary.max_rel_err <= 1e-4;
  std::cout << "max relative error " << summary.max_rel_err << " over " << summary.trials
            << " instances (threshold 1e-04): " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 3;
}

}  // namespace vocadapt::cli
