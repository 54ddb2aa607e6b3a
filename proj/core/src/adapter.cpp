#include "vocadapt/adapter.hpp"

#include <algorithm>

#include "vocadapt/errors.hpp"
#include "vocadapt/parallel.hpp"

namespace vocadapt {
namespace {

/// Fragment-score bookkeeping across Algorithm-1 iterations. Keeps the
/// piece count of every unique word and re-tokenizes only words that
/// contain a newly added token as a substring; no other word's greedy
/// segmentation can change. Behaviorally identical to recomputing the
/// score from scratch each iteration.
class IncrementalScorer {
 public:
  IncrementalScorer(const Vocabulary& vocab, const PreTokenizedCorpus& corpus)
      : total_words_(corpus.total_words) {
    words_.reserve(corpus.word_freq.size());
    freqs_.reserve(corpus.word_freq.size());
    for (const auto& [word, freq] : corpus.word_freq) {
      words_.push_back(word);
      freqs_.push_back(freq);
    }
    pieces_.assign(words_.size(), 0);

    const std::size_t chunks = parallel_chunk_count(words_.size());
    std::vector<std::uint64_t> partial(chunks, 0);
    parallel_chunks(words_.size(), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
      std::uint64_t sum = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto count = static_cast<std::uint32_t>(tokenize_word(vocab, words_[i]).pieces.size());
        pieces_[i] = count;
        sum += static_cast<std::uint64_t>(count) * freqs_[i];
      }
      partial[chunk] = sum;
    });
    total_subwords_ = 0;
    for (const std::uint64_t s : partial) total_subwords_ += s;
  }

  double score() const {
    return static_cast<double>(total_subwords_) / static_cast<double>(total_words_);
  }

  void apply_additions(const Vocabulary& vocab, const std::vector<std::string>& added) {
    if (added.empty()) return;
    const std::string& prefix = vocab.continuation_prefix();
    std::vector<std::string> stripped;
    stripped.reserve(added.size());
    for (const std::string& tok : added) {
      if (tok.size() > prefix.size() && tok.rfind(prefix, 0) == 0) {
        stripped.push_back(tok.substr(prefix.size()));
      } else {
        stripped.push_back(tok);
      }
    }

    const std::size_t chunks = parallel_chunk_count(words_.size());
    std::vector<std::int64_t> partial(chunks, 0);
    parallel_chunks(words_.size(), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
      std::int64_t delta = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::string& word = words_[i];
        bool affected = false;
        for (const std::string& s : stripped) {
          if (word.find(s) != std::string::npos) {
            affected = true;
            break;
          }
        }
        if (!affected) continue;
        const auto count = static_cast<std::uint32_t>(tokenize_word(vocab, word).pieces.size());
        if (count != pieces_[i]) {
          delta += (static_cast<std::int64_t>(count) - static_cast<std::int64_t>(pieces_[i])) *
                   static_cast<std::int64_t>(freqs_[i]);
          pieces_[i] = count;
        }
      }
      partial[chunk] = delta;
    });
    for (const std::int64_t d : partial) {
      total_subwords_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(total_subwords_) + d);
    }
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freqs_;
  std::vector<std::uint32_t> pieces_;
  std::uint64_t total_words_ = 0;
  std::uint64_t total_subwords_ = 0;
};

std::vector<std::string> new_tokens_only(const Vocabulary& vocab,
                                         std::vector<std::string> candidates) {
  std::erase_if(candidates, [&vocab](const std::string& tok) { return vocab.contains(tok); });
  return candidates;
}

}  // namespace

std::string_view to_string(TerminatedBy t) {
  return t == TerminatedBy::Threshold ? "threshold" : "exhausted";
}

void AdaptConfig::validate() const {
  if (beta < 1) {
    throw Error(ErrorCode::InvalidArgument, "beta must be >= 1");
  }
  if (gamma < 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "gamma must be >= 1.0 (a fragment score below 1 is impossible)");
  }
}

double fragment_score(const Vocabulary& vocab, const PreTokenizedCorpus& corpus) {
  const TokenizationStats stats = tokenize_corpus(vocab, corpus);
  return static_cast<double>(stats.total_subwords) / static_cast<double>(stats.total_words);
}

std::pair<Vocabulary, AdaptReport> adapt_vocabulary(const Vocabulary& pretrained,
                                                    const DomainVocab& domain,
                                                    const PreTokenizedCorpus& corpus,
                                                    const AdaptConfig& cfg) {
  cfg.validate();
  if (corpus.total_words == 0) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has zero words");
  }

  const std::size_t merged_available = domain.merged_count();
  AdaptReport report;

  if (cfg.n_override.has_value()) {
    // Manual n_D: consume merge order until exactly n new tokens join.
    std::vector<std::string> additions;
    additions.reserve(*cfg.n_override);
    for (std::size_t i = domain.alphabet_size;
         i < domain.merge_order.size() && additions.size() < *cfg.n_override; ++i) {
      const std::string& tok = domain.merge_order[i];
      if (!pretrained.contains(tok)) additions.push_back(tok);
    }
    Vocabulary adapted = merge_vocabs(pretrained, additions);
    report.n_added = adapted.size() - pretrained.size();
    report.iterations = 0;
    report.terminated_by =
        report.n_added == *cfg.n_override ? TerminatedBy::Threshold : TerminatedBy::Exhausted;
    report.score_trace.emplace_back(report.n_added, fragment_score(adapted, corpus));
    return {std::move(adapted), std::move(report)};
  }

  std::size_t consumed = std::min(cfg.alpha, merged_available);
  Vocabulary adapted = merge_vocabs(pretrained, ordered_subset(domain, consumed));

  IncrementalScorer scorer(adapted, corpus);
  double score = scorer.score();
  report.score_trace.emplace_back(adapted.size() - pretrained.size(), score);

  while (score > cfg.gamma && consumed < merged_available) {
    const std::size_t next = std::min(consumed + cfg.beta, merged_available);
    const auto begin =
        domain.merge_order.begin() + static_cast<std::ptrdiff_t>(domain.alphabet_size + consumed);
    const auto end =
        domain.merge_order.begin() + static_cast<std::ptrdiff_t>(domain.alphabet_size + next);
    std::vector<std::string> batch(begin, end);
    consumed = next;

    const std::vector<std::string> fresh = new_tokens_only(adapted, std::move(batch));
    adapted = merge_vocabs(adapted, fresh);
    scorer.apply_additions(adapted, fresh);
    score = scorer.score();
    ++report.iterations;
    report.score_trace.emplace_back(adapted.size() - pretrained.size(), score);
  }

  report.n_added = adapted.size() - pretrained.size();
  report.terminated_by = score <= cfg.gamma ? TerminatedBy::Threshold : TerminatedBy::Exhausted;
  return {std::move(adapted), std::move(report)};
}

}  // namespace vocadapt
