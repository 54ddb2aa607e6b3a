#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vocadapt/bpe.hpp"
#include "vocadapt/corpus.hpp"
#include "vocadapt/tokenizer.hpp"

namespace vocadapt {

/// Vocabulary adaptation hyperparameters. Defaults are the published ones:
/// alpha=500 initial additions, beta=50 per iteration, gamma=3 fragment
/// score lower bound, domain vocabulary size 10,000.
struct AdaptConfig {
  std::size_t alpha = 500;
  std::size_t beta = 50;
  double gamma = 3.0;
  std::size_t domain_vocab_size = 10000;

  /// When set, adds exactly this many new tokens and skips the fragment
  /// score guard entirely.
  std::optional<std::size_t> n_override;

  void validate() const;
};

enum class TerminatedBy { Threshold, Exhausted };

std::string_view to_string(TerminatedBy t);

struct AdaptReport {
  std::size_t n_added = 0;
  std::size_t iterations = 0;
  /// (genuinely new tokens added so far, fragment score) after the initial
  /// alpha merge and after each beta step.
  std::vector<std::pair<std::size_t, double>> score_trace;
  TerminatedBy terminated_by = TerminatedBy::Threshold;
};

/// Average subword pieces per corpus word under `vocab`. Always >= 1; the
/// unk token counts as one piece. Integer totals, one final division.
double fragment_score(const Vocabulary& vocab, const PreTokenizedCorpus& corpus);

/// Merges the first alpha domain tokens (merge-rank order) into the
/// pretrained vocabulary, then adds beta more per iteration while the
/// fragment score stays above gamma. Stops early, with a warning in the
/// report, when the domain vocabulary runs out before the score reaches
/// gamma.
std::pair<Vocabulary, AdaptReport> adapt_vocabulary(const Vocabulary& pretrained,
                                                    const DomainVocab& domain,
                                                    const PreTokenizedCorpus& corpus,
                                                    const AdaptConfig& cfg);

}  // namespace vocadapt
