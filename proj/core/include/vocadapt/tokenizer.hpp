#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vocadapt/corpus.hpp"

namespace vocadapt {

enum class VocabLabel { Pretrained, Domain, Adapted };

std::string_view to_string(VocabLabel label);

/// Ordered subword vocabulary with the BERT continuation-prefix convention.
/// Token ids are list positions. Immutable after construction, so a shared
/// instance is safe to tokenize against from many threads.
class Vocabulary {
 public:
  /// Empty placeholder; any usable instance comes from from_tokens or
  /// load_vocab.
  Vocabulary() = default;

  /// Validates and indexes `tokens`: unique, non-empty, whitespace-free,
  /// and containing `unk_token`.
  static Vocabulary from_tokens(std::vector<std::string> tokens, VocabLabel label,
                                std::string continuation_prefix = "##",
                                std::string unk_token = "[UNK]");

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  std::optional<std::uint32_t> id_of(std::string_view token) const;
  bool contains(std::string_view token) const { return id_of(token).has_value(); }

  const std::string& continuation_prefix() const { return continuation_prefix_; }
  const std::string& unk_token() const { return unk_token_; }
  VocabLabel label() const { return label_; }
  Vocabulary relabeled(VocabLabel label) const;

  /// Longest token length in codepoints; bounds the greedy matcher.
  std::size_t max_token_codepoints() const { return max_token_codepoints_; }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view sv) const {
      return std::hash<std::string_view>{}(sv);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> id_of_;
  std::string continuation_prefix_;
  std::string unk_token_;
  VocabLabel label_ = VocabLabel::Pretrained;
  std::size_t max_token_codepoints_ = 0;
};

/// One token per line, line index = id (BERT vocab.txt convention).
Vocabulary load_vocab(const std::filesystem::path& path, VocabLabel label);
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);

struct WordTokenization {
  std::string word;
  std::vector<std::string> pieces;
  bool is_unk = false;
};

/// Where greedy matching starts: at a word boundary (pieces begin with a
/// bare token) or mid-word (every piece carries the continuation prefix).
enum class MatchPosition { WordInitial, Continuation };

/// Greedy longest-match-first segmentation. Words longer than
/// kMaxWordCodepoints, or with no match at some cursor, become the unk
/// token.
WordTokenization tokenize_word(const Vocabulary& vocab, std::string_view word,
                               MatchPosition start = MatchPosition::WordInitial);

inline constexpr std::size_t kMaxWordCodepoints = 100;

struct TokenizationStats {
  std::uint64_t total_subwords = 0;
  std::uint64_t total_words = 0;
  std::map<std::uint32_t, std::uint64_t> per_word_hist;  // piece count -> word occurrences
};

/// Piece-count totals over the whole corpus; the unk token counts as one
/// subword. Unique words are tokenized once and weighted by frequency.
TokenizationStats tokenize_corpus(const Vocabulary& vocab, const PreTokenizedCorpus& corpus);

/// Appends `additions` (minus tokens already present) to the pretrained
/// vocabulary. Every pretrained id is preserved; the result is labeled
/// Adapted.
Vocabulary merge_vocabs(const Vocabulary& pretrained, const std::vector<std::string>& additions);

}  // namespace vocadapt
