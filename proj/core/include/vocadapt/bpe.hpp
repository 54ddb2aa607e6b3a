#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocadapt/corpus.hpp"
#include "vocadapt/tokenizer.hpp"

namespace vocadapt {

/// Ordered BPE merges. Pair strings are in positional form (continuation
/// prefix included), so rank k's token is left + right-with-prefix-stripped.
class MergeList {
 public:
  MergeList() = default;
  explicit MergeList(std::vector<std::pair<std::string, std::string>> merges);

  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
  std::size_t size() const { return merges_.size(); }
  std::optional<std::size_t> rank_of(std::string_view left, std::string_view right) const;

 private:
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, std::size_t> rank_of_;
};

/// Domain vocabulary plus the merge-rank ordering used for subset
/// selection: alphabet tokens first, then merged tokens by rank.
struct DomainVocab {
  Vocabulary vocab;
  std::vector<std::string> merge_order;
  std::size_t alphabet_size = 0;

  std::size_t merged_count() const { return merge_order.size() - alphabet_size; }
};

struct BpeOptions {
  std::size_t target_size = 10000;
  std::uint64_t min_pair_freq = 2;  // hapax merges excluded
};

/// Captures the trainer's final per-word segmentation for consistency
/// checks against apply_merges.
struct BpeTrainDebug {
  std::vector<std::pair<std::string, std::vector<std::string>>> final_segmentation;
};

/// Trains BPE over word frequencies. The alphabet is every codepoint in
/// positional form; merging continues until the vocabulary (unk + alphabet
/// + merged tokens) reaches target_size or no pair occurs min_pair_freq
/// times. Deterministic: frequency ties break lexicographically on the
/// pair, comparing symbols by unprefixed text with word-initial forms
/// before continuation forms.
std::pair<DomainVocab, MergeList> train_bpe(const PreTokenizedCorpus& corpus,
                                            const BpeOptions& opts,
                                            BpeTrainDebug* debug = nullptr);

/// First k merged tokens in merge rank order (alphabet tokens excluded;
/// single codepoints are already in any pretrained vocabulary). k beyond
/// the merged-token count yields all of them; k beyond merge_order throws
/// OutOfRange.
std::vector<std::string> ordered_subset(const DomainVocab& dv, std::size_t k);

/// Re-applies merges to one word by rank (lowest first, occurrences left
/// to right). Returns positional-form symbols.
std::vector<std::string> apply_merges(const MergeList& merges, std::string_view word,
                                      const std::string& continuation_prefix = "##");

/// Line k holds `left<SPACE>right` for rank k (merges.txt convention).
void save_merges(const MergeList& merges, const std::filesystem::path& path);
MergeList load_merges(const std::filesystem::path& path);

/// Rebuilds a DomainVocab from the two files train-domain-vocab writes.
/// The vocab file must be laid out as [unk, alphabet..., merged tokens in
/// rank order]; the merges file pins down which tail tokens are merged.
/// Throws FormatError when the files do not line up.
DomainVocab domain_vocab_from_files(const std::filesystem::path& vocab_path,
                                    const std::filesystem::path& merges_path);

}  // namespace vocadapt
