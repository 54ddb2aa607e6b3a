#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vocadapt/tokenizer.hpp"

namespace vocadapt {

/// Dense vectors keyed by token, insertion-ordered so serialization is
/// deterministic. Immutable once built.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, VocabLabel vocab_label)
      : dim_(dim), vocab_label_(vocab_label) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  VocabLabel vocab_label() const { return vocab_label_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool has(std::string_view token) const;
  std::span<const double> vector_of(std::string_view token) const;  // throws MissingBaseVector

  /// Throws DimMismatch on wrong length, DuplicateToken on repeats.
  void insert(std::string token, std::vector<double> vector);

 private:
  std::size_t dim_;
  VocabLabel vocab_label_;
  std::vector<std::string> tokens_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Extends a table over the pretrained vocabulary to the adapted one.
/// Pretrained tokens keep their vectors bit for bit; each added token gets
/// the mean of the pretrained-piece vectors of its unprefixed form
/// (tokenized in continuation position when the token carries the prefix).
EmbeddingTable init_added_embeddings(const EmbeddingTable& base, const Vocabulary& adapted,
                                     const Vocabulary& pretrained);

/// Text format: header `count dim`, then `token v1 .. vdim` per line.
/// Values round-trip exactly (shortest representation that re-parses to
/// the same double).
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               VocabLabel vocab_label = VocabLabel::Pretrained);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace vocadapt
