#include "vocadapt/tokenizer.hpp"

#include <fstream>
#include <unordered_set>

#include "vocadapt/errors.hpp"
#include "vocadapt/parallel.hpp"
#include "vocadapt/text.hpp"

namespace vocadapt {

std::string_view to_string(VocabLabel label) {
  switch (label) {
    case VocabLabel::Pretrained: return "pretrained";
    case VocabLabel::Domain: return "domain";
    case VocabLabel::Adapted: return "adapted";
  }
  return "unknown";
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, VocabLabel label,
                                   std::string continuation_prefix, std::string unk_token) {
  Vocabulary v;
  v.label_ = label;
  v.continuation_prefix_ = std::move(continuation_prefix);
  v.unk_token_ = std::move(unk_token);
  v.tokens_ = std::move(tokens);
  v.id_of_.reserve(v.tokens_.size());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    const std::string& tok = v.tokens_[i];
    if (tok.empty()) {
      throw Error(ErrorCode::EmptyToken, "token at id " + std::to_string(i) + " is empty");
    }
    for (const text::Codepoint& c : text::decode_utf8(tok)) {
      if (text::is_whitespace(c.value)) {
        throw Error(ErrorCode::InvalidArgument, "token \"" + tok + "\" contains whitespace");
      }
    }
    if (!v.id_of_.emplace(tok, static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::DuplicateToken, "token \"" + tok + "\" appears more than once");
    }
    v.max_token_codepoints_ = std::max(v.max_token_codepoints_, text::codepoint_count(tok));
  }
  if (!v.id_of_.contains(v.unk_token_)) {
    throw Error(ErrorCode::InvalidArgument,
                "vocabulary does not contain the unk token \"" + v.unk_token_ + "\"");
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id_of(std::string_view token) const {
  const auto it = id_of_.find(token);
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::relabeled(VocabLabel label) const {
  Vocabulary copy = *this;
  copy.label_ = label;
  return copy;
}

Vocabulary load_vocab(const std::filesystem::path& path, VocabLabel label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::is_valid_utf8(line)) {
      throw Error(ErrorCode::EncodingError, "invalid UTF-8 in " + path.string());
    }
    tokens.push_back(line);
  }
  if (in.bad()) {
    throw Error(ErrorCode::IoError, "read failure on " + path.string());
  }
  return Vocabulary::from_tokens(std::move(tokens), label);
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  for (const std::string& tok : vocab.tokens()) {
    out << tok << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failure on " + path.string());
  }
}

WordTokenization tokenize_word(const Vocabulary& vocab, std::string_view word,
                               MatchPosition start) {
  WordTokenization result;
  result.word.assign(word);

  const std::vector<text::Codepoint> cps = text::decode_utf8(word);
  if (cps.empty() || cps.size() > kMaxWordCodepoints) {
    result.pieces = {vocab.unk_token()};
    result.is_unk = true;
    return result;
  }

  const std::string& prefix = vocab.continuation_prefix();
  const std::size_t prefix_cps = text::codepoint_count(prefix);
  const std::size_t max_cps = vocab.max_token_codepoints();
  std::string candidate;
  std::size_t cursor = 0;
  bool continuation = (start == MatchPosition::Continuation);
  while (cursor < cps.size()) {
    // Longest match first. Cap the window by the longest vocab token so a
    // long word does not probe hopeless substrings.
    const std::size_t window =
        continuation ? (max_cps > prefix_cps ? max_cps - prefix_cps : 0) : max_cps;
    const std::size_t end_cap = std::min(cps.size(), cursor + window);
    std::size_t end = end_cap;
    bool matched = false;
    for (; end > cursor; --end) {
      const std::size_t from = cps[cursor].byte_offset;
      const std::size_t to = end < cps.size() ? cps[end].byte_offset : word.size();
      candidate.clear();
      if (continuation) candidate = prefix;
      candidate.append(word.substr(from, to - from));
      if (vocab.contains(candidate)) {
        result.pieces.push_back(candidate);
        cursor = end;
        matched = true;
        break;
      }
    }
    if (!matched) {
      result.pieces = {vocab.unk_token()};
      result.is_unk = true;
      return result;
    }
    continuation = true;
  }
  return result;
}

TokenizationStats tokenize_corpus(const Vocabulary& vocab, const PreTokenizedCorpus& corpus) {
  if (corpus.total_words == 0 || corpus.word_freq.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has zero words");
  }

  std::vector<const std::pair<const std::string, std::uint64_t>*> entries;
  entries.reserve(corpus.word_freq.size());
  for (const auto& entry : corpus.word_freq) {
    entries.push_back(&entry);
  }

  const std::size_t chunk_count = parallel_chunk_count(entries.size());
  std::vector<TokenizationStats> partial(chunk_count);
  parallel_chunks(entries.size(), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    TokenizationStats& s = partial[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [word, freq] = *entries[i];
      const auto pieces = static_cast<std::uint32_t>(tokenize_word(vocab, word).pieces.size());
      s.total_subwords += static_cast<std::uint64_t>(pieces) * freq;
      s.per_word_hist[pieces] += freq;
    }
  });

  TokenizationStats stats;
  stats.total_words = corpus.total_words;
  for (const TokenizationStats& s : partial) {
    stats.total_subwords += s.total_subwords;
    for (const auto& [pieces, count] : s.per_word_hist) {
      stats.per_word_hist[pieces] += count;
    }
  }
  return stats;
}

Vocabulary merge_vocabs(const Vocabulary& pretrained, const std::vector<std::string>& additions) {
  std::vector<std::string> tokens = pretrained.tokens();
  tokens.reserve(tokens.size() + additions.size());
  std::unordered_set<std::string> appended;
  for (const std::string& tok : additions) {
    if (!pretrained.contains(tok) && appended.insert(tok).second) {
      tokens.push_back(tok);
    }
  }
  return Vocabulary::from_tokens(std::move(tokens), VocabLabel::Adapted,
                                 pretrained.continuation_prefix(), pretrained.unk_token());
}

}  // namespace vocadapt
