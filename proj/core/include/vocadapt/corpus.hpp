#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vocadapt {

/// Downstream text as loaded, one document per line or JSONL record.
struct RawCorpus {
  std::vector<std::string> documents;
  std::string source;
};

enum class CorpusFormat { PlainLines, JsonlField };

/// Loads a corpus file. For JsonlField, `field` names the string field to
/// project out of each record. Documents keep file order.
RawCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                      const std::string& field = "text");

struct PreTokenizeOptions {
  bool lowercase = true;        // base vocabularies here are uncased
  bool split_punct = true;      // each punctuation codepoint becomes its own word
  bool drop_punct_words = false;  // opt-out: exclude punctuation words from counts
};

/// Corpus split into words. Immutable after construction; word_freq is
/// ordered so serialization is deterministic.
struct PreTokenizedCorpus {
  std::vector<std::vector<std::string>> sentences;
  std::uint64_t total_words = 0;
  std::map<std::string, std::uint64_t> word_freq;
};

/// Splits documents on Unicode whitespace, optionally isolating punctuation
/// codepoints and lowercasing. Throws EmptyCorpus when nothing survives.
PreTokenizedCorpus pre_tokenize(const RawCorpus& raw, const PreTokenizeOptions& opts = {});

const std::map<std::string, std::uint64_t>& word_frequencies(const PreTokenizedCorpus& corpus);

/// Debug dump: `word<TAB>count` lines in lexicographic (byte) order.
void dump_word_frequencies_tsv(const PreTokenizedCorpus& corpus, std::ostream& out);

}  // namespace vocadapt
