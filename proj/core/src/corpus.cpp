#include "vocadapt/corpus.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "vocadapt/errors.hpp"
#include "vocadapt/text.hpp"

namespace vocadapt {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    }
    lines.push_back(line);
  }
  if (in.bad()) {
    throw Error(ErrorCode::IoError, "read failure on " + path.string());
  }
  return lines;
}

}  // namespace

RawCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                      const std::string& field) {
  RawCorpus corpus;
  corpus.source = path.string();
  const std::vector<std::string> lines = read_lines(path);

  if (format == CorpusFormat::PlainLines) {
    corpus.documents = lines;
  } else {
    if (field.empty()) {
      throw Error(ErrorCode::InvalidArgument, "jsonl-field format requires a field name");
    }
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
      ++line_no;
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.is_object()) {
        throw Error(ErrorCode::FormatError,
                    path.string() + ":" + std::to_string(line_no) + ": malformed JSON record");
      }
      const auto it = record.find(field);
      if (it == record.end() || !it->is_string()) {
        throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) +
                                                ": missing string field \"" + field + "\"");
      }
      corpus.documents.push_back(it->get<std::string>());
    }
  }

  for (const std::string& doc : corpus.documents) {
    if (!text::is_valid_utf8(doc)) {
      throw Error(ErrorCode::EncodingError, "invalid UTF-8 in " + path.string());
    }
  }
  return corpus;
}

PreTokenizedCorpus pre_tokenize(const RawCorpus& raw, const PreTokenizeOptions& opts) {
  if (raw.documents.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has no documents");
  }

  PreTokenizedCorpus out;
  std::string word;
  for (const std::string& doc : raw.documents) {
    std::vector<std::string> words;
    word.clear();
    const auto flush = [&] {
      if (!word.empty()) {
        words.push_back(word);
        word.clear();
      }
    };
    for (const text::Codepoint& c : text::decode_utf8(doc)) {
      const char32_t cp = opts.lowercase ? text::to_lower(c.value) : c.value;
      if (text::is_whitespace(cp)) {
        flush();
      } else if (opts.split_punct && text::is_punctuation(cp)) {
        flush();
        if (!opts.drop_punct_words) {
          std::string punct;
          text::append_utf8(punct, cp);
          words.push_back(std::move(punct));
        }
      } else {
        text::append_utf8(word, cp);
      }
    }
    flush();

    if (opts.drop_punct_words && !opts.split_punct) {
      std::erase_if(words, [](const std::string& w) {
        for (const text::Codepoint& c : text::decode_utf8(w)) {
          if (!text::is_punctuation(c.value)) return false;
        }
        return true;
      });
    }

    if (words.empty()) continue;
    for (const std::string& w : words) {
      ++out.word_freq[w];
    }
    out.total_words += words.size();
    out.sentences.push_back(std::move(words));
  }

  if (out.sentences.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has zero words after splitting");
  }
  return out;
}

const std::map<std::string, std::uint64_t>& word_frequencies(const PreTokenizedCorpus& corpus) {
  if (corpus.total_words == 0) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has zero words");
  }
  return corpus.word_freq;
}

void dump_word_frequencies_tsv(const PreTokenizedCorpus& corpus, std::ostream& out) {
  for (const auto& [word, count] : corpus.word_freq) {
    out << word << '\t' << count << '\n';
  }
}

}  // namespace vocadapt
