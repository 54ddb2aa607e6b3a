#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vocadapt/corpus.hpp"
#include "vocadapt/tokenizer.hpp"

namespace testutil {

/// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vocadapt_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline vocadapt::PreTokenizedCorpus corpus_from_words(
    const std::vector<std::vector<std::string>>& sentences) {
  vocadapt::PreTokenizedCorpus corpus;
  corpus.sentences = sentences;
  for (const auto& sentence : sentences) {
    for (const auto& word : sentence) {
      ++corpus.word_freq[word];
      ++corpus.total_words;
    }
  }
  return corpus;
}

inline vocadapt::PreTokenizedCorpus corpus_from_words(const std::vector<std::string>& words) {
  return corpus_from_words(std::vector<std::vector<std::string>>{words});
}

inline std::string random_word(std::mt19937& rng, std::string_view alphabet, std::size_t min_len,
                               std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> chr_dist(0, alphabet.size() - 1);
  std::string word;
  const std::size_t len = len_dist(rng);
  for (std::size_t i = 0; i < len; ++i) word.push_back(alphabet[chr_dist(rng)]);
  return word;
}

/// Random vocabulary over lowercase fragments: always the unk token and
/// all single characters (both positions) plus a handful of longer pieces.
inline vocadapt::Vocabulary random_vocab(std::mt19937& rng, std::string_view alphabet,
                                         std::size_t extra_pieces, bool with_singles = true) {
  std::vector<std::string> tokens{"[UNK]"};
  if (with_singles) {
    for (const char c : alphabet) {
      tokens.push_back(std::string(1, c));
      tokens.push_back("##" + std::string(1, c));
    }
  }
  std::set<std::string> seen(tokens.begin(), tokens.end());
  std::uniform_int_distribution<int> cont(0, 1);
  while (extra_pieces > 0) {
    std::string piece = random_word(rng, alphabet, 2, 4);
    if (cont(rng) == 1) piece = "##" + piece;
    if (seen.insert(piece).second) {
      tokens.push_back(piece);
      --extra_pieces;
    }
  }
  return vocadapt::Vocabulary::from_tokens(std::move(tokens), vocadapt::VocabLabel::Pretrained);
}

}  // namespace testutil
