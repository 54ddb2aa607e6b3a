#include "vocadapt/corpus.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

#include "support/test_util.hpp"
#include "vocadapt/errors.hpp"
#include "vocadapt/text.hpp"

using namespace vocadapt;

namespace {

RawCorpus raw(std::vector<std::string> docs) {
  return RawCorpus{std::move(docs), "inline"};
}

}  // namespace

TEST_CASE("load_corpus reads plain lines verbatim") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.file("c.txt"), "a b\nc\n");
  const RawCorpus corpus = load_corpus(tmp.file("c.txt"), CorpusFormat::PlainLines);
  CHECK(corpus.documents == std::vector<std::string>{"a b", "c"});
}

TEST_CASE("load_corpus on an empty file yields no documents") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.file("empty.txt"), "");
  const RawCorpus corpus = load_corpus(tmp.file("empty.txt"), CorpusFormat::PlainLines);
  CHECK(corpus.documents.empty());
  CHECK_THROWS_AS(pre_tokenize(corpus), Error);
}

TEST_CASE("load_corpus projects a jsonl field") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.file("c.jsonl"), R"({"text":"hi","y":1})"
                                            "\n");
  const RawCorpus corpus = load_corpus(tmp.file("c.jsonl"), CorpusFormat::JsonlField, "text");
  CHECK(corpus.documents == std::vector<std::string>{"hi"});
}

TEST_CASE("load_corpus jsonl error paths") {
  testutil::TempDir tmp("corpus");

  testutil::write_file(tmp.file("bad.jsonl"), "{not json}\n");
  CHECK_THROWS_WITH_AS(load_corpus(tmp.file("bad.jsonl"), CorpusFormat::JsonlField, "text"),
                       doctest::Contains("malformed"), Error);

  testutil::write_file(tmp.file("missing.jsonl"), R"({"other":"hi"})"
                                                  "\n");
  try {
    load_corpus(tmp.file("missing.jsonl"), CorpusFormat::JsonlField, "text");
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }

  CHECK_THROWS_AS(load_corpus(tmp.file("nonexistent.jsonl"), CorpusFormat::JsonlField, "text"),
                  Error);
}

TEST_CASE("load_corpus rejects invalid UTF-8") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.file("bad.txt"), std::string("ok\n\xFF\xFE broken\n"));
  try {
    load_corpus(tmp.file("bad.txt"), CorpusFormat::PlainLines);
    FAIL("expected EncodingError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EncodingError);
  }
}

TEST_CASE("pre_tokenize splits whitespace, punctuation, and case") {
  const PreTokenizedCorpus corpus = pre_tokenize(raw({"The bluetooth, works!"}));
  CHECK(corpus.sentences.size() == 1);
  CHECK(corpus.sentences[0] ==
        std::vector<std::string>{"the", "bluetooth", ",", "works", "!"});
  CHECK(corpus.total_words == 5);
}

TEST_CASE("pre_tokenize single word with defaults") {
  const PreTokenizedCorpus corpus = pre_tokenize(raw({"abc"}));
  CHECK(corpus.sentences[0] == std::vector<std::string>{"abc"});
  CHECK(corpus.total_words == 1);
}

TEST_CASE("pre_tokenize whitespace-only input is an empty corpus") {
  try {
    pre_tokenize(raw({"  \n ", "\t"}));
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCorpus);
  }
}

TEST_CASE("pre_tokenize options") {
  PreTokenizeOptions opts;

  SUBCASE("no lowercase keeps case") {
    opts.lowercase = false;
    const auto corpus = pre_tokenize(raw({"The X"}), opts);
    CHECK(corpus.sentences[0] == std::vector<std::string>{"The", "X"});
  }
  SUBCASE("no punctuation split keeps words glued") {
    opts.split_punct = false;
    const auto corpus = pre_tokenize(raw({"works!"}), opts);
    CHECK(corpus.sentences[0] == std::vector<std::string>{"works!"});
  }
  SUBCASE("drop_punct_words removes isolated punctuation") {
    opts.drop_punct_words = true;
    const auto corpus = pre_tokenize(raw({"a , b !"}), opts);
    CHECK(corpus.sentences[0] == std::vector<std::string>{"a", "b"});
    CHECK(corpus.total_words == 2);
  }
  SUBCASE("drop_punct_words without split drops all-punct words only") {
    opts.split_punct = false;
    opts.drop_punct_words = true;
    const auto corpus = pre_tokenize(raw({"a!b ?!"}), opts);
    CHECK(corpus.sentences[0] == std::vector<std::string>{"a!b"});
  }
}

TEST_CASE("pre_tokenize handles multi-byte codepoints") {
  const auto corpus = pre_tokenize(raw({"Caf\xC3\x89 na\xC3\xAFve\xE2\x80\x94ok"}));
  // U+00C9 lowercases to U+00E9; U+2014 (em dash) splits as punctuation.
  CHECK(corpus.sentences[0] ==
        std::vector<std::string>{"caf\xC3\xA9", "na\xC3\xAFve", "\xE2\x80\x94", "ok"});
}

TEST_CASE("word counts are consistent and ordered") {
  const auto corpus = pre_tokenize(raw({"a b a", "x x x"}));
  const auto& freq = word_frequencies(corpus);
  CHECK(freq.at("a") == 2);
  CHECK(freq.at("b") == 1);
  CHECK(freq.at("x") == 3);

  std::uint64_t sum = 0;
  for (const auto& [word, count] : freq) sum += count;
  CHECK(sum == corpus.total_words);

  std::ostringstream tsv;
  dump_word_frequencies_tsv(corpus, tsv);
  CHECK(tsv.str() == "a\t2\nb\t1\nx\t3\n");
}

TEST_CASE("pre_tokenize properties on random ascii corpora") {
  std::mt19937 rng(20260810);
  for (int round = 0; round < 25; ++round) {
    std::vector<std::string> docs;
    const int lines = 1 + static_cast<int>(rng() % 4);
    for (int l = 0; l < lines; ++l) {
      std::string doc;
      const int words = static_cast<int>(rng() % 8);
      for (int w = 0; w < words; ++w) {
        doc += testutil::random_word(rng, "aAbBc.,!", 1, 6);
        doc += (rng() % 2 == 0) ? " " : "\t";
      }
      docs.push_back(doc);
    }

    PreTokenizedCorpus first;
    try {
      first = pre_tokenize(raw(docs));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCorpus);
      continue;
    }

    std::uint64_t sum = 0;
    for (const auto& [word, count] : first.word_freq) sum += count;
    std::uint64_t sentence_words = 0;
    for (const auto& s : first.sentences) sentence_words += s.size();
    CHECK(sum == first.total_words);
    CHECK(sentence_words == first.total_words);

    // Lowercasing leaves no uppercase codepoint behind.
    for (const auto& [word, count] : first.word_freq) {
      for (const auto& cp : text::decode_utf8(word)) {
        CHECK_FALSE(text::is_uppercase(cp.value));
      }
    }

    // Idempotence: re-splitting the space-joined output changes nothing.
    std::vector<std::string> rejoined;
    for (const auto& sentence : first.sentences) {
      std::string line;
      for (const auto& word : sentence) {
        if (!line.empty()) line += ' ';
        line += word;
      }
      rejoined.push_back(line);
    }
    const PreTokenizedCorpus second = pre_tokenize(raw(rejoined));
    CHECK(second.sentences == first.sentences);
    CHECK(second.word_freq == first.word_freq);
    CHECK(second.total_words == first.total_words);
  }
}
