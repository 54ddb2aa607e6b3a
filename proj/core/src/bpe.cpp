#include "vocadapt/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_set>

#include "vocadapt/errors.hpp"
#include "vocadapt/text.hpp"

namespace vocadapt {
namespace {

constexpr std::string_view kPrefix = "##";

// Interned positional symbol. Ties between equally frequent pairs compare
// symbols by (unprefixed text, word-initial-before-continuation).
struct Symbol {
  std::string textual;   // as stored in the vocabulary, prefix included
  std::string stripped;  // prefix removed
  bool continuation = false;
};

class SymbolTable {
 public:
  std::uint32_t intern(std::string textual) {
    const auto it = ids_.find(textual);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(symbols_.size());
    Symbol sym;
    sym.continuation = textual.rfind(kPrefix, 0) == 0 && textual.size() > kPrefix.size();
    sym.stripped = sym.continuation ? textual.substr(kPrefix.size()) : textual;
    sym.textual = std::move(textual);
    ids_.emplace(sym.textual, id);
    symbols_.push_back(std::move(sym));
    return id;
  }

  const Symbol& operator[](std::uint32_t id) const { return symbols_[id]; }

  // left + right with the right-hand prefix dropped; keeps left's position.
  std::uint32_t merge(std::uint32_t left, std::uint32_t right) {
    return intern(symbols_[left].textual + symbols_[right].stripped);
  }

  bool less(std::uint32_t a, std::uint32_t b) const {
    const Symbol& sa = symbols_[a];
    const Symbol& sb = symbols_[b];
    if (sa.stripped != sb.stripped) return sa.stripped < sb.stripped;
    return sa.continuation < sb.continuation;
  }

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

using PairKey = std::uint64_t;

PairKey pair_key(std::uint32_t left, std::uint32_t right) {
  return (static_cast<PairKey>(left) << 32) | right;
}

std::uint32_t pair_left(PairKey key) { return static_cast<std::uint32_t>(key >> 32); }
std::uint32_t pair_right(PairKey key) { return static_cast<std::uint32_t>(key & 0xFFFFFFFFu); }

struct HeapItem {
  std::uint64_t count;
  PairKey pair;
};

// Max-heap on count; on ties the lexicographically smallest pair wins.
struct HeapCompare {
  const SymbolTable* symbols;

  bool pair_less(PairKey a, PairKey b) const {
    const std::uint32_t al = pair_left(a), ar = pair_right(a);
    const std::uint32_t bl = pair_left(b), br = pair_right(b);
    if (al != bl) return symbols->less(al, bl);
    return symbols->less(ar, br);
  }

  bool operator()(const HeapItem& a, const HeapItem& b) const {
    if (a.count != b.count) return a.count < b.count;
    if (a.pair == b.pair) return false;
    return pair_less(b.pair, a.pair);
  }
};

std::vector<std::uint32_t> word_symbols(SymbolTable& table, std::string_view word) {
  std::vector<std::uint32_t> out;
  const auto cps = text::decode_utf8(word);
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::string sym;
    if (i > 0) sym = kPrefix;
    text::append_utf8(sym, cps[i].value);
    out.push_back(table.intern(std::move(sym)));
  }
  return out;
}

// Replaces (left,right) occurrences left to right; overlapping occurrences
// collapse the way the pair counting expects.
std::vector<std::uint32_t> replace_pair(const std::vector<std::uint32_t>& seq, std::uint32_t left,
                                        std::uint32_t right, std::uint32_t merged) {
  std::vector<std::uint32_t> out;
  out.reserve(seq.size());
  std::size_t i = 0;
  while (i < seq.size()) {
    if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
      out.push_back(merged);
      i += 2;
    } else {
      out.push_back(seq[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

MergeList::MergeList(std::vector<std::pair<std::string, std::string>> merges)
    : merges_(std::move(merges)) {
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& [left, right] = merges_[rank];
    if (left.empty() || right.empty()) {
      throw Error(ErrorCode::EmptyToken, "merge pair at rank " + std::to_string(rank));
    }
    if (!rank_of_.emplace(left + " " + right, rank).second) {
      throw Error(ErrorCode::DuplicateToken,
                  "merge pair \"" + left + " " + right + "\" repeated");
    }
  }
}

std::optional<std::size_t> MergeList::rank_of(std::string_view left, std::string_view right) const {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left).push_back(' ');
  key.append(right);
  const auto it = rank_of_.find(key);
  if (it == rank_of_.end()) return std::nullopt;
  return it->second;
}

std::pair<DomainVocab, MergeList> train_bpe(const PreTokenizedCorpus& corpus,
                                            const BpeOptions& opts, BpeTrainDebug* debug) {
  if (corpus.total_words == 0 || corpus.word_freq.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has zero words");
  }
  const std::uint64_t min_pair_freq = std::max<std::uint64_t>(1, opts.min_pair_freq);

  SymbolTable symbols;
  std::vector<std::vector<std::uint32_t>> words;
  std::vector<std::uint64_t> freqs;
  words.reserve(corpus.word_freq.size());
  freqs.reserve(corpus.word_freq.size());
  std::unordered_set<std::uint32_t> alphabet_ids;
  for (const auto& [word, freq] : corpus.word_freq) {
    std::vector<std::uint32_t> seq = word_symbols(symbols, word);
    for (const std::uint32_t id : seq) alphabet_ids.insert(id);
    words.push_back(std::move(seq));
    freqs.push_back(freq);
  }

  std::vector<std::uint32_t> alphabet(alphabet_ids.begin(), alphabet_ids.end());
  std::sort(alphabet.begin(), alphabet.end(),
            [&symbols](std::uint32_t a, std::uint32_t b) { return symbols.less(a, b); });

  if (opts.target_size <= alphabet.size()) {
    throw Error(ErrorCode::TargetTooSmall,
                "target size " + std::to_string(opts.target_size) + " <= alphabet size " +
                    std::to_string(alphabet.size()));
  }

  // Pair counts plus an inverted index so each merge touches only the words
  // that contain the pair.
  std::unordered_map<PairKey, std::uint64_t> counts;
  std::unordered_map<PairKey, std::unordered_set<std::uint32_t>> where;
  for (std::uint32_t w = 0; w < words.size(); ++w) {
    const auto& seq = words[w];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const PairKey key = pair_key(seq[i], seq[i + 1]);
      counts[key] += freqs[w];
      where[key].insert(w);
    }
  }

  HeapCompare cmp{&symbols};
  std::priority_queue<HeapItem, std::vector<HeapItem>, HeapCompare> heap(cmp);
  for (const auto& [key, count] : counts) {
    if (count >= min_pair_freq) heap.push({count, key});
  }

  std::vector<std::pair<std::string, std::string>> merge_pairs;
  std::vector<std::string> merged_tokens;
  std::unordered_set<std::string> vocab_set;
  vocab_set.insert("[UNK]");
  for (const std::uint32_t id : alphabet) vocab_set.insert(symbols[id].textual);

  const auto current_count_of = [&counts](PairKey key) -> std::uint64_t {
    const auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  };

  while (vocab_set.size() < opts.target_size && !heap.empty()) {
    const HeapItem top = heap.top();
    heap.pop();
    const std::uint64_t current = current_count_of(top.pair);
    if (current < min_pair_freq) continue;
    if (current != top.count) {
      heap.push({current, top.pair});  // stale entry, reinsert at true count
      continue;
    }

    const std::uint32_t left = pair_left(top.pair);
    const std::uint32_t right = pair_right(top.pair);
    const std::uint32_t merged = symbols.merge(left, right);
    merge_pairs.emplace_back(symbols[left].textual, symbols[right].textual);
    if (vocab_set.insert(symbols[merged].textual).second) {
      merged_tokens.push_back(symbols[merged].textual);
    }

    const std::unordered_set<std::uint32_t> affected = std::move(where[top.pair]);
    where.erase(top.pair);
    for (const std::uint32_t w : affected) {
      const std::uint64_t freq = freqs[w];
      std::vector<std::uint32_t>& seq = words[w];
      std::vector<std::uint32_t> next = replace_pair(seq, left, right, merged);
      if (next.size() == seq.size()) continue;

      // Exact count/index maintenance: diff the word's old and new pairs.
      const auto adjust = [&](const std::vector<std::uint32_t>& s, std::int64_t sign) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
          const PairKey key = pair_key(s[i], s[i + 1]);
          if (key == top.pair && sign < 0) continue;  // already dropped wholesale
          auto& count = counts[key];
          count = static_cast<std::uint64_t>(static_cast<std::int64_t>(count) + sign * static_cast<std::int64_t>(freq));
          if (sign > 0) {
            where[key].insert(w);
            if (count >= min_pair_freq) heap.push({count, key});
          }
        }
      };
      adjust(seq, -1);
      adjust(next, +1);
      // Pairs that vanished from this word keep a stale index entry; the
      // rescan below when they are merged tolerates that.
      seq = std::move(next);
    }
    counts.erase(top.pair);
  }

  std::vector<std::string> vocab_tokens;
  vocab_tokens.reserve(1 + alphabet.size() + merged_tokens.size());
  vocab_tokens.emplace_back("[UNK]");
  for (const std::uint32_t id : alphabet) vocab_tokens.push_back(symbols[id].textual);
  for (const std::string& tok : merged_tokens) vocab_tokens.push_back(tok);

  DomainVocab dv;
  dv.vocab = Vocabulary::from_tokens(std::move(vocab_tokens), VocabLabel::Domain);
  dv.alphabet_size = alphabet.size();
  dv.merge_order.reserve(alphabet.size() + merged_tokens.size());
  for (const std::uint32_t id : alphabet) dv.merge_order.push_back(symbols[id].textual);
  for (const std::string& tok : merged_tokens) dv.merge_order.push_back(tok);

  if (debug != nullptr) {
    std::size_t idx = 0;
    for (const auto& [word, freq] : corpus.word_freq) {
      std::vector<std::string> pieces;
      pieces.reserve(words[idx].size());
      for (const std::uint32_t id : words[idx]) pieces.push_back(symbols[id].textual);
      debug->final_segmentation.emplace_back(word, std::move(pieces));
      ++idx;
    }
  }

  return {std::move(dv), MergeList(std::move(merge_pairs))};
}

std::vector<std::string> ordered_subset(const DomainVocab& dv, std::size_t k) {
  if (k > dv.merge_order.size()) {
    throw Error(ErrorCode::OutOfRange, "k=" + std::to_string(k) + " exceeds merge order size " +
                                           std::to_string(dv.merge_order.size()));
  }
  const std::size_t take = std::min(k, dv.merged_count());
  const auto begin = dv.merge_order.begin() + static_cast<std::ptrdiff_t>(dv.alphabet_size);
  return {begin, begin + static_cast<std::ptrdiff_t>(take)};
}

std::vector<std::string> apply_merges(const MergeList& merges, std::string_view word,
                                      const std::string& continuation_prefix) {
  std::vector<std::string> seq;
  const auto cps = text::decode_utf8(word);
  seq.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::string sym;
    if (i > 0) sym = continuation_prefix;
    text::append_utf8(sym, cps[i].value);
    seq.push_back(std::move(sym));
  }

  while (seq.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto rank = merges.rank_of(seq[i], seq[i + 1]);
      if (rank.has_value() && *rank < best_rank) best_rank = *rank;
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;

    const auto& [left, right] = merges.merges()[best_rank];
    std::vector<std::string> next;
    next.reserve(seq.size());
    std::size_t i = 0;
    while (i < seq.size()) {
      if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
        std::string joined = left;
        joined += right.rfind(continuation_prefix, 0) == 0 && right.size() > continuation_prefix.size()
                      ? right.substr(continuation_prefix.size())
                      : right;
        next.push_back(std::move(joined));
        i += 2;
      } else {
        next.push_back(seq[i]);
        ++i;
      }
    }
    seq = std::move(next);
  }
  return seq;
}

void save_merges(const MergeList& merges, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  for (const auto& [left, right] : merges.merges()) {
    out << left << ' ' << right << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failure on " + path.string());
  }
}

DomainVocab domain_vocab_from_files(const std::filesystem::path& vocab_path,
                                    const std::filesystem::path& merges_path) {
  DomainVocab dv;
  dv.vocab = load_vocab(vocab_path, VocabLabel::Domain);
  const MergeList merges = load_merges(merges_path);

  std::vector<std::string> merged_tokens;
  std::unordered_set<std::string> seen;
  for (const auto& [left, right] : merges.merges()) {
    const bool cont = right.rfind(kPrefix, 0) == 0 && right.size() > kPrefix.size();
    std::string token = left + (cont ? right.substr(kPrefix.size()) : right);
    if (seen.insert(token).second) merged_tokens.push_back(std::move(token));
  }

  const std::vector<std::string>& tokens = dv.vocab.tokens();
  if (tokens.empty() || tokens.front() != dv.vocab.unk_token()) {
    throw Error(ErrorCode::FormatError,
                "domain vocab file " + vocab_path.string() + " must start with the unk token");
  }
  if (tokens.size() < 1 + merged_tokens.size()) {
    throw Error(ErrorCode::FormatError,
                "vocab file " + vocab_path.string() + " is smaller than its merges imply");
  }
  const std::size_t tail_start = tokens.size() - merged_tokens.size();
  for (std::size_t i = 0; i < merged_tokens.size(); ++i) {
    if (tokens[tail_start + i] != merged_tokens[i]) {
      throw Error(ErrorCode::FormatError,
                  "vocab file " + vocab_path.string() + " does not end with the merge-rank " +
                      "tokens of " + merges_path.string() + " (mismatch at \"" +
                      merged_tokens[i] + "\")");
    }
  }

  dv.merge_order.assign(tokens.begin() + 1, tokens.end());  // drop the unk slot
  dv.alphabet_size = tokens.size() - 1 - merged_tokens.size();
  return dv;
}

MergeList load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) {
      throw Error(ErrorCode::EncodingError, "invalid UTF-8 in " + path.string());
    }
    const std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 >= line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(line_no) + ": expected `left right`");
    }
    pairs.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  if (in.bad()) {
    throw Error(ErrorCode::IoError, "read failure on " + path.string());
  }
  return MergeList(std::move(pairs));
}

}  // namespace vocadapt
