#include "vocadapt/embedding.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "vocadapt/errors.hpp"

namespace vocadapt {
namespace {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view field, const std::string& context) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError, context + ": bad number \"" + std::string(field) + "\"");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    if (next > pos) fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

}  // namespace

bool EmbeddingTable::has(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::span<const double> EmbeddingTable::vector_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    throw Error(ErrorCode::MissingBaseVector, "no vector for token \"" + std::string(token) + "\"");
  }
  return vectors_[it->second];
}

void EmbeddingTable::insert(std::string token, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorCode::DimMismatch, "vector for \"" + token + "\" has length " +
                                            std::to_string(vector.size()) + ", table dim is " +
                                            std::to_string(dim_));
  }
  if (token.empty()) {
    throw Error(ErrorCode::EmptyToken, "embedding token is empty");
  }
  const std::size_t slot = tokens_.size();
  if (!index_.emplace(token, slot).second) {
    throw Error(ErrorCode::DuplicateToken, "token \"" + token + "\" already has a vector");
  }
  tokens_.push_back(std::move(token));
  vectors_.push_back(std::move(vector));
}

EmbeddingTable init_added_embeddings(const EmbeddingTable& base, const Vocabulary& adapted,
                                     const Vocabulary& pretrained) {
  for (const std::string& tok : pretrained.tokens()) {
    if (!base.has(tok)) {
      throw Error(ErrorCode::MissingBaseVector,
                  "base table does not cover pretrained token \"" + tok + "\"");
    }
  }

  const std::string& prefix = pretrained.continuation_prefix();
  EmbeddingTable out(base.dim(), VocabLabel::Adapted);
  for (const std::string& tok : adapted.tokens()) {
    if (pretrained.contains(tok)) {
      const auto vec = base.vector_of(tok);
      out.insert(tok, std::vector<double>(vec.begin(), vec.end()));
      continue;
    }
    const bool is_continuation = tok.size() > prefix.size() && tok.rfind(prefix, 0) == 0;
    const std::string_view surface =
        is_continuation ? std::string_view(tok).substr(prefix.size()) : std::string_view(tok);
    const WordTokenization pieces = tokenize_word(
        pretrained, surface,
        is_continuation ? MatchPosition::Continuation : MatchPosition::WordInitial);

    std::vector<double> mean(base.dim(), 0.0);
    for (const std::string& piece : pieces.pieces) {
      const auto vec = base.vector_of(piece);
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += vec[d];
    }
    const auto n = static_cast<double>(pieces.pieces.size());
    for (double& v : mean) v /= n;
    out.insert(tok, std::move(mean));
  }
  return out;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, VocabLabel vocab_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing `count dim` header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() != 2) {
    throw Error(ErrorCode::ParseError, path.string() + ": header must be `count dim`");
  }
  std::size_t count = 0;
  std::size_t dim = 0;
  const auto parse_size = [&](std::string_view field, std::size_t& out_value) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out_value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::ParseError, path.string() + ": bad header field");
    }
  };
  parse_size(header[0], count);
  parse_size(header[1], dim);
  if (dim == 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": dim must be positive");
  }

  EmbeddingTable table(dim, vocab_label);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++rows;
    const std::string context = path.string() + ":" + std::to_string(rows + 1);
    const auto fields = split_fields(line);
    if (fields.size() != dim + 1) {
      throw Error(ErrorCode::DimMismatch,
                  context + ": expected " + std::to_string(dim) + " values, got " +
                      std::to_string(fields.empty() ? 0 : fields.size() - 1));
    }
    std::vector<double> vec(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      vec[d] = parse_double(fields[d + 1], context);
    }
    table.insert(std::string(fields[0]), std::move(vec));
  }
  if (in.bad()) {
    throw Error(ErrorCode::IoError, "read failure on " + path.string());
  }
  if (rows != count) {
    throw Error(ErrorCode::ParseError, path.string() + ": header declares " +
                                           std::to_string(count) + " rows, file has " +
                                           std::to_string(rows));
  }
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << table.size() << ' ' << table.dim() << '\n';
  for (const std::string& token : table.tokens()) {
    out << token;
    for (const double v : table.vector_of(token)) {
      out << ' ' << format_double(v);
    }
    out << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failure on " + path.string());
  }
}

}  // namespace vocadapt
