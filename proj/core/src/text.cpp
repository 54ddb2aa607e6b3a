#include "vocadapt/text.hpp"

#include "vocadapt/errors.hpp"

namespace vocadapt::text {
namespace {

// Returns the decoded codepoint and sequence length, or -1 on malformed
// input. Rejects overlong forms, surrogates, and values above U+10FFFF.
int decode_one(std::string_view bytes, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(bytes[pos]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  int len = 0;
  char32_t value = 0;
  char32_t min_value = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    value = b0 & 0x1F;
    min_value = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    value = b0 & 0x0F;
    min_value = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    value = b0 & 0x07;
    min_value = 0x10000;
  } else {
    return -1;
  }
  if (pos + len > bytes.size()) return -1;
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(bytes[pos + i]);
    if ((b & 0xC0) != 0x80) return -1;
    value = (value << 6) | (b & 0x3F);
  }
  if (value < min_value) return -1;
  if (value >= 0xD800 && value <= 0xDFFF) return -1;
  if (value > 0x10FFFF) return -1;
  cp = value;
  return len;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
  std::size_t pos = 0;
  char32_t cp = 0;
  while (pos < bytes.size()) {
    const int len = decode_one(bytes, pos, cp);
    if (len < 0) return false;
    pos += static_cast<std::size_t>(len);
  }
  return true;
}

std::vector<Codepoint> decode_utf8(std::string_view bytes) {
  std::vector<Codepoint> out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  char32_t cp = 0;
  while (pos < bytes.size()) {
    const int len = decode_one(bytes, pos, cp);
    if (len < 0) {
      throw Error(ErrorCode::EncodingError,
                  "invalid UTF-8 sequence at byte offset " + std::to_string(pos));
    }
    out.push_back({cp, pos});
    pos += static_cast<std::size_t>(len);
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::size_t codepoint_count(std::string_view bytes) {
  std::size_t count = 0;
  for (const char c : bytes) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punctuation(char32_t cp) {
  // ASCII ranges as in BERT basic tokenization.
  if ((cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) || (cp >= 91 && cp <= 96) ||
      (cp >= 123 && cp <= 126)) {
    return true;
  }
  if (cp >= 0x2010 && cp <= 0x2027) return true;   // dashes, quotes, daggers
  if (cp >= 0x2030 && cp <= 0x205E) return true;   // permille .. punctuation marks
  if (cp >= 0x3001 && cp <= 0x3011) return true;   // CJK ideographic punctuation
  if (cp == 0xAB || cp == 0xBB || cp == 0xA1 || cp == 0xBF) return true;
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;  // Greek
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;                 // Cyrillic
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

bool is_uppercase(char32_t cp) { return to_lower(cp) != cp; }

std::string lowercase_utf8(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (const Codepoint& c : decode_utf8(word)) {
    append_utf8(out, to_lower(c.value));
  }
  return out;
}

}  // namespace vocadapt::text
