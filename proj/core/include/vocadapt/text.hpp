#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vocadapt::text {

/// Decoded codepoint plus the byte offset where it starts. Offsets let the
/// tokenizer slice UTF-8 substrings without re-decoding.
struct Codepoint {
  char32_t value;
  std::size_t byte_offset;
};

bool is_valid_utf8(std::string_view bytes);

/// Decodes UTF-8, throwing EncodingError on malformed sequences, overlong
/// encodings, surrogates, or codepoints beyond U+10FFFF.
std::vector<Codepoint> decode_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view bytes);

/// Unicode whitespace (the fixed White_Space list; no tailoring).
bool is_whitespace(char32_t cp);

/// Punctuation in the sense of BERT basic tokenization: the four ASCII
/// punctuation ranges plus the General/Supplemental Punctuation and CJK
/// symbol blocks.
bool is_punctuation(char32_t cp);

/// Simple lowercase mapping covering ASCII, Latin-1, Latin Extended-A,
/// Greek, and Cyrillic. Other scripts pass through unchanged.
char32_t to_lower(char32_t cp);

bool is_uppercase(char32_t cp);

std::string lowercase_utf8(std::string_view word);

}  // namespace vocadapt::text
