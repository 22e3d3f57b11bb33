#pragma once
// String utilities shared by matching, tokenization and embeddings.
//
// Normalization key: trimmed, ASCII-lowercased, internal whitespace runs
// collapsed to one space. Bytes >= 0x80 pass through unchanged (inputs are
// assumed to arrive NFC-composed; we do not re-compose).

#include <string>
#include <string_view>
#include <vector>

namespace kbfresh {

std::string trim(std::string_view s);
std::string lowercase_ascii(std::string_view s);

// Lookup key for entity names and predicates.
std::string normalize_name(std::string_view s);

// Code-point count of a UTF-8 string (continuation bytes excluded).
std::size_t utf8_length(std::string_view s);

// Whitespace split, punctuation stripped from token edges, lowercased.
std::vector<std::string> tokenize(std::string_view text);

// Levenshtein distance, unit-cost insert/delete/substitute, on bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace kbfresh
