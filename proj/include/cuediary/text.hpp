#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace cuediary::text {

/// Number of Unicode scalar values in a UTF-8 string, or nullopt if the
/// bytes are not well-formed UTF-8.
std::optional<std::size_t> scalar_count(std::string_view utf8);

/// Byte offset just past the first `n` scalar values (or size() if shorter).
/// Assumes well-formed UTF-8.
std::size_t scalar_prefix_bytes(std::string_view utf8, std::size_t n);

/// Cuts `s` to at most `limit` scalar values, preferring the last whitespace
/// boundary inside the limit. Trailing whitespace is removed. A single word
/// longer than the limit is hard-cut.
std::string truncate_at_word_boundary(std::string_view s, std::size_t limit);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Classic Levenshtein distance over bytes (vocabulary words are ASCII).
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace cuediary::text
