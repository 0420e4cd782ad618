#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rageval::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);

/// Case-insensitive (ASCII) search. Returns npos when absent.
std::size_t find_ci(std::string_view haystack, std::string_view needle, std::size_t from = 0) noexcept;
std::size_t rfind_ci(std::string_view haystack, std::string_view needle) noexcept;
bool iequals(std::string_view a, std::string_view b) noexcept;

std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Sentence segmentation used by every metric that counts sentences.
///
/// A segment ends at '.', '!' or '?' when the terminator (optionally followed
/// by closing quotes or brackets) is followed by whitespace and an ASCII
/// uppercase letter, or by the end of the text. Segments are the original
/// spans with surrounding whitespace trimmed; empty segments are never
/// returned.
std::vector<std::string> segment_sentences(std::string_view text);

/// Substitutes `{name}` slots in a single left-to-right pass. Text inserted
/// for a slot is never re-scanned, and braces naming unknown slots are kept.
std::string render(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots);

/// Shortest decimal string that round-trips to `value`; integral values get
/// a trailing ".0" ("1.0", not "1").
std::string format_score(double value);

/// Python-style repr of a string (single quotes unless the text contains a
/// single quote and no double quote).
std::string python_repr(std::string_view s);
std::string python_list_repr(std::span<const std::string> items);

/// Numbered list "1. a\n2. b".
std::string numbered_list(std::span<const std::string> items);

std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Strict number parse of the whole (trimmed) string.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_int(std::string_view s) noexcept;

}  // namespace rageval::text
