#include "rageval/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace rageval::text {

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(char c) noexcept {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_terminator(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

// Length of a closing quote/bracket starting at s[i], 0 if none.
std::size_t closer_length(std::string_view s, std::size_t i) noexcept {
    const char c = s[i];
    if (c == '"' || c == '\'' || c == ')' || c == ']') {
        return 1;
    }
    const auto rest = s.substr(i);
    // U+201D, U+2019, U+00BB
    for (std::string_view seq : {"\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"}) {
        if (rest.starts_with(seq)) {
            return seq.size();
        }
    }
    return 0;
}

}  // namespace

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

std::size_t find_ci(std::string_view haystack, std::string_view needle, std::size_t from) noexcept {
    if (needle.empty()) {
        return from <= haystack.size() ? from : std::string_view::npos;
    }
    if (haystack.size() < needle.size()) {
        return std::string_view::npos;
    }
    for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        std::size_t k = 0;
        while (k < needle.size() && lower(haystack[i + k]) == lower(needle[k])) {
            ++k;
        }
        if (k == needle.size()) {
            return i;
        }
    }
    return std::string_view::npos;
}

std::size_t rfind_ci(std::string_view haystack, std::string_view needle) noexcept {
    std::size_t last = std::string_view::npos;
    for (std::size_t pos = find_ci(haystack, needle); pos != std::string_view::npos;
         pos = find_ci(haystack, needle, pos + 1)) {
        last = pos;
    }
    return last;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() && find_ci(a, b) == 0;
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto nl = s.find('\n', start);
        auto line = s.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto emit = [&](std::size_t from, std::size_t to) {
        const auto seg = trim(text.substr(from, to - from));
        if (!seg.empty()) {
            out.emplace_back(seg);
        }
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        std::size_t end = i + 1;
        while (end < text.size()) {
            const auto len = closer_length(text, end);
            if (len == 0) {
                break;
            }
            end += len;
        }
        std::size_t next = end;
        while (next < text.size() && is_space(text[next])) {
            ++next;
        }
        const bool at_end = next == text.size();
        const bool before_upper = next > end && !at_end &&
                                  std::isupper(static_cast<unsigned char>(text[next])) != 0;
        if (at_end || before_upper) {
            emit(start, end);
            start = next;
            i = next;
        } else {
            i = end;
        }
    }
    if (start < text.size()) {
        emit(start, text.size());
    }
    return out;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const auto open = tmpl.find('{', i);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        out.append(tmpl.substr(i, open - i));
        const auto close = tmpl.find('}', open + 1);
        if (close != std::string_view::npos) {
            const auto name = tmpl.substr(open + 1, close - open - 1);
            if (const auto it = slots.find(name); it != slots.end()) {
                out.append(it->second);
                i = close + 1;
                continue;
            }
        }
        out.push_back('{');
        i = open + 1;
    }
    return out;
}

std::string format_score(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string out(buf, ptr);
    if (std::isfinite(value) && out.find_first_of(".e") == std::string::npos) {
        out += ".0";
    }
    return out;
}

std::string python_repr(std::string_view s) {
    const bool has_single = s.find('\'') != std::string_view::npos;
    const bool has_double = s.find('"') != std::string_view::npos;
    const char quote = (has_single && !has_double) ? '"' : '\'';

    std::string out;
    out.reserve(s.size() + 2);
    out.push_back(quote);
    for (const char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (c == '\\') {
            out += "\\\\";
        } else if (c == quote) {
            out.push_back('\\');
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c == '\t') {
            out += "\\t";
        } else if (u < 0x20 || u == 0x7f) {
            char esc[5];
            std::snprintf(esc, sizeof esc, "\\x%02x", u);
            out += esc;
        } else {
            out.push_back(c);
        }
    }
    out.push_back(quote);
    return out;
}

std::string python_list_repr(std::span<const std::string> items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += python_repr(items[i]);
    }
    out += "]";
    return out;
}

std::string numbered_list(std::span<const std::string> items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out.push_back('\n');
        }
        out += std::to_string(i + 1);
        out += ". ";
        out += items[i];
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::optional<double> parse_double(std::string_view s) noexcept {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> parse_int(std::string_view s) noexcept {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace rageval::text
