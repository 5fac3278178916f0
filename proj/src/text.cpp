#include "cuediary/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <vector>

namespace cuediary::text {

namespace {

// Length of the UTF-8 sequence starting at `lead`, or 0 if `lead` cannot
// start a sequence.
std::size_t sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if (lead >= 0xC2 && lead <= 0xDF) return 2;
    if (lead >= 0xE0 && lead <= 0xEF) return 3;
    if (lead >= 0xF0 && lead <= 0xF4) return 4;
    return 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::optional<std::size_t> scalar_count(std::string_view utf8) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < utf8.size()) {
        const auto lead = static_cast<unsigned char>(utf8[i]);
        const std::size_t len = sequence_length(lead);
        if (len == 0 || i + len > utf8.size()) return std::nullopt;
        std::uint32_t cp = len == 1 ? lead : lead & (0x7F >> len);
        for (std::size_t k = 1; k < len; ++k) {
            const auto cont = static_cast<unsigned char>(utf8[i + k]);
            if ((cont & 0xC0) != 0x80) return std::nullopt;
            cp = (cp << 6) | (cont & 0x3F);
        }
        // overlong, surrogate and out-of-range forms
        if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
            return std::nullopt;
        }
        i += len;
        ++count;
    }
    return count;
}

std::size_t scalar_prefix_bytes(std::string_view utf8, std::size_t n) {
    std::size_t i = 0;
    for (std::size_t taken = 0; taken < n && i < utf8.size(); ++taken) {
        const std::size_t len = sequence_length(static_cast<unsigned char>(utf8[i]));
        i += len == 0 ? 1 : len;
    }
    return std::min(i, utf8.size());
}

std::string truncate_at_word_boundary(std::string_view s, std::size_t limit) {
    const std::size_t cut = scalar_prefix_bytes(s, limit);
    if (cut >= s.size()) return trim(s);

    std::string_view head = s.substr(0, cut);
    if (!is_space(s[cut])) {
        // Back off to the last whitespace so no word is split.
        std::size_t pos = head.size();
        while (pos > 0 && !is_space(head[pos - 1])) --pos;
        if (pos > 0) head = head.substr(0, pos);
    }
    while (!head.empty() && is_space(head.back())) head.remove_suffix(1);
    return std::string(head);
}

std::string trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return std::string(s);
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

}  // namespace cuediary::text
