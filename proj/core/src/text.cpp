#include "kbfresh/text.hpp"

#include <algorithm>
#include <cctype>

namespace kbfresh {

namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c) != 0;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    return out;
}

std::string normalize_name(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // suppress leading whitespace
    for (unsigned char c : s) {
        if (is_space(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            std::size_t b = i, e = j;
            while (b < e && is_punct(static_cast<unsigned char>(text[b]))) ++b;
            while (e > b && is_punct(static_cast<unsigned char>(text[e - 1]))) --e;
            if (e > b) tokens.push_back(lowercase_ascii(text.substr(b, e - b)));
        }
        i = j;
    }
    return tokens;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t i = 0; i <= m; ++i) prev[i] = i;
    for (std::size_t j = 1; j <= n; ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= m; ++i) {
            std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace kbfresh
