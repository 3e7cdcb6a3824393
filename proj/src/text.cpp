#include "fqbank/text.hpp"

#include <algorithm>

namespace fqbank {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
    char32_t cp;
    std::size_t length;
};

Decoded decode_at(std::string_view s, std::size_t i) {
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char lead = byte(i);
    if (lead < 0x80) {
        return {lead, 1};
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        return {kReplacement, 1};
    }
    if (i + len > s.size()) {
        return {kReplacement, 1};
    }
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char c = byte(i + k);
        if ((c & 0xC0) != 0x80) {
            return {kReplacement, 1};
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    return {cp, len};
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

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 0x20;
    }
    if (cp < 0xC0) {
        return cp;
    }
    if (cp <= 0xDE) {
        return cp == 0xD7 ? cp : cp + 0x20;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if (cp >= 0x100 && cp <= 0x137) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp >= 0x14A && cp <= 0x177) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (cp >= 0x410 && cp <= 0x42F) {
        return cp + 0x20;
    }
    if (cp >= 0x400 && cp <= 0x40F) {
        return cp + 0x50;
    }
    return cp;
}

char32_t to_upper(char32_t cp) {
    if (cp >= 'a' && cp <= 'z') {
        return cp - 0x20;
    }
    if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) {
        return cp - 0x20;
    }
    return cp;
}

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000 || cp == 0xFEFF;
}

bool is_apostrophe(char32_t cp) {
    return cp == '\'' || cp == 0x2019 || cp == 0x2018 || cp == 0x02BC;
}

bool is_hyphen(char32_t cp) {
    return cp == '-' || cp == 0x2010 || cp == 0x2011;
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    if (cp >= 0x2000 && cp <= 0x2BFF) {
        return false;
    }
    if ((cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE4F) ||
        (cp >= 0xFF00 && cp <= 0xFF0F) || cp == 0xFEFF || cp == kReplacement) {
        return false;
    }
    return true;
}

struct CodePoint {
    char32_t cp;
    std::size_t begin;
    std::size_t end;
};

std::vector<CodePoint> code_points(std::string_view text) {
    std::vector<CodePoint> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto d = decode_at(text, i);
        out.push_back({d.cp, i, i + d.length});
        i += d.length;
    }
    return out;
}

} // namespace

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto d = decode_at(text, i);
        out.push_back(d.cp);
        i += d.length;
    }
    return out;
}

std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        append_utf8(out, cp);
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    const auto cps = code_points(text);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (!is_word_char(cps[i].cp)) {
            ++i;
            continue;
        }
        Token token;
        token.begin = cps[i].begin;
        while (i < cps.size()) {
            const char32_t cp = cps[i].cp;
            if (is_word_char(cp)) {
                append_utf8(token.text, to_lower(cp));
                ++i;
                continue;
            }
            const bool joiner = is_apostrophe(cp) || is_hyphen(cp);
            if (joiner && i + 1 < cps.size() && is_word_char(cps[i + 1].cp)) {
                token.text.push_back(is_apostrophe(cp) ? '\'' : '-');
                ++i;
                continue;
            }
            break;
        }
        token.end = cps[i - 1].end;
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    auto tokens = tokenize(text);
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (auto& t : tokens) {
        words.push_back(std::move(t.text));
    }
    return words;
}

std::string case_fold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto d = decode_at(text, i);
        if (d.cp == kReplacement && d.length == 1) {
            out.push_back(text[i]);
        } else {
            append_utf8(out, to_lower(d.cp));
        }
        i += d.length;
    }
    return out;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const auto& c : code_points(text)) {
        if (is_space(c.cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(text.substr(c.begin, c.end - c.begin));
    }
    return out;
}

std::string fold_key(std::string_view text) {
    return case_fold(normalize_whitespace(text));
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
    const auto tokens = tokenize(text);
    if (tokens.size() <= max_tokens) {
        return std::string(text);
    }
    if (max_tokens == 0) {
        return {};
    }
    return std::string(text.substr(0, tokens[max_tokens - 1].end));
}

std::string match_case(std::string_view replacement, std::string_view original) {
    if (replacement.empty() || original.empty()) {
        return std::string(replacement);
    }
    const auto first = decode_at(original, 0);
    if (to_lower(first.cp) == first.cp) {
        return std::string(replacement);
    }
    const auto head = decode_at(replacement, 0);
    std::string out;
    append_utf8(out, to_upper(head.cp));
    out.append(replacement.substr(head.length));
    return out;
}

std::string splice(std::string_view text, std::size_t begin, std::size_t end,
                   std::string_view replacement) {
    std::string out;
    out.reserve(text.size() + replacement.size());
    out.append(text.substr(0, begin));
    out.append(replacement);
    out.append(text.substr(end));
    return out;
}

} // namespace fqbank
