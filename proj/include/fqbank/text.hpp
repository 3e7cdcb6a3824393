#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fqbank {

/// A word token. `text` is the case-folded form; `begin`/`end` are byte
/// offsets into the source string, so `source.substr(begin, end - begin)`
/// is the token as written.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Token&) const = default;
};

/// Shared tokenizer used by entity matching, the index and the embeddings.
///
/// Text is split on whitespace and punctuation. Apostrophes and hyphens are
/// kept when they sit between two word characters ("Gödel's", "Jean-Paul").
/// Any non-ASCII code point outside the Unicode punctuation/symbol blocks
/// counts as a word character. Typographic apostrophes fold to '\''.
std::vector<Token> tokenize(std::string_view text);

/// Folded token strings only.
std::vector<std::string> tokenize_words(std::string_view text);

/// Lowercases ASCII, Latin-1, Latin Extended-A, basic Greek and Cyrillic.
std::string case_fold(std::string_view text);

/// Collapses whitespace runs to a single space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Key used for case-insensitive text identity (dedup, lookups).
std::string fold_key(std::string_view text);

/// Keeps `text` up to the end of its `max_tokens`-th token.
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

/// Returns `replacement` with its first letter uppercased when the first
/// letter of `original` is uppercase.
std::string match_case(std::string_view replacement, std::string_view original);

/// Replaces the byte range [begin, end) of `text` with `replacement`.
std::string splice(std::string_view text, std::size_t begin, std::size_t end,
                   std::string_view replacement);

/// Decodes UTF-8 into code points; invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

} // namespace fqbank
