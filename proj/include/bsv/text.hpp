#pragma once

// UTF-8 handling, case/diacritic folding and the shared token definition.
//
// All offsets exposed by the library are code-point indices into the
// original (unfolded) text.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bsv::text {

/// Decodes UTF-8; malformed sequences decode to U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

std::size_t code_point_count(std::string_view utf8);
/// Substring by code-point range [begin, end).
std::string slice(std::string_view utf8, std::size_t begin, std::size_t end);

bool is_space(char32_t cp) noexcept;
bool is_combining_mark(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
bool is_letter(char32_t cp) noexcept;
inline bool is_alnum(char32_t cp) noexcept { return is_digit(cp) || is_letter(cp); }
char32_t to_lower(char32_t cp) noexcept;
inline bool is_upper(char32_t cp) noexcept { return to_lower(cp) != cp; }

/// Folded text together with, for each folded code point, the half-open
/// range of original code points it came from.
struct FoldedText {
    std::u32string chars;
    std::vector<std::uint32_t> src_begin;
    std::vector<std::uint32_t> src_end;

    std::size_t size() const noexcept { return chars.size(); }
    /// Original code-point span covered by folded range [begin, end); end > begin.
    std::pair<std::size_t, std::size_t> source_span(std::size_t begin, std::size_t end) const {
        return {src_begin[begin], src_end[end - 1]};
    }
};

/// Lowercase, strip diacritics, collapse whitespace runs, trim.
FoldedText fold_mapped(std::u32string_view original);
std::u32string fold32(std::u32string_view original);
std::string fold(std::string_view utf8);

enum class TokenKind { word, number, mixed, symbol };

/// A token is a maximal run of letters/digits, or one non-space symbol.
struct Token {
    std::size_t begin;  // folded index
    std::size_t end;
    TokenKind kind;
};

std::vector<Token> tokenize(std::u32string_view folded);

/// True when position pos in folded text sits on a letter/digit transition.
bool is_boundary(std::u32string_view folded, std::size_t pos) noexcept;

std::string trim(std::string_view s);

}  // namespace bsv::text
