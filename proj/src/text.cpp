#include "bsv/text.hpp"

namespace bsv::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Base letters for U+0100..U+017F after NFD decomposition; '*' marks letters
// with no canonical decomposition, which are only lowercased.
constexpr std::string_view kLatinExtA =
    "aaaaaaccccccccdd"
    "**eeeeeeeeeegggg"
    "gggghh**iiiiiiii"
    "i***jjkk*llllll*"
    "***nnnnnn***oooo"
    "oo**rrrrrrssssss"
    "sstttt**uuuuuuuu"
    "uuuuwwyyyzzzzzz*";

// Same for U+00C0..U+00FF (already lowercased column, '*' = keep lowercase).
constexpr std::string_view kLatin1 =
    "aaaaaa*ceeeeiiii"
    "*nooooo**uuuuy**"
    "aaaaaa*ceeeeiiii"
    "*nooooo**uuuuy*y";

char32_t strip_diacritic(char32_t lower) noexcept {
    if (lower >= 0xC0 && lower <= 0xFF) {
        char c = kLatin1[lower - 0xC0];
        return c == '*' ? lower : static_cast<char32_t>(c);
    }
    if (lower >= 0x100 && lower <= 0x17F) {
        char c = kLatinExtA[lower - 0x100];
        return c == '*' ? lower : static_cast<char32_t>(c);
    }
    return lower;
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        auto b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
        else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
        else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
        if (len == 0 || i + len > n) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            auto b = static_cast<unsigned char>(bytes[i + k]);
            if ((b & 0xC0) != 0x80) { ok = false; break; }
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
        if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
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

std::string encode_utf8(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::size_t code_point_count(std::string_view utf8) {
    return decode_utf8(utf8).size();
}

std::string slice(std::string_view utf8, std::size_t begin, std::size_t end) {
    auto cps = decode_utf8(utf8);
    if (end > cps.size()) end = cps.size();
    if (begin >= end) return {};
    return encode_utf8(std::u32string_view(cps).substr(begin, end - begin));
}

bool is_space(char32_t cp) noexcept {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 ||
           cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
           cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_combining_mark(char32_t cp) noexcept {
    return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
           (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
           (cp >= 0xFE20 && cp <= 0xFE2F);
}

bool is_digit(char32_t cp) noexcept { return cp >= '0' && cp <= '9'; }

bool is_letter(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (is_space(cp) || is_combining_mark(cp)) return false;
    // General punctuation, currency, arrows/math/box drawing, CJK punctuation,
    // private use, specials.
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xE000 && cp <= 0xF8FF) return false;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if (cp >= 0xFF00 && cp <= 0xFF20) return false;
    if (cp >= 0xFFF0) return false;
    return true;
}

char32_t to_lower(char32_t cp) noexcept {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp < 0xC0) return cp;
    if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 32;
    if (cp < 0x100) return cp;
    if (cp <= 0x17F) {
        if (cp == 0x130) return 'i';
        if (cp == 0x178) return 0xFF;
        if ((cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
            return (cp % 2 == 0) ? cp + 1 : cp;
        if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
            return (cp % 2 == 1) ? cp + 1 : cp;
        return cp;
    }
    // Greek and Cyrillic capitals.
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

FoldedText fold_mapped(std::u32string_view original) {
    FoldedText out;
    out.chars.reserve(original.size());
    out.src_begin.reserve(original.size());
    out.src_end.reserve(original.size());
    bool pending_space = false;
    std::uint32_t space_begin = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        char32_t cp = original[i];
        auto pos = static_cast<std::uint32_t>(i);
        if (is_combining_mark(cp)) {
            if (!out.chars.empty() && !pending_space) out.src_end.back() = pos + 1;
            continue;
        }
        if (is_space(cp)) {
            if (!pending_space) space_begin = pos;
            pending_space = true;
            continue;
        }
        if (pending_space && !out.chars.empty()) {
            out.chars.push_back(U' ');
            out.src_begin.push_back(space_begin);
            out.src_end.push_back(pos);
        }
        pending_space = false;
        out.chars.push_back(strip_diacritic(to_lower(cp)));
        out.src_begin.push_back(pos);
        out.src_end.push_back(pos + 1);
    }
    return out;
}

std::u32string fold32(std::u32string_view original) {
    return fold_mapped(original).chars;
}

std::string fold(std::string_view utf8) {
    return encode_utf8(fold32(decode_utf8(utf8)));
}

std::vector<Token> tokenize(std::u32string_view folded) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = folded.size();
    while (i < n) {
        char32_t cp = folded[i];
        if (is_space(cp)) {
            ++i;
            continue;
        }
        if (!is_alnum(cp)) {
            tokens.push_back({i, i + 1, TokenKind::symbol});
            ++i;
            continue;
        }
        std::size_t j = i;
        bool letters = false;
        bool digits = false;
        while (j < n && is_alnum(folded[j])) {
            (is_digit(folded[j]) ? digits : letters) = true;
            ++j;
        }
        TokenKind kind = letters && digits ? TokenKind::mixed
                         : digits          ? TokenKind::number
                                           : TokenKind::word;
        tokens.push_back({i, j, kind});
        i = j;
    }
    return tokens;
}

bool is_boundary(std::u32string_view folded, std::size_t pos) noexcept {
    if (pos == 0 || pos >= folded.size()) return true;
    return !(is_alnum(folded[pos - 1]) && is_alnum(folded[pos]));
}

std::string trim(std::string_view s) {
    auto cps = decode_utf8(s);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

}  // namespace bsv::text
