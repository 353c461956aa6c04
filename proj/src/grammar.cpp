#include "bsv/grammar.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "bsv/error.hpp"

namespace bsv {

namespace {

class RuleLineParser {
public:
    RuleLineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

    /// Returns nullopt for blank and comment lines.
    std::optional<PatternRule> parse() {
        skip_ws();
        if (at_end() || peek() == '#') return std::nullopt;
        expect_word("rule");
        if (!at_end() && !is_ws(peek())) fail("expected whitespace after 'rule'");
        skip_ws();
        PatternRule rule;
        rule.name = identifier("rule name");
        skip_ws();
        expect("->");
        skip_ws();
        auto concept_name_ = identifier("concept type");
        auto concept_type = parse_concept(concept_name_);
        if (!concept_type) fail("unknown concept type '" + concept_name_ + "'");
        rule.emits = *concept_type;
        skip_ws();
        expect(":");
        parse_items(rule);
        return rule;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(Errc::syntax_error, msg + " (column " + std::to_string(pos_ + 1) + ")", line_no_);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    static bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r'; }
    void skip_ws() {
        while (!at_end() && is_ws(peek())) ++pos_;
    }

    void expect(std::string_view tok) {
        if (s_.substr(pos_, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
        pos_ += tok.size();
    }
    void expect_word(std::string_view word) {
        if (s_.substr(pos_, word.size()) != word) fail("expected '" + std::string(word) + "'");
        pos_ += word.size();
    }

    std::string identifier(const char* what) {
        auto start = pos_;
        auto ident_char = [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                   c == '-' || c == '.';
        };
        while (!at_end() && ident_char(peek())) ++pos_;
        if (pos_ == start) fail(std::string("expected ") + what);
        return std::string(s_.substr(start, pos_ - start));
    }

    TokenTest literal() {
        ++pos_;  // opening quote
        std::string raw;
        while (true) {
            if (at_end()) fail("unterminated string literal");
            char c = peek();
            ++pos_;
            if (c == '"') break;
            if (c == '\\') {
                if (at_end()) fail("unterminated escape");
                raw.push_back(peek());
                ++pos_;
                continue;
            }
            raw.push_back(c);
        }
        auto folded = text::fold32(text::decode_utf8(raw));
        auto tokens = text::tokenize(folded);
        if (folded.empty()) fail("empty literal");
        if (tokens.size() != 1 || tokens[0].begin != 0 || tokens[0].end != folded.size())
            fail("literal \"" + raw + "\" must be a single token");
        return {TokenTest::Kind::literal, folded};
    }

    TokenTest token_class() {
        static constexpr std::array<std::pair<std::string_view, TokenTest::Kind>, 3> kClasses = {{
            {"<NUM>", TokenTest::Kind::number},
            {"<WORD>", TokenTest::Kind::word},
            {"<PCT>", TokenTest::Kind::percent},
        }};
        for (const auto& [name, kind] : kClasses) {
            if (s_.substr(pos_, name.size()) == name) {
                pos_ += name.size();
                return {kind, {}};
            }
        }
        fail("unknown token class");
    }

    TokenTest single_test() {
        if (at_end()) fail("expected matcher");
        if (peek() == '"') return literal();
        if (peek() == '<') return token_class();
        fail("expected literal or token class");
    }

    TokenMatcher matcher() {
        TokenMatcher m;
        if (peek() == '(') {
            ++pos_;
            while (true) {
                skip_ws();
                m.alternatives.push_back(single_test());
                skip_ws();
                if (at_end()) fail("unterminated set");
                if (peek() == '|') {
                    ++pos_;
                    continue;
                }
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                fail("expected '|' or ')'");
            }
        } else {
            m.alternatives.push_back(single_test());
        }
        if (!at_end() && peek() == '?') {
            m.optional = true;
            ++pos_;
        }
        return m;
    }

    void parse_items(PatternRule& rule) {
        bool open = false;
        bool seen_capture = false;
        while (true) {
            skip_ws();
            if (at_end() || peek() == '#') break;
            char c = peek();
            if (c == '[') {
                if (open || seen_capture) fail("only one capture bracket is allowed");
                open = true;
                seen_capture = true;
                rule.capture_begin = rule.pattern.size();
                ++pos_;
            } else if (c == ']') {
                if (!open) fail("unbalanced ']'");
                open = false;
                rule.capture_end = rule.pattern.size();
                ++pos_;
            } else {
                rule.pattern.push_back(matcher());
            }
        }
        if (open) fail("unterminated capture bracket");
        if (rule.pattern.empty()) fail("empty pattern");
        if (!seen_capture) fail("missing capture bracket");
        if (rule.capture_begin == rule.capture_end) fail("empty capture");
    }

    std::string_view s_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

bool test_token(const TokenTest& t, std::u32string_view tok_text, text::TokenKind kind) {
    switch (t.kind) {
        case TokenTest::Kind::literal: return tok_text == t.literal;
        case TokenTest::Kind::number: return kind == text::TokenKind::number;
        case TokenTest::Kind::word: return kind == text::TokenKind::word;
        case TokenTest::Kind::percent: return tok_text == U"%";
    }
    return false;
}

struct MatchPath {
    std::size_t end = 0;
    std::size_t cap_begin = 0;
    std::size_t cap_end = 0;
    bool found = false;
};

class RuleMatcher {
public:
    RuleMatcher(const PatternRule& rule, const std::vector<text::Token>& tokens, std::u32string_view chars)
        : rule_(rule), tokens_(tokens), chars_(chars) {}

    /// Longest match starting at token `start`; the first path in greedy
    /// order wins among equally long ones.
    MatchPath longest_at(std::size_t start) {
        best_ = {};
        search(0, start, start, start);
        return best_;
    }

private:
    void search(std::size_t pi, std::size_t ti, std::size_t cap_b, std::size_t cap_e) {
        if (pi == rule_.capture_begin) cap_b = ti;
        if (pi == rule_.capture_end) cap_e = ti;
        if (pi == rule_.pattern.size()) {
            if (!best_.found || ti > best_.end) best_ = {ti, cap_b, cap_e, true};
            return;
        }
        const auto& m = rule_.pattern[pi];
        if (ti < tokens_.size()) {
            const auto& tok = tokens_[ti];
            auto tok_text = chars_.substr(tok.begin, tok.end - tok.begin);
            for (const auto& alt : m.alternatives) {
                if (test_token(alt, tok_text, tok.kind)) {
                    search(pi + 1, ti + 1, cap_b, cap_e);
                    break;
                }
            }
        }
        if (m.optional) search(pi + 1, ti, cap_b, cap_e);
    }

    const PatternRule& rule_;
    const std::vector<text::Token>& tokens_;
    std::u32string_view chars_;
    MatchPath best_;
};

struct MonthName {
    std::u32string_view name;
    int month;
};

constexpr std::array<MonthName, 21> kMonths = {{
    {U"janvier", 1},  {U"janv", 1},     {U"fevrier", 2},  {U"fevr", 2},    {U"fev", 2},
    {U"mars", 3},     {U"avril", 4},    {U"avr", 4},      {U"mai", 5},     {U"juin", 6},
    {U"juillet", 7},  {U"juil", 7},     {U"aout", 8},     {U"septembre", 9}, {U"sept", 9},
    {U"octobre", 10}, {U"oct", 10},     {U"novembre", 11}, {U"nov", 11},   {U"decembre", 12},
    {U"dec", 12},
}};

}  // namespace

std::vector<PatternRule> parse_rules(std::string_view text) {
    std::vector<PatternRule> rules;
    std::unordered_set<std::string> names;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        auto end = nl == std::string_view::npos ? text.size() : nl;
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        auto rule = RuleLineParser(line, line_no).parse();
        if (!rule) continue;
        if (!names.insert(rule->name).second)
            throw Error(Errc::duplicate_rule, "duplicate rule '" + rule->name + "'", line_no);
        rules.push_back(std::move(*rule));
    }
    return rules;
}

std::vector<PatternRule> load_rules_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read rules '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str());
}

std::optional<Date> normalize_date(std::u32string_view folded) {
    struct Part {
        int value;
        std::size_t digits;  // 0 for month names
    };
    std::vector<Part> parts;
    for (const auto& tok : text::tokenize(folded)) {
        auto t = folded.substr(tok.begin, tok.end - tok.begin);
        if (tok.kind == text::TokenKind::number) {
            if (t.size() > 4) return std::nullopt;
            int v = 0;
            for (char32_t c : t) v = v * 10 + static_cast<int>(c - U'0');
            parts.push_back({v, t.size()});
        } else if (tok.kind == text::TokenKind::mixed && t.size() >= 3 && t.substr(t.size() - 2) == U"er" &&
                   text::is_digit(t[0]) && t.size() <= 4) {
            // "1er avril"
            int v = 0;
            for (char32_t c : t.substr(0, t.size() - 2)) {
                if (!text::is_digit(c)) return std::nullopt;
                v = v * 10 + static_cast<int>(c - U'0');
            }
            parts.push_back({v, t.size() - 2});
        } else if (tok.kind == text::TokenKind::word) {
            for (const auto& m : kMonths) {
                if (m.name == t) {
                    parts.push_back({m.month, 0});
                    break;
                }
            }
        }
    }
    if (parts.size() != 3) return std::nullopt;
    const auto& day = parts[0];
    const auto& month = parts[1];
    const auto& year = parts[2];
    if (day.digits == 0 || year.digits == 0) return std::nullopt;
    int y = year.value;
    if (year.digits == 2) y += year.value < 30 ? 2000 : 1900;
    else if (year.digits != 4) return std::nullopt;
    return Date::from_parts(y, month.value, day.value);
}

std::vector<EntityMention> apply_rules(const std::vector<PatternRule>& rules, const text::FoldedText& folded,
                                       std::u32string_view original, std::size_t block_index) {
    std::vector<EntityMention> out;
    if (rules.empty()) return out;
    std::u32string_view chars = folded.chars;
    auto tokens = text::tokenize(chars);
    for (const auto& rule : rules) {
        RuleMatcher matcher(rule, tokens, chars);
        std::size_t ti = 0;
        while (ti < tokens.size()) {
            auto path = matcher.longest_at(ti);
            if (!path.found || path.end == ti) {
                ++ti;
                continue;
            }
            if (path.cap_end > path.cap_begin) {
                auto fb = tokens[path.cap_begin].begin;
                auto fe = tokens[path.cap_end - 1].end;
                auto [src_b, src_e] = folded.source_span(fb, fe);
                auto folded_surface = chars.substr(fb, fe - fb);
                EntityMention m;
                m.block = block_index;
                m.concept_type = rule.emits;
                m.canonical_id = std::string(concept_name(rule.emits)) + ":" + text::encode_utf8(folded_surface);
                m.surface = text::encode_utf8(original.substr(src_b, src_e - src_b));
                m.start = src_b;
                m.end = src_e;
                if (rule.emits == ConceptType::pub_time) {
                    if (auto d = normalize_date(folded_surface)) m.norm = d->to_string();
                }
                out.push_back(std::move(m));
            }
            ti = path.end;
        }
    }
    sort_mentions(out);
    return out;
}

std::vector<EntityMention> apply_rules(const std::vector<PatternRule>& rules, const Block& block) {
    auto original = text::decode_utf8(block.text);
    auto folded = text::fold_mapped(original);
    return apply_rules(rules, folded, original, block.index);
}

}  // namespace bsv
