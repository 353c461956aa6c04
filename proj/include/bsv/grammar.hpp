#pragma once

// Local grammars: a small token-pattern language for productive entities
// (dates, issue numbers, damage expressions, developmental stages).
//
//   rule <name> -> <concept_type> : <items>
//
// See docs/rules.md for the full grammar.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsv/concept.hpp"
#include "bsv/date.hpp"
#include "bsv/document.hpp"
#include "bsv/mention.hpp"
#include "bsv/text.hpp"

namespace bsv {

struct TokenTest {
    enum class Kind { literal, number, word, percent };
    Kind kind = Kind::literal;
    std::u32string literal;  // folded, exactly one token

    bool operator==(const TokenTest&) const = default;
};

/// One pattern position: a single test, or an alternation set, optionally "?".
struct TokenMatcher {
    std::vector<TokenTest> alternatives;
    bool optional = false;

    bool operator==(const TokenMatcher&) const = default;
};

struct PatternRule {
    std::string name;
    ConceptType emits = ConceptType::damage;
    std::vector<TokenMatcher> pattern;
    std::size_t capture_begin = 0;  // [capture_begin, capture_end) over pattern
    std::size_t capture_end = 0;
};

/// Throws Error(syntax_error) with a line number, or Error(duplicate_rule).
std::vector<PatternRule> parse_rules(std::string_view text);
std::vector<PatternRule> load_rules_file(const std::string& path);

/// Matches every rule over one tokenized block.
std::vector<EntityMention> apply_rules(const std::vector<PatternRule>& rules, const text::FoldedText& folded,
                                       std::u32string_view original, std::size_t block_index);
std::vector<EntityMention> apply_rules(const std::vector<PatternRule>& rules, const Block& block);

/// Reads a day/month/year out of folded date text ("12 avril 1998",
/// "12/04/98"). Two-digit years below 30 map to 20xx, others to 19xx.
std::optional<Date> normalize_date(std::u32string_view folded);

}  // namespace bsv
