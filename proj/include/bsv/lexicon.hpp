#pragma once

// Domain thesaurus and folded leftmost-longest dictionary matching.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bsv/concept.hpp"
#include "bsv/document.hpp"
#include "bsv/mention.hpp"
#include "bsv/text.hpp"

namespace bsv {

struct LexiconEntry {
    std::string canonical_id;
    ConceptType concept_type = ConceptType::crop;
    std::vector<std::string> surfaces;  // distinct, in file order
};

class Lexicon {
public:
    Lexicon() = default;

    /// Parses the TSV thesaurus (canonical_id, concept_type, surface).
    /// Throws Error(format_error) or Error(ambiguous_surface), with line numbers.
    static Lexicon load(std::string_view tsv);
    static Lexicon load_file(const std::string& path);

    /// Adds one surface; same validation as load().
    void add(const std::string& canonical_id, ConceptType concept_type, const std::string& surface);

    const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
    std::size_t surface_count() const noexcept { return surface_count_; }
    bool empty() const noexcept { return entries_.empty(); }

    /// Matches over an already folded block text. original is the block text
    /// as code points; spans in the result index into it.
    std::vector<EntityMention> match(const text::FoldedText& folded, std::u32string_view original,
                                     std::size_t block_index) const;

private:
    struct Hit {
        ConceptType concept_type;
        std::uint32_t entry;
    };
    struct Node {
        std::vector<Hit> hits;
    };

    std::uint32_t child(std::uint32_t node, char32_t cp) const;
    std::uint32_t insert_path(std::u32string_view folded);

    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::vector<Node> nodes_{Node{}};
    std::unordered_map<std::uint64_t, std::uint32_t> edges_;
    std::size_t surface_count_ = 0;
};

/// Convenience wrapper over Lexicon::match for a single block.
std::vector<EntityMention> match_block(const Lexicon& lex, const Block& block);

}  // namespace bsv
