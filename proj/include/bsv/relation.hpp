#pragma once

// Structure-aware relation extraction.
//
// Structured documents (at least one title or subtitle): a target mention in
// a heading relates to every partner mention in the non-avoided body blocks
// of that heading's section. Structureless documents: target and partner
// mentions that share a paragraph are related. Avoided block ranges never
// contribute, and every relation of a document carries the same header
// context (date, region, issue).

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bsv/concept.hpp"
#include "bsv/document.hpp"
#include "bsv/mention.hpp"
#include "json.hpp"

namespace bsv {

struct AvoidRule {
    std::string start_phrase;
    std::optional<std::string> end_phrase;

    bool operator==(const AvoidRule&) const = default;
};

struct RelationConfig {
    ConceptType target = ConceptType::crop;
    std::vector<ConceptType> partners{ConceptType::pest, ConceptType::disease};
    std::vector<ConceptType> attach{ConceptType::damage};
    std::vector<ConceptType> context{ConceptType::pub_time, ConceptType::issue_no, ConceptType::region};
    std::vector<AvoidRule> avoid;

    /// Throws Error(format_error) when the target is also a partner or an
    /// avoid phrase is empty.
    void validate() const;
    bool is_partner(ConceptType c) const noexcept;
    bool is_attached(ConceptType c) const noexcept;
    bool uses_context(ConceptType c) const noexcept;

    bool operator==(const RelationConfig&) const = default;
};

RelationConfig relation_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json relation_config_to_json(const RelationConfig& cfg);
RelationConfig load_relation_config(const std::string& path);

struct RelationContext {
    std::optional<std::string> date;
    std::optional<std::string> region;
    std::optional<std::string> issue;

    bool operator==(const RelationContext&) const = default;
};

struct EntityRef {
    ConceptType concept_type = ConceptType::crop;
    std::string id;

    auto operator<=>(const EntityRef&) const = default;
};

struct Evidence {
    std::size_t block = 0;
    std::string snippet;

    auto operator<=>(const Evidence&) const = default;
};

enum class RelationSource { heading, paragraph };

std::string_view relation_source_name(RelationSource s) noexcept;

struct Relation {
    std::string doc_id;
    EntityRef subject;
    EntityRef object;
    std::vector<std::string> damage;
    RelationContext context;
    std::vector<Evidence> evidence;
    /// Ordinals of the units (heading block for sections, paragraph block in
    /// structureless mode) in which the pair was found.
    std::vector<std::size_t> units;
    RelationSource source = RelationSource::heading;

    bool operator==(const Relation&) const = default;
};

nlohmann::ordered_json relation_to_json(const Relation& r);
Relation relation_from_json(const nlohmann::json& j);
std::string serialize_relation(const Relation& r);

inline constexpr std::size_t kSnippetMax = 160;

/// Block ordinals covered by the avoid rules.
std::set<std::size_t> mark_avoid(const Document& doc, const RelationConfig& cfg);

/// Date, region and issue read from header-block mentions; document
/// metadata overrides extracted values.
RelationContext header_context(const DocItemset& itemset, const Document& doc, const RelationConfig& cfg = {});

/// Throws Error(mismatched_itemset) when itemset.doc_id != doc.id.
std::vector<Relation> relate_document(const Document& doc, const DocItemset& itemset, const RelationConfig& cfg);

/// Number of cooccurrence units in a document: non-avoided sections when the
/// document has headings, non-avoided paragraphs otherwise.
std::size_t count_units(const Document& doc, const RelationConfig& cfg);

/// Snippet of at most kSnippetMax code points around [start, end), whitespace collapsed.
std::string make_snippet(std::string_view block_text, std::size_t start, std::size_t end);

struct CoocScore {
    std::string first;
    std::string second;
    std::size_t count = 0;
    std::optional<double> pmi;
};

/// Counts, per (subject, object) pair, the units in which the pair was
/// emitted, and scores it with PMI against per-entity unit marginals.
std::vector<CoocScore> cooc_scores(const std::vector<Relation>& relations, std::size_t unit_count);
double pmi(std::size_t unit_count, std::size_t pair_count, std::size_t first_count, std::size_t second_count);

nlohmann::ordered_json cooc_to_json(const CoocScore& s);

}  // namespace bsv
