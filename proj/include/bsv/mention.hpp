#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsv/concept.hpp"
#include "json.hpp"

namespace bsv {

/// A typed occurrence of a concept inside one block. span is a half-open
/// code-point range into the block text.
struct EntityMention {
    std::string doc_id;
    std::size_t block = 0;
    ConceptType concept_type = ConceptType::crop;
    std::string canonical_id;
    std::string surface;
    std::size_t start = 0;
    std::size_t end = 0;
    std::optional<std::string> norm;

    std::size_t length() const noexcept { return end - start; }
    bool overlaps(const EntityMention& o) const noexcept {
        return block == o.block && start < o.end && o.start < end;
    }
    bool operator==(const EntityMention&) const = default;
};

/// Canonical mention order: (block, start, concept), then end and id so the
/// order is total.
bool mention_less(const EntityMention& a, const EntityMention& b) noexcept;
void sort_mentions(std::vector<EntityMention>& mentions);

/// Per-document export of the extraction stage.
struct DocItemset {
    std::string doc_id;
    std::vector<EntityMention> mentions;

    bool operator==(const DocItemset&) const = default;
};

nlohmann::ordered_json mention_to_json(const EntityMention& m);
EntityMention mention_from_json(const nlohmann::json& j, const std::string& doc_id);
nlohmann::ordered_json itemset_to_json(const DocItemset& set);
/// Throws Error(format_error).
DocItemset itemset_from_json(const nlohmann::json& j);
std::string serialize_itemset(const DocItemset& set);

}  // namespace bsv
