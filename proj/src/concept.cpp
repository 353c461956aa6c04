#include "bsv/concept.hpp"

namespace bsv {

namespace {

constexpr std::array<std::string_view, kConceptCount> kNames = {
    "dev_stage", "pub_time", "issue_no", "region",   "damage",  "crop",
    "pest",      "disease",  "auxiliary", "chemical", "climate",
};

}  // namespace

std::string_view concept_name(ConceptType c) noexcept {
    return kNames[static_cast<std::size_t>(c)];
}

std::optional<ConceptType> parse_concept(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<ConceptType>(i);
    return std::nullopt;
}

std::string_view canonical_prefix(std::string_view canonical_id) noexcept {
    auto colon = canonical_id.find(':');
    if (colon == std::string_view::npos) return {};
    return canonical_id.substr(0, colon);
}

}  // namespace bsv
