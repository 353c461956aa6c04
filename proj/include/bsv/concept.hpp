#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bsv {

/// The eleven extraction categories. Serialized names are stable.
enum class ConceptType : std::uint8_t {
    dev_stage,
    pub_time,
    issue_no,
    region,
    damage,
    crop,
    pest,
    disease,
    auxiliary,
    chemical,
    climate,
};

inline constexpr std::size_t kConceptCount = 11;

inline constexpr std::array<ConceptType, kConceptCount> kAllConcepts = {
    ConceptType::dev_stage, ConceptType::pub_time, ConceptType::issue_no,
    ConceptType::region,    ConceptType::damage,   ConceptType::crop,
    ConceptType::pest,      ConceptType::disease,  ConceptType::auxiliary,
    ConceptType::chemical,  ConceptType::climate,
};

std::string_view concept_name(ConceptType c) noexcept;
std::optional<ConceptType> parse_concept(std::string_view name) noexcept;

/// "crop:ble" -> "crop"; empty view when there is no ':'.
std::string_view canonical_prefix(std::string_view canonical_id) noexcept;

}  // namespace bsv
