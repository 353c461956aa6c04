#pragma once

// Sectioned bulletin model: a document is an ordered list of header, title,
// subtitle and paragraph blocks plus optional curated metadata.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsv/date.hpp"
#include "json.hpp"

namespace bsv {

enum class BlockKind { header, title, subtitle, paragraph };

std::string_view block_kind_name(BlockKind kind) noexcept;
std::optional<BlockKind> parse_block_kind(std::string_view name) noexcept;

/// Heading level: 1 for titles, 2 for subtitles, 0 otherwise.
int heading_level(BlockKind kind) noexcept;

struct Block {
    BlockKind kind = BlockKind::paragraph;
    std::string text;
    std::size_t index = 0;

    bool operator==(const Block&) const = default;
};

struct DocumentMeta {
    std::optional<Date> date;
    std::optional<std::string> region;
    std::optional<std::string> issue;

    bool empty() const noexcept { return !date && !region && !issue; }
    bool operator==(const DocumentMeta&) const = default;
};

struct Document {
    std::string id;
    std::vector<Block> blocks;
    DocumentMeta meta;

    bool has_headings() const noexcept;
    bool operator==(const Document&) const = default;
};

/// A title or subtitle together with the blocks it governs.
struct SectionSpan {
    std::size_t title_block = 0;
    std::size_t body_begin = 0;  // half-open [body_begin, body_end)
    std::size_t body_end = 0;
    int level = 1;

    bool contains(std::size_t block) const noexcept {
        return block >= body_begin && block < body_end;
    }
    bool operator==(const SectionSpan&) const = default;
};

struct SegmenterConfig {
    std::size_t header_line_limit = 5;
    std::size_t title_max_len = 60;
    double title_upper_ratio = 0.8;
};

/// Splits plain text into header/title/subtitle/paragraph blocks.
/// Throws Error(empty_input) when raw has no non-blank line.
Document segment_plaintext(std::string_view raw, const SegmenterConfig& cfg = {},
                           std::string id = "doc");

/// Parses one corpus JSON object. Throws Error(format_error).
Document parse_document_json(std::string_view bytes);
Document document_from_json(const nlohmann::json& j);
nlohmann::ordered_json document_to_json(const Document& doc);
/// Compact one-line serialization used by corpus files.
std::string serialize_document(const Document& doc);

/// Checks block/document invariants; throws Error(format_error).
void validate_document(const Document& doc);

std::vector<SectionSpan> sectionize(const Document& doc);

}  // namespace bsv
