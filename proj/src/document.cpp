#include "bsv/document.hpp"

#include <utility>

#include "bsv/error.hpp"
#include "bsv/text.hpp"

namespace bsv {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view block_kind_name(BlockKind kind) noexcept {
    switch (kind) {
        case BlockKind::header: return "header";
        case BlockKind::title: return "title";
        case BlockKind::subtitle: return "subtitle";
        case BlockKind::paragraph: return "paragraph";
    }
    return "paragraph";
}

std::optional<BlockKind> parse_block_kind(std::string_view name) noexcept {
    if (name == "header") return BlockKind::header;
    if (name == "title") return BlockKind::title;
    if (name == "subtitle") return BlockKind::subtitle;
    if (name == "paragraph") return BlockKind::paragraph;
    return std::nullopt;
}

int heading_level(BlockKind kind) noexcept {
    switch (kind) {
        case BlockKind::title: return 1;
        case BlockKind::subtitle: return 2;
        default: return 0;
    }
}

bool Document::has_headings() const noexcept {
    for (const auto& b : blocks)
        if (heading_level(b.kind) > 0) return true;
    return false;
}

namespace {

std::vector<std::string> split_lines(std::string_view raw) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto nl = raw.find('\n', start);
        auto end = nl == std::string_view::npos ? raw.size() : nl;
        std::string line(raw.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

bool is_blank(std::string_view line) {
    for (char32_t cp : text::decode_utf8(line))
        if (!text::is_space(cp)) return false;
    return true;
}

bool looks_like_title(const std::u32string& trimmed, const SegmenterConfig& cfg) {
    if (trimmed.empty() || trimmed.size() > cfg.title_max_len) return false;
    std::size_t letters = 0;
    std::size_t upper = 0;
    for (char32_t cp : trimmed) {
        if (!text::is_letter(cp)) continue;
        ++letters;
        if (text::is_upper(cp)) ++upper;
    }
    if (letters == 0) return false;
    return static_cast<double>(upper) >= cfg.title_upper_ratio * static_cast<double>(letters);
}

bool looks_like_subtitle(const std::u32string& trimmed, const SegmenterConfig& cfg) {
    return !trimmed.empty() && trimmed.size() <= cfg.title_max_len && trimmed.back() == U':';
}

std::u32string trim32(std::u32string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && text::is_space(s[b])) ++b;
    while (e > b && text::is_space(s[e - 1])) --e;
    return std::u32string(s.substr(b, e - b));
}

}  // namespace

Document segment_plaintext(std::string_view raw, const SegmenterConfig& cfg, std::string id) {
    auto lines = split_lines(raw);
    std::size_t first = 0;
    while (first < lines.size() && is_blank(lines[first])) ++first;
    if (first == lines.size()) throw Error(Errc::empty_input, "input has no non-blank line");

    Document doc;
    doc.id = std::move(id);
    auto push = [&doc](BlockKind kind, std::string text_) {
        doc.blocks.push_back({kind, std::move(text_), doc.blocks.size()});
    };

    // Header: the opening run, when a blank line closes it and more content follows.
    std::size_t run_end = first;
    while (run_end < lines.size() && !is_blank(lines[run_end])) ++run_end;
    bool more_content = false;
    for (std::size_t i = run_end; i < lines.size(); ++i)
        if (!is_blank(lines[i])) { more_content = true; break; }
    std::size_t pos = first;
    if (run_end < lines.size() && more_content && run_end - first <= cfg.header_line_limit) {
        for (std::size_t i = first; i < run_end; ++i) push(BlockKind::header, lines[i]);
        pos = run_end;
    }

    std::string paragraph;
    auto flush = [&] {
        if (!paragraph.empty()) push(BlockKind::paragraph, std::move(paragraph));
        paragraph.clear();
    };
    for (; pos < lines.size(); ++pos) {
        const auto& line = lines[pos];
        if (is_blank(line)) {
            flush();
            continue;
        }
        auto trimmed = trim32(text::decode_utf8(line));
        if (looks_like_title(trimmed, cfg)) {
            flush();
            push(BlockKind::title, line);
        } else if (looks_like_subtitle(trimmed, cfg)) {
            flush();
            push(BlockKind::subtitle, line);
        } else {
            if (!paragraph.empty()) paragraph.push_back('\n');
            paragraph += line;
        }
    }
    flush();
    return doc;
}

void validate_document(const Document& doc) {
    if (doc.id.empty()) throw Error(Errc::format_error, "document id is empty");
    if (doc.blocks.empty())
        throw Error(Errc::format_error, "document '" + doc.id + "' has no blocks");
    bool seen_body = false;
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        const auto& b = doc.blocks[i];
        if (b.index != i)
            throw Error(Errc::format_error, "block indices of '" + doc.id + "' are not consecutive");
        if (text::trim(b.text).empty())
            throw Error(Errc::format_error, "block " + std::to_string(i) + " of '" + doc.id + "' is blank");
        if (b.kind == BlockKind::header) {
            if (seen_body)
                throw Error(Errc::format_error,
                            "header block " + std::to_string(i) + " of '" + doc.id + "' follows body blocks");
        } else {
            seen_body = true;
        }
    }
}

Document document_from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::format_error, "document is not a JSON object");
    Document doc;
    auto id = j.find("id");
    if (id == j.end() || !id->is_string())
        throw Error(Errc::format_error, "missing string field 'id'");
    doc.id = id->get<std::string>();

    if (auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
        if (!meta->is_object()) throw Error(Errc::format_error, "'meta' must be an object");
        if (auto d = meta->find("date"); d != meta->end() && !d->is_null()) {
            if (!d->is_string()) throw Error(Errc::format_error, "meta.date must be a string");
            auto parsed = Date::parse(d->get<std::string>());
            if (!parsed) throw Error(Errc::format_error, "bad date '" + d->get<std::string>() + "'");
            doc.meta.date = *parsed;
        }
        for (auto [key, slot] : {std::pair{"region", &doc.meta.region},
                                 std::pair{"issue", &doc.meta.issue}}) {
            auto f = meta->find(key);
            if (f == meta->end() || f->is_null()) continue;
            if (!f->is_string())
                throw Error(Errc::format_error, std::string("meta.") + key + " must be a string");
            *slot = f->get<std::string>();
        }
    }

    auto blocks = j.find("blocks");
    if (blocks == j.end() || !blocks->is_array())
        throw Error(Errc::format_error, "missing array field 'blocks'");
    for (const auto& b : *blocks) {
        if (!b.is_object()) throw Error(Errc::format_error, "block is not an object");
        auto kind = b.find("kind");
        auto txt = b.find("text");
        if (kind == b.end() || !kind->is_string() || txt == b.end() || !txt->is_string())
            throw Error(Errc::format_error, "block needs string fields 'kind' and 'text'");
        auto k = parse_block_kind(kind->get<std::string>());
        if (!k) throw Error(Errc::format_error, "unknown block kind '" + kind->get<std::string>() + "'");
        doc.blocks.push_back({*k, txt->get<std::string>(), doc.blocks.size()});
    }
    validate_document(doc);
    return doc;
}

Document parse_document_json(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(Errc::format_error, std::string("invalid JSON: ") + e.what());
    }
    return document_from_json(j);
}

ordered_json document_to_json(const Document& doc) {
    ordered_json j;
    j["id"] = doc.id;
    if (!doc.meta.empty()) {
        ordered_json meta = ordered_json::object();
        if (doc.meta.date) meta["date"] = doc.meta.date->to_string();
        if (doc.meta.region) meta["region"] = *doc.meta.region;
        if (doc.meta.issue) meta["issue"] = *doc.meta.issue;
        j["meta"] = std::move(meta);
    }
    ordered_json blocks = ordered_json::array();
    for (const auto& b : doc.blocks)
        blocks.push_back({{"kind", block_kind_name(b.kind)}, {"text", b.text}});
    j["blocks"] = std::move(blocks);
    return j;
}

std::string serialize_document(const Document& doc) {
    return document_to_json(doc).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::vector<SectionSpan> sectionize(const Document& doc) {
    std::vector<SectionSpan> spans;
    const auto& blocks = doc.blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        int level = heading_level(blocks[i].kind);
        if (level == 0) continue;
        std::size_t end = i + 1;
        while (end < blocks.size()) {
            int l = heading_level(blocks[end].kind);
            if (l != 0 && l <= level) break;
            ++end;
        }
        spans.push_back({i, i + 1, end, level});
    }
    return spans;
}

}  // namespace bsv
