#include "bsv/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "bsv/error.hpp"

namespace bsv {

namespace {

constexpr std::uint32_t kNoNode = 0xFFFFFFFFu;

std::uint64_t edge_key(std::uint32_t node, char32_t cp) {
    return (static_cast<std::uint64_t>(node) << 32) | cp;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

}  // namespace

std::uint32_t Lexicon::child(std::uint32_t node, char32_t cp) const {
    auto it = edges_.find(edge_key(node, cp));
    return it == edges_.end() ? kNoNode : it->second;
}

std::uint32_t Lexicon::insert_path(std::u32string_view folded) {
    std::uint32_t node = 0;
    for (char32_t cp : folded) {
        auto key = edge_key(node, cp);
        auto it = edges_.find(key);
        if (it != edges_.end()) {
            node = it->second;
            continue;
        }
        auto next = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        edges_.emplace(key, next);
        node = next;
    }
    return node;
}

void Lexicon::add(const std::string& canonical_id, ConceptType concept_type, const std::string& surface) {
    if (canonical_id.empty()) throw Error(Errc::format_error, "empty canonical id");
    if (canonical_prefix(canonical_id) != concept_name(concept_type))
        throw Error(Errc::format_error,
                    "canonical id '" + canonical_id + "' does not start with '" +
                        std::string(concept_name(concept_type)) + ":'");
    auto folded = text::fold32(text::decode_utf8(surface));
    if (folded.empty()) throw Error(Errc::format_error, "empty surface for '" + canonical_id + "'");

    std::uint32_t entry_index;
    if (auto it = by_id_.find(canonical_id); it != by_id_.end()) {
        entry_index = it->second;
        if (entries_[entry_index].concept_type != concept_type)
            throw Error(Errc::format_error, "canonical id '" + canonical_id + "' used with two concept types");
    } else {
        entry_index = static_cast<std::uint32_t>(entries_.size());
        entries_.push_back({canonical_id, concept_type, {}});
        by_id_.emplace(canonical_id, entry_index);
    }

    auto node = insert_path(folded);
    for (const auto& hit : nodes_[node].hits) {
        if (hit.concept_type != concept_type) continue;
        if (hit.entry == entry_index) {
            auto& surfaces = entries_[entry_index].surfaces;
            if (std::find(surfaces.begin(), surfaces.end(), surface) == surfaces.end())
                surfaces.push_back(surface);
            return;
        }
        throw Error(Errc::ambiguous_surface,
                    "surface '" + surface + "' maps to both '" + entries_[hit.entry].canonical_id +
                        "' and '" + canonical_id + "'");
    }
    nodes_[node].hits.push_back({concept_type, entry_index});
    entries_[entry_index].surfaces.push_back(surface);
    ++surface_count_;
}

Lexicon Lexicon::load(std::string_view tsv) {
    Lexicon lex;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < tsv.size()) {
        auto nl = tsv.find('\n', start);
        auto end = nl == std::string_view::npos ? tsv.size() : nl;
        std::string_view line = tsv.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (text::trim(line).empty()) continue;

        auto cols = split_tabs(line);
        if (cols.size() != 3)
            throw Error(Errc::format_error, "expected 3 tab-separated columns, got " + std::to_string(cols.size()),
                        line_no);
        auto concept_type = parse_concept(cols[1]);
        if (!concept_type) throw Error(Errc::format_error, "unknown concept type '" + std::string(cols[1]) + "'", line_no);
        try {
            lex.add(std::string(cols[0]), *concept_type, std::string(cols[2]));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), line_no);
        }
    }
    return lex;
}

Lexicon Lexicon::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read lexicon '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load(buf.str());
}

std::vector<EntityMention> Lexicon::match(const text::FoldedText& folded, std::u32string_view original,
                                          std::size_t block_index) const {
    struct Candidate {
        std::size_t begin;
        std::size_t end;
        std::uint32_t entry;
    };
    // Candidates arrive ordered by begin, then by increasing end.
    std::map<ConceptType, std::vector<Candidate>> by_concept;
    const std::u32string_view chars = folded.chars;
    const std::size_t n = chars.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (text::is_space(chars[s]) || !text::is_boundary(chars, s)) continue;
        std::uint32_t node = 0;
        for (std::size_t j = s; j < n; ++j) {
            node = child(node, chars[j]);
            if (node == kNoNode) break;
            if (nodes_[node].hits.empty() || !text::is_boundary(chars, j + 1)) continue;
            for (const auto& hit : nodes_[node].hits)
                by_concept[hit.concept_type].push_back({s, j + 1, hit.entry});
        }
    }

    std::vector<EntityMention> out;
    for (auto& [concept_type, cands] : by_concept) {
        std::size_t free_from = 0;
        for (std::size_t i = 0; i < cands.size();) {
            // Longest candidate at this start position is the last one.
            std::size_t j = i;
            while (j + 1 < cands.size() && cands[j + 1].begin == cands[i].begin) ++j;
            const auto& best = cands[j];
            if (best.begin >= free_from) {
                auto [src_b, src_e] = folded.source_span(best.begin, best.end);
                EntityMention m;
                m.block = block_index;
                m.concept_type = concept_type;
                m.canonical_id = entries_[best.entry].canonical_id;
                m.surface = text::encode_utf8(original.substr(src_b, src_e - src_b));
                m.start = src_b;
                m.end = src_e;
                out.push_back(std::move(m));
                free_from = best.end;
            }
            i = j + 1;
        }
    }
    sort_mentions(out);
    return out;
}

std::vector<EntityMention> match_block(const Lexicon& lex, const Block& block) {
    auto original = text::decode_utf8(block.text);
    auto folded = text::fold_mapped(original);
    return lex.match(folded, original, block.index);
}

}  // namespace bsv
