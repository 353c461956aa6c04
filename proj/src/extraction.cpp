#include "bsv/extraction.hpp"

#include <optional>
#include <variant>

#include "bsv/error.hpp"
#include "bsv/parallel.hpp"
#include "bsv/text.hpp"

namespace bsv {

namespace {

// A mention loses when the other source has a same-concept overlapping
// mention that is longer, or equally long and from the dictionary.
bool beaten(const EntityMention& m, bool m_is_lexicon, const std::vector<EntityMention>& others) {
    for (const auto& o : others) {
        if (o.concept_type != m.concept_type || !o.overlaps(m)) continue;
        if (o.length() > m.length()) return true;
        if (o.length() == m.length() && !m_is_lexicon) return true;
    }
    return false;
}

}  // namespace

DocItemset extract_document(const Document& doc, const Lexicon& lex, const std::vector<PatternRule>& rules) {
    DocItemset set;
    set.doc_id = doc.id;
    for (const auto& block : doc.blocks) {
        auto original = text::decode_utf8(block.text);
        auto folded = text::fold_mapped(original);
        auto from_lex = lex.match(folded, original, block.index);
        auto from_rules = apply_rules(rules, folded, original, block.index);
        for (auto& m : from_lex)
            if (!beaten(m, true, from_rules)) set.mentions.push_back(m);
        for (auto& m : from_rules)
            if (!beaten(m, false, from_lex)) set.mentions.push_back(m);
    }
    for (auto& m : set.mentions) m.doc_id = doc.id;
    sort_mentions(set.mentions);
    return set;
}

void for_each_line_batch(std::istream& in, std::size_t batch_size,
                         const std::function<void(std::vector<std::pair<std::size_t, std::string>>&)>& sink) {
    std::vector<std::pair<std::size_t, std::string>> batch;
    batch.reserve(batch_size);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        batch.emplace_back(line_no, std::move(line));
        if (batch.size() >= batch_size) {
            sink(batch);
            batch.clear();
        }
    }
    if (!batch.empty()) sink(batch);
}

CorpusRunStats extract_corpus(std::istream& corpus, const Lexicon& lex, const std::vector<PatternRule>& rules,
                              const std::function<void(const DocItemset&)>& emit, unsigned jobs,
                              std::size_t batch_size) {
    CorpusRunStats stats;
    for_each_line_batch(corpus, batch_size, [&](auto& batch) {
        std::vector<std::variant<DocItemset, std::string>> results(batch.size());
        parallel_for(batch.size(), jobs, [&](std::size_t i) {
            try {
                auto doc = parse_document_json(batch[i].second);
                results[i] = extract_document(doc, lex, rules);
            } catch (const Error& e) {
                results[i] = std::string(e.what());
            }
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (auto* set = std::get_if<DocItemset>(&results[i])) {
                emit(*set);
                ++stats.documents;
            } else {
                stats.errors.push_back({batch[i].first, std::get<std::string>(results[i])});
            }
        }
    });
    return stats;
}

CorpusRunStats extract_corpus(std::istream& corpus, const Lexicon& lex, const std::vector<PatternRule>& rules,
                              std::ostream& out, unsigned jobs) {
    return extract_corpus(
        corpus, lex, rules, [&out](const DocItemset& set) { out << serialize_itemset(set) << '\n'; }, jobs);
}

}  // namespace bsv
