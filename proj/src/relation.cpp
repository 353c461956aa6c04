#include "bsv/relation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <utility>

#include "bsv/error.hpp"
#include "bsv/text.hpp"

namespace bsv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool contains(const std::vector<ConceptType>& v, ConceptType c) {
    return std::find(v.begin(), v.end(), c) != v.end();
}

std::vector<ConceptType> concepts_from_json(const json& j, const char* field) {
    std::vector<ConceptType> out;
    if (!j.is_array()) throw Error(Errc::format_error, std::string("'") + field + "' must be an array");
    for (const auto& v : j) {
        auto c = v.is_string() ? parse_concept(v.get<std::string>()) : std::nullopt;
        if (!c) throw Error(Errc::format_error, std::string("bad concept in '") + field + "': " + v.dump());
        if (!contains(out, *c)) out.push_back(*c);
    }
    return out;
}

ordered_json concepts_to_json(const std::vector<ConceptType>& v) {
    ordered_json arr = ordered_json::array();
    for (auto c : v) arr.push_back(concept_name(c));
    return arr;
}

ordered_json optional_string(const std::optional<std::string>& s) {
    return s ? ordered_json(*s) : ordered_json(nullptr);
}

std::optional<std::string> read_optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

// Mentions grouped by block ordinal, preserving canonical order.
std::vector<std::vector<const EntityMention*>> by_block(const DocItemset& itemset, std::size_t block_count,
                                                        const std::set<std::size_t>& avoided) {
    std::vector<std::vector<const EntityMention*>> out(block_count);
    for (const auto& m : itemset.mentions) {
        if (m.block >= block_count || avoided.count(m.block)) continue;
        out[m.block].push_back(&m);
    }
    return out;
}

class RelationCollector {
public:
    RelationCollector(const Document& doc, RelationSource source) : doc_(doc), source_(source) {}

    void add(const EntityMention& target, const EntityMention& partner,
             const std::vector<const EntityMention*>& damage, std::size_t unit) {
        auto key = std::make_pair(target.canonical_id, partner.canonical_id);
        auto [it, inserted] = relations_.try_emplace(key);
        Relation& r = it->second;
        if (inserted) {
            r.doc_id = doc_.id;
            r.subject = {target.concept_type, target.canonical_id};
            r.object = {partner.concept_type, partner.canonical_id};
            r.source = source_;
        }
        for (const auto* d : damage)
            if (std::find(r.damage.begin(), r.damage.end(), d->surface) == r.damage.end())
                r.damage.push_back(d->surface);
        Evidence ev{partner.block, make_snippet(doc_.blocks[partner.block].text, partner.start, partner.end)};
        if (std::find(r.evidence.begin(), r.evidence.end(), ev) == r.evidence.end()) r.evidence.push_back(ev);
        if (std::find(r.units.begin(), r.units.end(), unit) == r.units.end()) r.units.push_back(unit);
    }

    std::vector<Relation> finish(const RelationContext& ctx) {
        std::vector<Relation> out;
        out.reserve(relations_.size());
        for (auto& [key, r] : relations_) {
            r.context = ctx;
            std::stable_sort(r.evidence.begin(), r.evidence.end(),
                             [](const Evidence& a, const Evidence& b) { return a.block < b.block; });
            std::sort(r.units.begin(), r.units.end());
            out.push_back(std::move(r));
        }
        return out;
    }

private:
    const Document& doc_;
    RelationSource source_;
    std::map<std::pair<std::string, std::string>, Relation> relations_;
};

}  // namespace

void RelationConfig::validate() const {
    if (contains(partners, target))
        throw Error(Errc::format_error, "target concept '" + std::string(concept_name(target)) + "' is also a partner");
    for (const auto& rule : avoid) {
        if (text::fold(rule.start_phrase).empty()) throw Error(Errc::format_error, "empty avoid start phrase");
        if (rule.end_phrase && text::fold(*rule.end_phrase).empty())
            throw Error(Errc::format_error, "empty avoid end phrase");
    }
}

bool RelationConfig::is_partner(ConceptType c) const noexcept { return contains(partners, c); }
bool RelationConfig::is_attached(ConceptType c) const noexcept { return contains(attach, c); }
bool RelationConfig::uses_context(ConceptType c) const noexcept { return contains(context, c); }

RelationConfig relation_config_from_json(const json& j) {
    RelationConfig cfg;
    try {
        if (!j.is_object()) throw Error(Errc::format_error, "relation config must be a JSON object");
        if (auto t = j.find("target"); t != j.end()) {
            auto c = t->is_string() ? parse_concept(t->get<std::string>()) : std::nullopt;
            if (!c) throw Error(Errc::format_error, "bad target concept " + t->dump());
            cfg.target = *c;
        }
        if (auto p = j.find("partners"); p != j.end()) cfg.partners = concepts_from_json(*p, "partners");
        if (auto a = j.find("attach"); a != j.end()) cfg.attach = concepts_from_json(*a, "attach");
        if (auto c = j.find("context"); c != j.end()) cfg.context = concepts_from_json(*c, "context");
        if (auto av = j.find("avoid"); av != j.end()) {
            if (!av->is_array()) throw Error(Errc::format_error, "'avoid' must be an array");
            for (const auto& rule : *av) {
                AvoidRule r;
                r.start_phrase = rule.at("start").get<std::string>();
                r.end_phrase = read_optional_string(rule, "end");
                cfg.avoid.push_back(std::move(r));
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::format_error, std::string("bad relation config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ordered_json relation_config_to_json(const RelationConfig& cfg) {
    ordered_json j;
    j["target"] = concept_name(cfg.target);
    j["partners"] = concepts_to_json(cfg.partners);
    j["attach"] = concepts_to_json(cfg.attach);
    j["context"] = concepts_to_json(cfg.context);
    ordered_json avoid = ordered_json::array();
    for (const auto& r : cfg.avoid) avoid.push_back({{"start", r.start_phrase}, {"end", optional_string(r.end_phrase)}});
    j["avoid"] = std::move(avoid);
    return j;
}

RelationConfig load_relation_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read relation config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return relation_config_from_json(json::parse(buf.str()));
    } catch (const json::parse_error& e) {
        throw Error(Errc::format_error, std::string("relation config: ") + e.what());
    }
}

std::string_view relation_source_name(RelationSource s) noexcept {
    return s == RelationSource::heading ? "H1" : "PARA";
}

ordered_json relation_to_json(const Relation& r) {
    ordered_json j;
    j["doc_id"] = r.doc_id;
    j["subject"] = {{"concept", concept_name(r.subject.concept_type)}, {"id", r.subject.id}};
    j["object"] = {{"concept", concept_name(r.object.concept_type)}, {"id", r.object.id}};
    j["damage"] = r.damage;
    j["context"] = {{"date", optional_string(r.context.date)},
                    {"region", optional_string(r.context.region)},
                    {"issue", optional_string(r.context.issue)}};
    ordered_json ev = ordered_json::array();
    for (const auto& e : r.evidence) ev.push_back({{"block", e.block}, {"snippet", e.snippet}});
    j["evidence"] = std::move(ev);
    j["units"] = r.units;
    j["source"] = relation_source_name(r.source);
    return j;
}

Relation relation_from_json(const json& j) {
    try {
        Relation r;
        r.doc_id = j.at("doc_id").get<std::string>();
        auto ref = [](const json& e) {
            auto c = parse_concept(e.at("concept").get<std::string>());
            if (!c) throw Error(Errc::format_error, "bad concept " + e.at("concept").dump());
            return EntityRef{*c, e.at("id").get<std::string>()};
        };
        r.subject = ref(j.at("subject"));
        r.object = ref(j.at("object"));
        r.damage = j.at("damage").get<std::vector<std::string>>();
        const auto& ctx = j.at("context");
        r.context = {read_optional_string(ctx, "date"), read_optional_string(ctx, "region"),
                     read_optional_string(ctx, "issue")};
        for (const auto& e : j.at("evidence"))
            r.evidence.push_back({e.at("block").get<std::size_t>(), e.at("snippet").get<std::string>()});
        if (auto u = j.find("units"); u != j.end()) r.units = u->get<std::vector<std::size_t>>();
        auto src = j.at("source").get<std::string>();
        if (src == "H1") r.source = RelationSource::heading;
        else if (src == "PARA") r.source = RelationSource::paragraph;
        else throw Error(Errc::format_error, "bad relation source '" + src + "'");
        if (r.evidence.empty()) throw Error(Errc::format_error, "relation without evidence");
        return r;
    } catch (const json::exception& e) {
        throw Error(Errc::format_error, std::string("bad relation: ") + e.what());
    }
}

std::string serialize_relation(const Relation& r) {
    return relation_to_json(r).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::set<std::size_t> mark_avoid(const Document& doc, const RelationConfig& cfg) {
    std::set<std::size_t> out;
    if (cfg.avoid.empty()) return out;
    std::vector<std::string> folded;
    folded.reserve(doc.blocks.size());
    for (const auto& b : doc.blocks) folded.push_back(text::fold(b.text));
    for (const auto& rule : cfg.avoid) {
        auto start = text::fold(rule.start_phrase);
        std::size_t open = 0;
        while (open < folded.size() && !starts_with(folded[open], start)) ++open;
        if (open == folded.size()) continue;
        std::size_t close = folded.size();
        if (rule.end_phrase) {
            auto end = text::fold(*rule.end_phrase);
            for (std::size_t i = open + 1; i < folded.size(); ++i) {
                if (starts_with(folded[i], end)) {
                    close = i;
                    break;
                }
            }
        }
        for (std::size_t i = open; i < close; ++i) out.insert(i);
    }
    return out;
}

RelationContext header_context(const DocItemset& itemset, const Document& doc, const RelationConfig& cfg) {
    RelationContext ctx;
    for (const auto& m : itemset.mentions) {
        if (m.block >= doc.blocks.size() || doc.blocks[m.block].kind != BlockKind::header) continue;
        if (!cfg.uses_context(m.concept_type)) continue;
        switch (m.concept_type) {
            case ConceptType::pub_time:
                if (!ctx.date && m.norm) ctx.date = m.norm;
                break;
            case ConceptType::region:
                if (!ctx.region) ctx.region = m.canonical_id;
                break;
            case ConceptType::issue_no:
                if (!ctx.issue) ctx.issue = m.surface;
                break;
            default:
                break;
        }
    }
    if (doc.meta.date) ctx.date = doc.meta.date->to_string();
    if (doc.meta.region) ctx.region = doc.meta.region;
    if (doc.meta.issue) ctx.issue = doc.meta.issue;
    return ctx;
}

std::string make_snippet(std::string_view block_text, std::size_t start, std::size_t end) {
    auto cps = text::decode_utf8(block_text);
    std::size_t b = 0;
    std::size_t e = cps.size();
    if (cps.size() > kSnippetMax) {
        std::size_t center = (start + std::min(end, cps.size())) / 2;
        b = center > kSnippetMax / 2 ? center - kSnippetMax / 2 : 0;
        b = std::min(b, cps.size() - kSnippetMax);
        e = b + kSnippetMax;
    }
    std::u32string out;
    bool space = false;
    for (std::size_t i = b; i < e; ++i) {
        if (text::is_space(cps[i])) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(U' ');
        space = false;
        out.push_back(cps[i]);
    }
    return text::encode_utf8(out);
}

std::vector<Relation> relate_document(const Document& doc, const DocItemset& itemset, const RelationConfig& cfg) {
    if (itemset.doc_id != doc.id)
        throw Error(Errc::mismatched_itemset, "itemset '" + itemset.doc_id + "' does not belong to '" + doc.id + "'");
    auto avoided = mark_avoid(doc, cfg);
    auto blocks = by_block(itemset, doc.blocks.size(), avoided);

    auto pick = [&](std::size_t block, auto pred) {
        std::vector<const EntityMention*> out;
        for (const auto* m : blocks[block])
            if (pred(m->concept_type)) out.push_back(m);
        return out;
    };
    auto is_target = [&](ConceptType c) { return c == cfg.target; };
    auto is_partner = [&](ConceptType c) { return cfg.is_partner(c); };
    auto is_attached = [&](ConceptType c) { return cfg.is_attached(c); };

    const bool structured = doc.has_headings();
    RelationCollector collector(doc, structured ? RelationSource::heading : RelationSource::paragraph);
    if (structured) {
        for (const auto& span : sectionize(doc)) {
            if (avoided.count(span.title_block)) continue;
            auto targets = pick(span.title_block, is_target);
            if (targets.empty()) continue;
            for (std::size_t b = span.body_begin; b < span.body_end; ++b) {
                auto partners = pick(b, is_partner);
                if (partners.empty()) continue;
                auto damage = pick(b, is_attached);
                for (const auto* t : targets)
                    for (const auto* p : partners) collector.add(*t, *p, damage, span.title_block);
            }
        }
    } else {
        for (const auto& block : doc.blocks) {
            if (block.kind != BlockKind::paragraph || avoided.count(block.index)) continue;
            auto targets = pick(block.index, is_target);
            auto partners = pick(block.index, is_partner);
            if (targets.empty() || partners.empty()) continue;
            auto damage = pick(block.index, is_attached);
            for (const auto* t : targets)
                for (const auto* p : partners) collector.add(*t, *p, damage, block.index);
        }
    }

    DocItemset visible;
    visible.doc_id = itemset.doc_id;
    for (const auto& m : itemset.mentions)
        if (!avoided.count(m.block)) visible.mentions.push_back(m);
    return collector.finish(header_context(visible, doc, cfg));
}

std::size_t count_units(const Document& doc, const RelationConfig& cfg) {
    auto avoided = mark_avoid(doc, cfg);
    std::size_t n = 0;
    if (doc.has_headings()) {
        for (const auto& span : sectionize(doc))
            if (!avoided.count(span.title_block)) ++n;
    } else {
        for (const auto& b : doc.blocks)
            if (b.kind == BlockKind::paragraph && !avoided.count(b.index)) ++n;
    }
    return n;
}

double pmi(std::size_t unit_count, std::size_t pair_count, std::size_t first_count, std::size_t second_count) {
    return std::log2(static_cast<double>(unit_count) * static_cast<double>(pair_count) /
                     (static_cast<double>(first_count) * static_cast<double>(second_count)));
}

std::vector<CoocScore> cooc_scores(const std::vector<Relation>& relations, std::size_t unit_count) {
    using Unit = std::pair<std::string, std::size_t>;
    std::map<std::pair<std::string, std::string>, std::set<Unit>> pair_units;
    std::map<std::string, std::set<Unit>> entity_units;
    for (const auto& r : relations) {
        for (auto u : r.units) {
            Unit unit{r.doc_id, u};
            pair_units[{r.subject.id, r.object.id}].insert(unit);
            entity_units[r.subject.id].insert(unit);
            entity_units[r.object.id].insert(unit);
        }
    }
    std::vector<CoocScore> out;
    for (const auto& [pair, units] : pair_units) {
        CoocScore s{pair.first, pair.second, units.size(), std::nullopt};
        auto ca = entity_units[pair.first].size();
        auto cb = entity_units[pair.second].size();
        if (unit_count > 0 && ca > 0 && cb > 0) s.pmi = pmi(unit_count, s.count, ca, cb);
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const CoocScore& a, const CoocScore& b) {
        if (a.count != b.count) return a.count > b.count;
        return std::tie(a.first, a.second) < std::tie(b.first, b.second);
    });
    return out;
}

ordered_json cooc_to_json(const CoocScore& s) {
    ordered_json j;
    j["pair"] = {s.first, s.second};
    j["count"] = s.count;
    j["pmi"] = s.pmi ? ordered_json(*s.pmi) : ordered_json(nullptr);
    return j;
}

}  // namespace bsv
