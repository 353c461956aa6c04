#include "bsv/mention.hpp"

#include <algorithm>
#include <tuple>

#include "bsv/error.hpp"

namespace bsv {

using nlohmann::json;
using nlohmann::ordered_json;

bool mention_less(const EntityMention& a, const EntityMention& b) noexcept {
    return std::tie(a.block, a.start, a.concept_type, a.end, a.canonical_id, a.surface) <
           std::tie(b.block, b.start, b.concept_type, b.end, b.canonical_id, b.surface);
}

void sort_mentions(std::vector<EntityMention>& mentions) {
    std::stable_sort(mentions.begin(), mentions.end(), mention_less);
}

ordered_json mention_to_json(const EntityMention& m) {
    ordered_json j;
    j["block"] = m.block;
    j["concept"] = concept_name(m.concept_type);
    j["id"] = m.canonical_id;
    j["surface"] = m.surface;
    j["start"] = m.start;
    j["end"] = m.end;
    if (m.norm) j["norm"] = *m.norm;
    return j;
}

EntityMention mention_from_json(const json& j, const std::string& doc_id) {
    try {
        EntityMention m;
        m.doc_id = doc_id;
        m.block = j.at("block").get<std::size_t>();
        auto c = parse_concept(j.at("concept").get<std::string>());
        if (!c) throw Error(Errc::format_error, "unknown concept " + j.at("concept").dump());
        m.concept_type = *c;
        m.canonical_id = j.at("id").get<std::string>();
        m.surface = j.at("surface").get<std::string>();
        m.start = j.at("start").get<std::size_t>();
        m.end = j.at("end").get<std::size_t>();
        if (auto n = j.find("norm"); n != j.end() && !n->is_null()) m.norm = n->get<std::string>();
        if (m.end <= m.start) throw Error(Errc::format_error, "mention span is empty");
        return m;
    } catch (const json::exception& e) {
        throw Error(Errc::format_error, std::string("bad mention: ") + e.what());
    }
}

ordered_json itemset_to_json(const DocItemset& set) {
    ordered_json j;
    j["doc_id"] = set.doc_id;
    ordered_json arr = ordered_json::array();
    for (const auto& m : set.mentions) arr.push_back(mention_to_json(m));
    j["mentions"] = std::move(arr);
    return j;
}

DocItemset itemset_from_json(const json& j) {
    DocItemset set;
    try {
        set.doc_id = j.at("doc_id").get<std::string>();
        for (const auto& m : j.at("mentions")) set.mentions.push_back(mention_from_json(m, set.doc_id));
    } catch (const json::exception& e) {
        throw Error(Errc::format_error, std::string("bad itemset: ") + e.what());
    }
    return set;
}

std::string serialize_itemset(const DocItemset& set) {
    return itemset_to_json(set).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace bsv
