#include "bsv/index.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "bsv/error.hpp"
#include "bsv/text.hpp"

namespace bsv {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kManifest = "manifest.json";
constexpr std::string_view kDocumentsFile = "documents.jsonl";
constexpr std::string_view kRelationsFile = "relations.jsonl";
constexpr std::string_view kConceptsFile = "concepts.json";
constexpr std::string_view kSpeciesFile = "postings/species.bin";
constexpr std::string_view kPairsFile = "postings/pairs.bin";
constexpr std::string_view kTokensFile = "postings/tokens.bin";
constexpr std::string_view kRegionsFile = "postings/regions.bin";

// Hash and manifest order.
constexpr std::string_view kDataFiles[] = {kDocumentsFile, kRelationsFile, kConceptsFile, kSpeciesFile,
                                           kPairsFile,     kTokensFile,    kRegionsFile};

std::string dump_line(const ordered_json& j) {
    return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "write failed for '" + path.string() + "'");
}

std::string hex(const unsigned char* data, std::size_t n) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0xF]);
    }
    return out;
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw Error(Errc::io_error, "sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view bytes) { EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()); }
    std::string hex_digest() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        return hex(md, len);
    }

private:
    EVP_MD_CTX* ctx_;
};

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex_digest();
}

/// Hash over (name, size, bytes) of every data file in kDataFiles order.
std::string content_hash(const std::vector<std::pair<std::string_view, std::string>>& files) {
    Sha256 h;
    for (const auto& [name, bytes] : files) {
        h.update(name);
        h.update(std::string_view("\0", 1));
        h.update(std::to_string(bytes.size()));
        h.update(std::string_view("\0", 1));
        h.update(bytes);
    }
    return h.hex_digest();
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw Error(Errc::format_error, "truncated postings file");
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::string> free_word_tokens(std::string_view word) {
    auto folded = text::fold32(text::decode_utf8(word));
    std::vector<std::string> out;
    for (const auto& t : text::tokenize(folded))
        out.push_back(text::encode_utf8(std::u32string_view(folded).substr(t.begin, t.end - t.begin)));
    return out;
}

void add_posting(postings::PostingMap& map, const std::string& term, std::uint32_t doc) {
    auto& list = map[term];
    if (list.empty() || list.back() != doc) list.push_back(doc);
}

std::string pair_key(std::string_view subject, std::string_view object) {
    std::string k(subject);
    k.push_back('\t');
    k.append(object);
    return k;
}

ordered_json optional_date(const std::optional<Date>& d) {
    return d ? ordered_json(d->to_string()) : ordered_json(nullptr);
}

}  // namespace

// ---------------------------------------------------------------- regions

RegionTable::RegionTable(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) by_key_.emplace(key(names_[i]), i);
}

RegionTable RegionTable::french_pre2016() {
    return RegionTable({
        "Alsace", "Aquitaine", "Auvergne", "Basse-Normandie", "Bourgogne", "Bretagne",
        "Centre", "Champagne-Ardenne", "Corse", "Franche-Comté", "Haute-Normandie", "Île-de-France",
        "Languedoc-Roussillon", "Limousin", "Lorraine", "Midi-Pyrénées", "Nord-Pas-de-Calais",
        "Pays de la Loire", "Picardie", "Poitou-Charentes", "Provence-Alpes-Côte d'Azur", "Rhône-Alpes",
    });
}

RegionTable RegionTable::load_file(const std::string& path) {
    auto content = read_file(path);
    std::vector<std::string> names;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        names.push_back(t);
    }
    return RegionTable(std::move(names));
}

std::string RegionTable::key(std::string_view raw) {
    if (raw.substr(0, 7) == "region:") raw.remove_prefix(7);
    auto folded = text::fold32(text::decode_utf8(raw));
    std::u32string out;
    bool sep = false;
    for (char32_t cp : folded) {
        if (text::is_alnum(cp)) {
            if (sep && !out.empty()) out.push_back(U'_');
            sep = false;
            out.push_back(cp);
        } else {
            sep = true;
        }
    }
    return text::encode_utf8(out);
}

std::optional<std::string> RegionTable::find(std::string_view raw) const {
    auto it = by_key_.find(key(raw));
    if (it == by_key_.end()) return std::nullopt;
    return names_[it->second];
}

std::string RegionTable::resolve(std::string_view raw) const {
    auto found = find(raw);
    return found ? *found : std::string(kUnknownRegion);
}

// ---------------------------------------------------------------- postings

namespace postings {

std::string encode(const PostingMap& map) {
    std::string out = "BSVP";
    put_u32(out, kIndexFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(map.size()));
    for (const auto& [term, docs] : map) {
        put_u32(out, static_cast<std::uint32_t>(term.size()));
        out += term;
        put_u32(out, static_cast<std::uint32_t>(docs.size()));
        for (auto d : docs) put_u32(out, d);
    }
    return out;
}

PostingMap decode(std::string_view bytes) {
    Reader r(bytes);
    if (r.take(4) != "BSVP") throw Error(Errc::format_error, "bad postings magic");
    if (r.u32() != static_cast<std::uint32_t>(kIndexFormatVersion))
        throw Error(Errc::format_error, "unsupported postings version");
    PostingMap map;
    auto terms = r.u32();
    for (std::uint32_t t = 0; t < terms; ++t) {
        std::string term(r.take(r.u32()));
        auto n = r.u32();
        std::vector<std::uint32_t> docs;
        docs.reserve(std::min<std::uint32_t>(n, 1u << 20));
        for (std::uint32_t i = 0; i < n; ++i) docs.push_back(r.u32());
        map.emplace(std::move(term), std::move(docs));
    }
    if (!r.done()) throw Error(Errc::format_error, "trailing bytes in postings file");
    return map;
}

}  // namespace postings

std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// ---------------------------------------------------------------- build

IndexSummary build_index(const std::vector<Document>& corpus, const std::vector<DocItemset>& itemsets,
                         const std::vector<Relation>& relations, const fs::path& out,
                         const IndexOptions& options) {
    std::unordered_map<std::string, std::uint32_t> ord_of;
    for (std::uint32_t i = 0; i < corpus.size(); ++i) {
        if (!ord_of.emplace(corpus[i].id, i).second)
            throw Error(Errc::inconsistent_inputs, "duplicate document id '" + corpus[i].id + "'");
    }
    std::vector<const DocItemset*> itemset_of(corpus.size(), nullptr);
    std::size_t mention_count = 0;
    for (const auto& set : itemsets) {
        auto it = ord_of.find(set.doc_id);
        if (it == ord_of.end())
            throw Error(Errc::inconsistent_inputs, "mentions reference unknown document '" + set.doc_id + "'");
        itemset_of[it->second] = &set;
        mention_count += set.mentions.size();
    }
    std::vector<std::vector<const Relation*>> rels_of(corpus.size());
    for (const auto& r : relations) {
        auto it = ord_of.find(r.doc_id);
        if (it == ord_of.end())
            throw Error(Errc::inconsistent_inputs, "relation references unknown document '" + r.doc_id + "'");
        rels_of[it->second].push_back(&r);
    }

    const auto& regions = options.regions;
    postings::PostingMap species, pairs, tokens, region_docs;
    std::string documents_bytes;
    for (std::uint32_t ord = 0; ord < corpus.size(); ++ord) {
        const auto& doc = corpus[ord];
        RelationContext ctx;
        if (!rels_of[ord].empty()) {
            ctx = rels_of[ord].front()->context;
        } else {
            DocItemset empty{doc.id, {}};
            ctx = header_context(itemset_of[ord] ? *itemset_of[ord] : empty, doc);
        }
        std::optional<Date> date = ctx.date ? Date::parse(*ctx.date) : std::nullopt;
        std::string region = ctx.region ? regions.resolve(*ctx.region) : std::string(kUnknownRegion);

        ordered_json row;
        row["ord"] = ord;
        row["id"] = doc.id;
        row["date"] = optional_date(date);
        row["region"] = region;
        row["issue"] = ctx.issue ? ordered_json(*ctx.issue) : ordered_json(nullptr);
        row["document"] = document_to_json(doc);
        documents_bytes += dump_line(row);
        documents_bytes.push_back('\n');

        add_posting(region_docs, region, ord);
        std::set<std::string> doc_tokens;
        for (const auto& b : doc.blocks) {
            auto folded = text::fold32(text::decode_utf8(b.text));
            for (const auto& t : text::tokenize(folded)) {
                if (t.kind == text::TokenKind::symbol) continue;
                doc_tokens.insert(text::encode_utf8(std::u32string_view(folded).substr(t.begin, t.end - t.begin)));
            }
        }
        for (const auto& t : doc_tokens) add_posting(tokens, t, ord);
        for (const auto* r : rels_of[ord]) {
            add_posting(species, r->subject.id, ord);
            add_posting(species, r->object.id, ord);
            add_posting(pairs, pair_key(r->subject.id, r->object.id), ord);
        }
    }

    std::vector<std::pair<std::uint32_t, const Relation*>> sorted_rels;
    for (std::uint32_t ord = 0; ord < corpus.size(); ++ord)
        for (const auto* r : rels_of[ord]) sorted_rels.emplace_back(ord, r);
    std::stable_sort(sorted_rels.begin(), sorted_rels.end(), [](const auto& a, const auto& b) {
        return std::tie(a.second->subject.id, a.second->object.id, a.first) <
               std::tie(b.second->subject.id, b.second->object.id, b.first);
    });
    std::string relations_bytes;
    for (const auto& [ord, r] : sorted_rels) {
        relations_bytes += serialize_relation(*r);
        relations_bytes.push_back('\n');
    }

    // Concept inventory for UI dropdowns.
    std::map<ConceptType, std::map<std::string, std::string>> inventory;
    if (options.lexicon) {
        for (const auto& e : options.lexicon->entries())
            inventory[e.concept_type].emplace(e.canonical_id, e.surfaces.front());
    } else {
        for (const auto& set : itemsets)
            for (const auto& m : set.mentions) inventory[m.concept_type].emplace(m.canonical_id, m.surface);
    }
    ordered_json concepts = ordered_json::array();
    for (auto c : kAllConcepts) {
        ordered_json entries = ordered_json::array();
        for (const auto& [id, label] : inventory[c]) entries.push_back({{"id", id}, {"label", label}});
        concepts.push_back({{"type", concept_name(c)}, {"entries", std::move(entries)}});
    }
    ordered_json concepts_doc;
    concepts_doc["concepts"] = std::move(concepts);

    std::vector<std::pair<std::string_view, std::string>> files = {
        {kDocumentsFile, std::move(documents_bytes)},
        {kRelationsFile, std::move(relations_bytes)},
        {kConceptsFile, dump_line(concepts_doc) + "\n"},
        {kSpeciesFile, postings::encode(species)},
        {kPairsFile, postings::encode(pairs)},
        {kTokensFile, postings::encode(tokens)},
        {kRegionsFile, postings::encode(region_docs)},
    };

    std::error_code ec;
    fs::create_directories(out / "postings", ec);
    if (ec) throw Error(Errc::io_error, "cannot create '" + out.string() + "': " + ec.message());
    fs::remove(out / kManifest, ec);

    ordered_json manifest;
    manifest["format"] = "bsv-index";
    manifest["format_version"] = kIndexFormatVersion;
    IndexSummary summary{corpus.size(), relations.size(), mention_count, content_hash(files)};
    manifest["content_hash"] = summary.content_hash;
    manifest["counts"] = {{"documents", summary.documents},
                          {"relations", summary.relations},
                          {"mentions", summary.mentions}};
    manifest["regions"] = regions.names();
    ordered_json file_list = ordered_json::array();
    for (const auto& [name, bytes] : files) {
        write_file(out / name, bytes);
        file_list.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    }
    manifest["files"] = std::move(file_list);
    // The manifest goes last: its presence marks a complete index.
    write_file(out / kManifest, manifest.dump(2) + "\n");
    return summary;
}

// ---------------------------------------------------------------- open

Index Index::open(const fs::path& dir) {
    Index idx;
    if (!fs::is_directory(dir)) throw Error(Errc::io_error, "index directory '" + dir.string() + "' not found");
    try {
        idx.manifest_ = json::parse(read_file(dir / kManifest));
    } catch (const json::parse_error& e) {
        throw Error(Errc::io_error, std::string("corrupt manifest: ") + e.what());
    }
    if (idx.manifest_.value("format", "") != "bsv-index" ||
        idx.manifest_.value("format_version", 0) != kIndexFormatVersion)
        throw Error(Errc::io_error, "unsupported index format in '" + dir.string() + "'");

    std::vector<std::pair<std::string_view, std::string>> files;
    for (auto name : kDataFiles) files.emplace_back(name, read_file(dir / name));
    if (content_hash(files) != idx.manifest_.value("content_hash", ""))
        throw Error(Errc::io_error, "index content hash mismatch in '" + dir.string() + "'");

    try {
        idx.regions_ = RegionTable(idx.manifest_.at("regions").get<std::vector<std::string>>());

        std::istringstream docs(files[0].second);
        std::string line;
        while (std::getline(docs, line)) {
            if (line.empty()) continue;
            auto j = json::parse(line);
            IndexedDocument d;
            d.doc = document_from_json(j.at("document"));
            if (!j.at("date").is_null()) d.date = Date::parse(j.at("date").get<std::string>());
            d.region = j.at("region").get<std::string>();
            if (!j.at("issue").is_null()) d.issue = j.at("issue").get<std::string>();
            idx.doc_by_id_.emplace(d.doc.id, static_cast<std::uint32_t>(idx.docs_.size()));
            idx.docs_.push_back(std::move(d));
        }

        idx.relations_by_doc_.resize(idx.docs_.size());
        std::istringstream rels(files[1].second);
        while (std::getline(rels, line)) {
            if (line.empty()) continue;
            auto r = relation_from_json(json::parse(line));
            auto it = idx.doc_by_id_.find(r.doc_id);
            if (it == idx.doc_by_id_.end()) throw Error(Errc::io_error, "relation for unknown document '" + r.doc_id + "'");
            auto ri = static_cast<std::uint32_t>(idx.relations_.size());
            idx.relations_by_doc_[it->second].push_back(ri);
            idx.relations_by_pair_[{r.subject.id, r.object.id}].push_back(ri);
            idx.relations_.push_back(std::move(r));
        }
        idx.concepts_ = json::parse(files[2].second);
        idx.species_ = postings::decode(files[3].second);
        idx.pairs_ = postings::decode(files[4].second);
        idx.tokens_ = postings::decode(files[5].second);
        idx.region_docs_ = postings::decode(files[6].second);
    } catch (const json::exception& e) {
        throw Error(Errc::io_error, std::string("corrupt index: ") + e.what());
    } catch (const Error& e) {
        throw Error(Errc::io_error, std::string("corrupt index: ") + e.what());
    }
    return idx;
}

// ---------------------------------------------------------------- queries

void Query::validate() const {
    if (!crop && !disease && !pest) throw Error(Errc::invalid_query, "query needs a crop, disease or pest");
    if (disease && pest) throw Error(Errc::invalid_query, "disease and pest cannot be combined");
    if (date_from && date_to && *date_from > *date_to)
        throw Error(Errc::invalid_query, "date_from is after date_to");
}

std::string Index::resolve_species(std::string_view raw, std::optional<ConceptType> default_concept) const {
    if (raw.find(':') != std::string_view::npos) return std::string(raw);
    if (default_concept) return std::string(concept_name(*default_concept)) + ":" + std::string(raw);
    for (auto c : kAllConcepts) {
        auto id = std::string(concept_name(c)) + ":" + std::string(raw);
        if (species_.count(id)) return id;
    }
    return std::string(raw);
}

std::vector<std::uint32_t> Index::docs_for_species(const std::string& id) const {
    auto it = species_.find(id);
    return it == species_.end() ? std::vector<std::uint32_t>{} : it->second;
}

std::vector<std::uint32_t> Index::docs_for_pair(const std::string& subject, const std::string& object) const {
    auto it = pairs_.find(pair_key(subject, object));
    return it == pairs_.end() ? std::vector<std::uint32_t>{} : it->second;
}

QueryResult Index::search(const Query& q) const {
    q.validate();
    std::vector<std::uint32_t> candidates;
    if (q.is_pair()) {
        auto crop = resolve_species(*q.crop, ConceptType::crop);
        auto other = q.disease ? resolve_species(*q.disease, ConceptType::disease)
                               : resolve_species(*q.pest, ConceptType::pest);
        candidates = docs_for_pair(crop, other);
    } else if (q.crop) {
        candidates = docs_for_species(resolve_species(*q.crop, ConceptType::crop));
    } else if (q.disease) {
        candidates = docs_for_species(resolve_species(*q.disease, ConceptType::disease));
    } else {
        candidates = docs_for_species(resolve_species(*q.pest, ConceptType::pest));
    }

    if (q.free_word) {
        for (const auto& tok : free_word_tokens(*q.free_word)) {
            auto it = tokens_.find(tok);
            candidates = it == tokens_.end() ? std::vector<std::uint32_t>{} : intersect(candidates, it->second);
        }
    }
    if (q.region) {
        std::string region;
        if (RegionTable::key(*q.region) == kUnknownRegion) {
            region = kUnknownRegion;
        } else if (auto found = regions_.find(*q.region)) {
            region = *found;
        } else {
            throw Error(Errc::invalid_query, "unknown region '" + *q.region + "'");
        }
        auto it = region_docs_.find(region);
        candidates = it == region_docs_.end() ? std::vector<std::uint32_t>{} : intersect(candidates, it->second);
    }

    const bool dated = q.date_from || q.date_to;
    std::vector<std::uint32_t> hits;
    for (auto ord : candidates) {
        const auto& d = docs_[ord];
        if (dated) {
            if (!d.date) continue;
            if (q.date_from && *d.date < *q.date_from) continue;
            if (q.date_to && *d.date > *q.date_to) continue;
        }
        hits.push_back(ord);
    }
    std::sort(hits.begin(), hits.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto& da = docs_[a];
        const auto& db = docs_[b];
        if (da.date.has_value() != db.date.has_value()) return da.date.has_value();
        if (da.date && *da.date != *db.date)
            return q.sort == SortOrder::date_desc ? *da.date > *db.date : *da.date < *db.date;
        return da.doc.id < db.doc.id;
    });

    QueryResult result;
    std::map<std::string, std::size_t> counts;
    for (auto ord : hits) {
        const auto& d = docs_[ord];
        result.docs.push_back({d.doc.id, d.date, d.region, d.issue});
        ++counts[d.region];
    }
    for (const auto& name : regions_.names()) result.region_hits.emplace_back(name, counts[name]);
    result.region_hits.emplace_back(std::string(kUnknownRegion), counts[std::string(kUnknownRegion)]);
    result.total = result.docs.size();
    return result;
}

std::vector<std::pair<std::string, std::size_t>> Index::partners(std::string_view region,
                                                                 std::string_view species) const {
    std::string name;
    if (RegionTable::key(region) == kUnknownRegion) {
        name = kUnknownRegion;
    } else if (auto found = regions_.find(region)) {
        name = *found;
    } else {
        throw Error(Errc::unknown_region, "unknown region '" + std::string(region) + "'");
    }
    auto id = resolve_species(species, std::nullopt);
    std::map<std::string, std::size_t> counts;
    auto docs = region_docs_.find(name);
    if (docs != region_docs_.end()) {
        for (auto ord : docs->second) {
            std::set<std::string> linked;
            for (auto ri : relations_by_doc_[ord]) {
                const auto& r = relations_[ri];
                if (r.subject.id == id) linked.insert(r.object.id);
                if (r.object.id == id) linked.insert(r.subject.id);
            }
            for (const auto& p : linked) ++counts[p];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

std::vector<Citation> Index::citations(std::string_view subject, std::string_view object,
                                       std::optional<std::string_view> region) const {
    auto s = resolve_species(subject, std::nullopt);
    auto o = resolve_species(object, std::nullopt);
    std::vector<Citation> out;
    auto it = relations_by_pair_.find({s, o});
    if (it == relations_by_pair_.end()) return out;
    std::optional<std::string> region_name;
    if (region) {
        if (RegionTable::key(*region) == kUnknownRegion) region_name = std::string(kUnknownRegion);
        else if (auto found = regions_.find(*region)) region_name = *found;
        else return out;
    }
    for (auto ri : it->second) {
        const auto& r = relations_[ri];
        const auto& d = docs_[doc_by_id_.at(r.doc_id)];
        if (region_name && d.region != *region_name) continue;
        for (const auto& ev : r.evidence) out.push_back({r.doc_id, d.date, d.region, ev.block, ev.snippet});
    }
    std::stable_sort(out.begin(), out.end(), [](const Citation& a, const Citation& b) {
        if (a.date.has_value() != b.date.has_value()) return a.date.has_value();
        if (a.date && *a.date != *b.date) return *a.date > *b.date;
        return std::tie(a.doc_id, a.block) < std::tie(b.doc_id, b.block);
    });
    return out;
}

const IndexedDocument* Index::document(std::string_view id) const {
    auto it = doc_by_id_.find(std::string(id));
    return it == doc_by_id_.end() ? nullptr : &docs_[it->second];
}

ordered_json doc_hit_to_json(const DocHit& h) {
    ordered_json j;
    j["doc_id"] = h.doc_id;
    j["date"] = optional_date(h.date);
    j["region"] = h.region;
    j["issue"] = h.issue ? ordered_json(*h.issue) : ordered_json(nullptr);
    return j;
}

ordered_json query_result_to_json(const QueryResult& r) {
    ordered_json j;
    j["total"] = r.total;
    ordered_json docs = ordered_json::array();
    for (const auto& d : r.docs) docs.push_back(doc_hit_to_json(d));
    j["docs"] = std::move(docs);
    ordered_json hits = ordered_json::object();
    for (const auto& [region, n] : r.region_hits) hits[region] = n;
    j["region_hits"] = std::move(hits);
    return j;
}

ordered_json citation_to_json(const Citation& c) {
    ordered_json j;
    j["doc_id"] = c.doc_id;
    j["date"] = optional_date(c.date);
    j["region"] = c.region;
    j["block"] = c.block;
    j["snippet"] = c.snippet;
    return j;
}

}  // namespace bsv
