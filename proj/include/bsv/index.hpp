#pragma once

// Immutable on-disk index over documents, mentions and relations, and the
// portal queries answered from it. Layout and formats: docs/index-format.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bsv/date.hpp"
#include "bsv/document.hpp"
#include "bsv/lexicon.hpp"
#include "bsv/mention.hpp"
#include "bsv/relation.hpp"
#include "json.hpp"

namespace bsv {

inline constexpr int kIndexFormatVersion = 1;
inline constexpr std::string_view kUnknownRegion = "unknown";

/// Closed list of region names. Lookups fold case/diacritics and treat
/// punctuation runs as '_', and accept lexicon ids such as "region:centre".
class RegionTable {
public:
    RegionTable() = default;
    explicit RegionTable(std::vector<std::string> names);

    /// The 22 metropolitan French regions in force until 2016.
    static RegionTable french_pre2016();
    /// One region name per line; '#' comments.
    static RegionTable load_file(const std::string& path);

    const std::vector<std::string>& names() const noexcept { return names_; }
    /// Canonical name, or nullopt when the value is not in the list.
    std::optional<std::string> find(std::string_view raw) const;
    /// Canonical name or "unknown".
    std::string resolve(std::string_view raw) const;

    static std::string key(std::string_view raw);

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> by_key_;
};

namespace postings {

using PostingMap = std::map<std::string, std::vector<std::uint32_t>>;

/// Length-prefixed little-endian binary encoding: "BSVP", u32 version,
/// u32 term count, then per term u32 length, bytes, u32 n, n x u32.
std::string encode(const PostingMap& map);
/// Throws Error(format_error) on truncated or malformed input.
PostingMap decode(std::string_view bytes);

}  // namespace postings

struct IndexOptions {
    RegionTable regions = RegionTable::french_pre2016();
    /// When set, the concept inventory lists the whole lexicon instead of
    /// the ids seen in mentions.
    const Lexicon* lexicon = nullptr;
};

struct IndexSummary {
    std::size_t documents = 0;
    std::size_t relations = 0;
    std::size_t mentions = 0;
    std::string content_hash;
};

/// Writes the index directory. Throws Error(inconsistent_inputs) when a
/// relation or itemset names a document absent from the corpus (or ids
/// repeat), Error(io_error) on write failure.
IndexSummary build_index(const std::vector<Document>& corpus, const std::vector<DocItemset>& itemsets,
                         const std::vector<Relation>& relations, const std::filesystem::path& out,
                         const IndexOptions& options = {});

enum class SortOrder { date_desc, date_asc };

struct Query {
    std::optional<std::string> crop;
    std::optional<std::string> disease;
    std::optional<std::string> pest;
    std::optional<Date> date_from;
    std::optional<Date> date_to;
    std::optional<std::string> free_word;
    std::optional<std::string> region;
    SortOrder sort = SortOrder::date_desc;

    /// Throws Error(invalid_query).
    void validate() const;
    bool is_pair() const noexcept { return crop && (disease || pest); }
};

struct DocHit {
    std::string doc_id;
    std::optional<Date> date;
    std::string region;
    std::optional<std::string> issue;

    bool operator==(const DocHit&) const = default;
};

struct QueryResult {
    std::vector<DocHit> docs;
    /// Every listed region plus "unknown", in region-list order.
    std::vector<std::pair<std::string, std::size_t>> region_hits;
    std::size_t total = 0;
};

struct Citation {
    std::string doc_id;
    std::optional<Date> date;
    std::string region;
    std::size_t block = 0;
    std::string snippet;

    bool operator==(const Citation&) const = default;
};

struct IndexedDocument {
    Document doc;
    std::optional<Date> date;
    std::string region;
    std::optional<std::string> issue;
};

class Index {
public:
    /// Loads and verifies an index directory. Throws Error(io_error) when
    /// files are missing or the content hash does not match the manifest.
    static Index open(const std::filesystem::path& dir);

    QueryResult search(const Query& q) const;
    /// Throws Error(unknown_region).
    std::vector<std::pair<std::string, std::size_t>> partners(std::string_view region,
                                                              std::string_view species) const;
    std::vector<Citation> citations(std::string_view subject, std::string_view object,
                                    std::optional<std::string_view> region = std::nullopt) const;

    const IndexedDocument* document(std::string_view id) const;
    const std::vector<IndexedDocument>& documents() const noexcept { return docs_; }
    const std::vector<Relation>& relations() const noexcept { return relations_; }
    const RegionTable& regions() const noexcept { return regions_; }
    const nlohmann::json& manifest() const noexcept { return manifest_; }
    const nlohmann::json& concepts() const noexcept { return concepts_; }

    /// "ble" -> "crop:ble" given a default concept; ids containing ':' pass
    /// through. Bare ids without a default are looked up among indexed species.
    std::string resolve_species(std::string_view raw, std::optional<ConceptType> default_concept) const;

private:
    std::vector<std::uint32_t> docs_for_species(const std::string& id) const;
    std::vector<std::uint32_t> docs_for_pair(const std::string& subject, const std::string& object) const;

    nlohmann::json manifest_;
    nlohmann::json concepts_;
    RegionTable regions_;
    std::vector<IndexedDocument> docs_;
    std::unordered_map<std::string, std::uint32_t> doc_by_id_;
    std::vector<Relation> relations_;
    std::vector<std::vector<std::uint32_t>> relations_by_doc_;
    std::map<std::pair<std::string, std::string>, std::vector<std::uint32_t>> relations_by_pair_;
    postings::PostingMap species_;
    postings::PostingMap pairs_;
    postings::PostingMap tokens_;
    postings::PostingMap region_docs_;
};

nlohmann::ordered_json query_result_to_json(const QueryResult& r);
nlohmann::ordered_json citation_to_json(const Citation& c);
nlohmann::ordered_json doc_hit_to_json(const DocHit& h);

/// Sorted-intersection helper shared by the query paths.
std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

}  // namespace bsv
