#include "support.hpp"

#include <bsv/error.hpp>
#include <bsv/extraction.hpp>
#include <bsv/text.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

namespace bsvtest {

using namespace bsv;

fs::path source_dir() { return fs::path(BSV_SOURCE_DIR); }
fs::path data_path(const std::string& name) { return source_dir() / "data" / name; }
fs::path golden_path(const std::string& name) { return source_dir() / "tests" / "data" / "golden" / name; }
std::string bsvmine_path() { return BSVMINE_PATH; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

TempDir::TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = fs::temp_directory_path() / (tag + "-" + std::to_string(rng() % 100000000));
        if (fs::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

CommandResult run_command(const std::string& cmd) {
    CommandResult r;
    std::string full = cmd + " 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

const SampleData& sample_data() {
    static const SampleData data = [] {
        SampleData d;
        d.lexicon = Lexicon::load_file(data_path("lexicon.tsv").string());
        d.rules = load_rules_file(data_path("rules.txt").string());
        d.config = load_relation_config(data_path("relation.json").string());
        return d;
    }();
    return data;
}

std::vector<Document> load_corpus(const fs::path& jsonl) {
    std::istringstream in(read_file(jsonl));
    std::vector<Document> docs;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) docs.push_back(parse_document_json(line));
    return docs;
}

PipelineRun run_pipeline(const std::vector<Document>& docs, const SampleData& data) {
    PipelineRun run;
    run.docs = docs;
    for (const auto& d : docs) {
        run.itemsets.push_back(extract_document(d, data.lexicon, data.rules));
        auto rels = relate_document(d, run.itemsets.back(), data.config);
        run.relations.insert(run.relations.end(), rels.begin(), rels.end());
    }
    return run;
}

const Index& golden_index() {
    static TempDir dir("bsv-golden-index");
    static const Index idx = [] {
        const auto& data = sample_data();
        auto run = run_pipeline(load_corpus(golden_path("corpus.jsonl")), data);
        IndexOptions opt;
        opt.lexicon = &data.lexicon;
        build_index(run.docs, run.itemsets, run.relations, dir / "idx", opt);
        return Index::open(dir / "idx");
    }();
    return idx;
}

// ---------------------------------------------------------------- lexicon

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Fold table for the generator alphabet only.
char32_t oracle_fold(char32_t c) {
    switch (c) {
        case U'é': case U'è': case U'ê': case U'É': case U'È': return U'e';
        case U'à': case U'À': return U'a';
        case U'ù': case U'Ù': return U'u';
        case U'ô': case U'Ô': return U'o';
        default: break;
    }
    if (c >= U'A' && c <= U'Z') return c - U'A' + U'a';
    return c;
}

bool oracle_alnum(char32_t c) {
    char32_t f = oracle_fold(c);
    return (f >= U'a' && f <= U'z') || (f >= U'0' && f <= U'9');
}

bool oracle_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n'; }

const std::u32string kPlainLetters = U"abeilorsu";

}  // namespace

std::vector<EntityMention> naive_lexicon_scan(const std::vector<OracleSurface>& surfaces,
                                              std::u32string_view original, std::size_t block) {
    struct Hit {
        std::size_t start, end;
        const OracleSurface* s;
    };
    const std::size_t n = original.size();
    auto boundary = [&](std::size_t p) { return p == 0 || p >= n || !(oracle_alnum(original[p - 1]) && oracle_alnum(original[p])); };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < n; ++i) {
        if (oracle_space(original[i]) || !boundary(i)) continue;
        for (const auto& s : surfaces) {
            std::size_t p = i;
            bool ok = true;
            for (char32_t c : s.folded) {
                if (c == U' ') {
                    if (p >= n || !oracle_space(original[p])) { ok = false; break; }
                    while (p < n && oracle_space(original[p])) ++p;
                } else {
                    if (p >= n || oracle_fold(original[p]) != c) { ok = false; break; }
                    ++p;
                }
            }
            if (ok && boundary(p)) hits.push_back({i, p, &s});
        }
    }
    std::vector<EntityMention> out;
    std::set<ConceptType> concepts;
    for (const auto& h : hits) concepts.insert(h.s->concept_type);
    for (auto c : concepts) {
        std::vector<Hit> mine;
        for (const auto& h : hits)
            if (h.s->concept_type == c) mine.push_back(h);
        std::sort(mine.begin(), mine.end(), [](const Hit& a, const Hit& b) {
            if (a.start != b.start) return a.start < b.start;
            return a.end > b.end;
        });
        std::size_t free_from = 0;
        for (const auto& h : mine) {
            if (h.start < free_from) continue;
            EntityMention m;
            m.block = block;
            m.concept_type = c;
            m.canonical_id = h.s->canonical_id;
            m.surface = text::encode_utf8(original.substr(h.start, h.end - h.start));
            m.start = h.start;
            m.end = h.end;
            out.push_back(std::move(m));
            free_from = h.end;
        }
    }
    return out;
}

std::u32string random_surface(std::mt19937_64& rng) {
    std::u32string s;
    std::size_t words = uniform(rng, 1, 2);
    for (std::size_t w = 0; w < words; ++w) {
        if (w) s.push_back(U' ');
        if (chance(rng, 0.1)) {
            s.push_back(U'1' + static_cast<char32_t>(uniform(rng, 0, 1)));
            continue;
        }
        std::size_t len = uniform(rng, 1, 4);
        for (std::size_t i = 0; i < len; ++i) s.push_back(kPlainLetters[uniform(rng, 0, kPlainLetters.size() - 1)]);
    }
    return s;
}

std::u32string perturb_case_accents(std::mt19937_64& rng, std::u32string_view text) {
    static const std::map<char32_t, std::u32string> variants = {
        {U'e', U"eéèêEÉÈ"}, {U'a', U"aàAÀ"}, {U'u', U"uùUÙ"}, {U'o', U"oôOÔ"},
    };
    std::u32string out;
    for (char32_t c : text) {
        char32_t base = oracle_fold(c);
        if (auto it = variants.find(base); it != variants.end()) {
            out.push_back(it->second[uniform(rng, 0, it->second.size() - 1)]);
        } else if (base >= U'a' && base <= U'z') {
            out.push_back(chance(rng, 0.5) ? base : base - U'a' + U'A');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::u32string random_lexicon_text(std::mt19937_64& rng, const std::vector<std::u32string>& pool,
                                   std::size_t max_len) {
    static const std::vector<std::u32string> separators = {U" ", U" ", U" ", U"  ", U", ", U"-", U"'", U" : "};
    std::u32string out;
    while (out.size() < max_len) {
        std::u32string piece;
        if (!pool.empty() && chance(rng, 0.5)) {
            piece = pick(rng, pool);
            // Surfaces may appear with widened internal whitespace.
            std::u32string widened;
            for (char32_t c : piece) {
                widened.push_back(c);
                if (c == U' ' && chance(rng, 0.3)) widened.push_back(U' ');
            }
            piece = widened;
        } else {
            std::size_t len = uniform(rng, 1, 5);
            for (std::size_t i = 0; i < len; ++i)
                piece.push_back(chance(rng, 0.1) ? U'0' + static_cast<char32_t>(uniform(rng, 0, 9))
                                                 : kPlainLetters[uniform(rng, 0, kPlainLetters.size() - 1)]);
        }
        if (!out.empty()) out += pick(rng, separators);
        out += perturb_case_accents(rng, piece);
    }
    if (out.size() > max_len) out.resize(max_len);
    while (!out.empty() && oracle_space(out.back())) out.pop_back();
    return out;
}

// --------------------------------------------------------------- relation

namespace {

std::string ascii_lower(std::string s) {
    for (auto& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

std::string ascii_upper(std::string s) {
    for (auto& c : s)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return s;
}

int level_of(BlockKind k) {
    if (k == BlockKind::title) return 1;
    if (k == BlockKind::subtitle) return 2;
    return 0;
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

RelationConfig random_doc_config() {
    RelationConfig cfg;
    cfg.avoid.push_back({"abonnement", std::nullopt});
    cfg.avoid.push_back({"rappel des traitements", "fin du rappel"});
    return cfg;
}

RandomDoc random_relation_doc(std::mt19937_64& rng, const std::string& id, const RandomDocOptions& opt) {
    static const std::vector<std::string> header_texts = {"avertissements agricoles", "service regional du centre",
                                                          "bulletin technique numero 4"};
    static const std::vector<std::string> heading_texts = {"ble",      "colza tardif", "situation generale",
                                                           "orge",     "abonnement",   "rappel des traitements",
                                                           "fin du rappel", "vigne"};
    static const std::vector<std::string> para_texts = {
        "la culture progresse bien", "abonnement annuel au bulletin", "rappel des traitements en cours",
        "fin du rappel pour la saison", "attaques en cours dans le secteur", "les parcelles sont saines",
        "pluies et gel annonces", "12 pour cent de pieds touches"};

    RandomDoc out;
    Document& doc = out.doc;
    doc.id = id;
    std::size_t total = uniform(rng, 1, opt.max_blocks);
    std::size_t headers = std::min<std::size_t>(uniform(rng, 0, 2), total - 1);
    std::size_t body = total - headers;
    std::vector<BlockKind> kinds(body, BlockKind::paragraph);
    if (opt.max_headings > 0 && chance(rng, 0.6)) {
        std::size_t nh = std::min(uniform(rng, 1, opt.max_headings), body);
        std::vector<std::size_t> slots(body);
        for (std::size_t i = 0; i < body; ++i) slots[i] = i;
        std::shuffle(slots.begin(), slots.end(), rng);
        for (std::size_t i = 0; i < nh; ++i) kinds[slots[i]] = chance(rng, 0.6) ? BlockKind::title : BlockKind::subtitle;
    }
    for (std::size_t i = 0; i < headers; ++i) doc.blocks.push_back({BlockKind::header, pick(rng, header_texts), i});
    for (std::size_t i = 0; i < body; ++i) {
        Block b{kinds[i], "", headers + i};
        if (level_of(kinds[i]) > 0) {
            b.text = pick(rng, heading_texts);
            if (chance(rng, 0.5)) b.text = ascii_upper(b.text);
        } else {
            b.text = pick(rng, para_texts);
        }
        doc.blocks.push_back(std::move(b));
    }
    if (opt.force_avoided) {
        auto& b = doc.blocks[uniform(rng, headers, total - 1)];
        b.text = chance(rng, 0.5) ? (level_of(b.kind) ? "ABONNEMENT" : "abonnement et tarifs")
                                  : (level_of(b.kind) ? "RAPPEL DES TRAITEMENTS" : "rappel des traitements");
    }

    static const std::vector<std::pair<ConceptType, std::vector<std::string>>> pools = {
        {ConceptType::crop, {"crop:ble", "crop:colza", "crop:orge"}},
        {ConceptType::crop, {"crop:ble", "crop:colza", "crop:orge"}},
        {ConceptType::crop, {"crop:ble", "crop:colza", "crop:orge"}},
        {ConceptType::pest, {"pest:puceron", "pest:mouche"}},
        {ConceptType::pest, {"pest:puceron", "pest:mouche"}},
        {ConceptType::crop, {"crop:ble", "crop:colza", "crop:orge"}},
        {ConceptType::crop, {"crop:ble", "crop:colza", "crop:orge"}},
        {ConceptType::pest, {"pest:puceron", "pest:mouche"}},
        {ConceptType::disease, {"disease:rouille", "disease:mildiou"}},
        {ConceptType::disease, {"disease:rouille", "disease:mildiou"}},
        {ConceptType::disease, {"disease:rouille", "disease:mildiou"}},
        {ConceptType::damage, {"damage:x"}},
        {ConceptType::damage, {"damage:x"}},
        {ConceptType::region, {"region:centre", "region:bourgogne"}},
        {ConceptType::pub_time, {"pub_time:date"}},
        {ConceptType::issue_no, {"issue_no:n"}},
        {ConceptType::climate, {"climate:gel"}},
    };
    static const std::vector<std::string> dates = {"1998-04-12", "2001-05-03", "1945-11-02"};

    out.itemset.doc_id = id;
    std::size_t mentions = uniform(rng, chance(rng, 0.1) ? 0 : 2, opt.max_mentions);
    std::size_t last_block = uniform(rng, 0, total - 1);
    for (std::size_t k = 0; k < mentions; ++k) {
        const auto& [concept_type, ids] = pick(rng, pools);
        // Half the mentions share the previous block so pairings are common.
        std::size_t block = chance(rng, 0.5) ? last_block : uniform(rng, 0, total - 1);
        if (concept_type == ConceptType::crop && chance(rng, 0.5)) {
            std::vector<std::size_t> heads;
            for (const auto& b : doc.blocks)
                if (level_of(b.kind)) heads.push_back(b.index);
            if (!heads.empty()) block = pick(rng, heads);
        }
        auto cps = text::decode_utf8(doc.blocks[block].text);
        EntityMention m;
        m.doc_id = id;
        m.block = block;
        m.concept_type = concept_type;
        m.canonical_id = pick(rng, ids);
        m.start = uniform(rng, 0, cps.size() - 1);
        m.end = uniform(rng, m.start + 1, cps.size());
        m.surface = text::encode_utf8(std::u32string_view(cps).substr(m.start, m.end - m.start));
        if (concept_type == ConceptType::pub_time && chance(rng, 0.8)) m.norm = pick(rng, dates);
        last_block = block;
        out.itemset.mentions.push_back(std::move(m));
    }
    sort_mentions(out.itemset.mentions);
    if (chance(rng, 0.15)) doc.meta.region = "Bourgogne";
    if (chance(rng, 0.15)) doc.meta.date = Date::parse("1990-01-01");
    return out;
}

std::vector<bool> oracle_avoided(const Document& doc, const RelationConfig& cfg) {
    std::vector<bool> avoided(doc.blocks.size(), false);
    auto starts = [&](std::size_t i, const std::string& phrase) {
        return ascii_lower(doc.blocks[i].text).rfind(ascii_lower(phrase), 0) == 0;
    };
    for (const auto& rule : cfg.avoid) {
        std::size_t open = doc.blocks.size();
        for (std::size_t i = 0; i < doc.blocks.size(); ++i)
            if (starts(i, rule.start_phrase)) {
                open = i;
                break;
            }
        if (open == doc.blocks.size()) continue;
        std::size_t close = doc.blocks.size();
        if (rule.end_phrase)
            for (std::size_t i = open + 1; i < doc.blocks.size(); ++i)
                if (starts(i, *rule.end_phrase)) {
                    close = i;
                    break;
                }
        for (std::size_t i = open; i < close; ++i) avoided[i] = true;
    }
    return avoided;
}

std::vector<Relation> oracle_relate(const Document& doc, const DocItemset& itemset, const RelationConfig& cfg) {
    const std::size_t n = doc.blocks.size();
    const auto avoided = oracle_avoided(doc, cfg);
    auto has = [](const std::vector<ConceptType>& v, ConceptType c) {
        return std::find(v.begin(), v.end(), c) != v.end();
    };

    struct Link {
        std::size_t unit;
        std::size_t block;  // partner block
        std::size_t target_idx, partner_idx;
    };
    std::vector<Link> links;
    const auto& ms = itemset.mentions;
    auto in_block = [&](std::size_t b, auto pred) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ms.size(); ++i)
            if (ms[i].block == b && pred(ms[i].concept_type)) idx.push_back(i);
        return idx;
    };
    auto is_target = [&](ConceptType c) { return c == cfg.target; };
    auto is_partner = [&](ConceptType c) { return has(cfg.partners, c); };

    bool structured = false;
    for (const auto& b : doc.blocks) structured = structured || level_of(b.kind) > 0;

    if (structured) {
        for (std::size_t h = 0; h < n; ++h) {
            int lvl = level_of(doc.blocks[h].kind);
            if (lvl == 0 || avoided[h]) continue;
            auto targets = in_block(h, is_target);
            for (std::size_t b = h + 1; b < n; ++b) {
                int l = level_of(doc.blocks[b].kind);
                if (l > 0 && l <= lvl) break;
                if (avoided[b]) continue;
                for (auto p : in_block(b, is_partner))
                    for (auto t : targets) links.push_back({h, b, t, p});
            }
        }
    } else {
        for (std::size_t b = 0; b < n; ++b) {
            if (doc.blocks[b].kind != BlockKind::paragraph || avoided[b]) continue;
            for (auto p : in_block(b, is_partner))
                for (auto t : in_block(b, is_target)) links.push_back({b, b, t, p});
        }
    }

    RelationContext ctx;
    for (const auto& m : ms) {
        if (doc.blocks[m.block].kind != BlockKind::header || avoided[m.block] || !has(cfg.context, m.concept_type))
            continue;
        if (m.concept_type == ConceptType::pub_time && !ctx.date && m.norm) ctx.date = m.norm;
        if (m.concept_type == ConceptType::region && !ctx.region) ctx.region = m.canonical_id;
        if (m.concept_type == ConceptType::issue_no && !ctx.issue) ctx.issue = m.surface;
    }
    if (doc.meta.date) ctx.date = doc.meta.date->to_string();
    if (doc.meta.region) ctx.region = doc.meta.region;
    if (doc.meta.issue) ctx.issue = doc.meta.issue;

    std::map<std::pair<std::string, std::string>, std::vector<Link>> grouped;
    for (const auto& l : links) grouped[{ms[l.target_idx].canonical_id, ms[l.partner_idx].canonical_id}].push_back(l);

    std::vector<Relation> out;
    for (const auto& [key, group] : grouped) {
        Relation r;
        r.doc_id = doc.id;
        r.subject = {ms[group.front().target_idx].concept_type, key.first};
        r.object = {ms[group.front().partner_idx].concept_type, key.second};
        r.source = structured ? RelationSource::heading : RelationSource::paragraph;
        r.context = ctx;
        std::set<std::size_t> damage_blocks, units;
        std::set<Evidence> evidence;
        for (const auto& l : group) {
            damage_blocks.insert(l.block);
            units.insert(l.unit);
            evidence.insert({l.block, collapse_spaces(doc.blocks[l.block].text)});
        }
        for (std::size_t i = 0; i < ms.size(); ++i) {
            if (!damage_blocks.count(ms[i].block) || !has(cfg.attach, ms[i].concept_type)) continue;
            if (std::find(r.damage.begin(), r.damage.end(), ms[i].surface) == r.damage.end())
                r.damage.push_back(ms[i].surface);
        }
        r.evidence.assign(evidence.begin(), evidence.end());
        r.units.assign(units.begin(), units.end());
        out.push_back(std::move(r));
    }
    return out;
}

std::size_t inject_into_avoided(std::mt19937_64& rng, const Document& doc, DocItemset& itemset,
                                const RelationConfig& cfg) {
    auto avoided = oracle_avoided(doc, cfg);
    std::vector<std::size_t> blocks;
    for (std::size_t i = 0; i < avoided.size(); ++i)
        if (avoided[i]) blocks.push_back(i);
    if (blocks.empty()) return 0;
    static const std::vector<std::pair<ConceptType, std::string>> kinds = {
        {ConceptType::crop, "crop:ble"},         {ConceptType::crop, "crop:mais"},
        {ConceptType::pest, "pest:puceron"},     {ConceptType::disease, "disease:rouille"},
        {ConceptType::disease, "disease:oidium"}, {ConceptType::damage, "damage:x"},
        {ConceptType::region, "region:alsace"},  {ConceptType::pub_time, "pub_time:date"},
        {ConceptType::issue_no, "issue_no:n"},
    };
    std::size_t count = uniform(rng, 1, 5);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t block = pick(rng, blocks);
        auto cps = text::decode_utf8(doc.blocks[block].text);
        const auto& [c, id] = pick(rng, kinds);
        EntityMention m;
        m.doc_id = doc.id;
        m.block = block;
        m.concept_type = c;
        m.canonical_id = id;
        m.start = uniform(rng, 0, cps.size() - 1);
        m.end = uniform(rng, m.start + 1, cps.size());
        m.surface = text::encode_utf8(std::u32string_view(cps).substr(m.start, m.end - m.start));
        if (c == ConceptType::pub_time) m.norm = "1950-06-06";
        itemset.mentions.push_back(std::move(m));
    }
    sort_mentions(itemset.mentions);
    return count;
}

std::string describe(const std::vector<Relation>& rels) {
    std::string out;
    for (const auto& r : rels) out += serialize_relation(r) + "\n";
    return out.empty() ? "(none)\n" : out;
}

// ------------------------------------------------------------------ index

namespace {

const std::vector<std::string> kCrops = {"crop:ble", "crop:colza", "crop:orge"};
const std::vector<std::string> kPartners = {"disease:rouille", "disease:mildiou", "pest:mouche", "pest:puceron"};
const std::vector<std::string> kWords = {"gel", "gelees", "mars", "pluie", "secteur", "avril", "froid", "ble"};

std::optional<Date> fixture_date(std::mt19937_64& rng) {
    static const std::vector<std::string> pool = {"1945-11-01", "1945-11-02", "1945-11-03", "1960-01-01",
                                                  "1998-04-12", "2011-07-27", "2011-07-28", "2011-07-29"};
    if (chance(rng, 0.15)) return std::nullopt;
    return Date::parse(pick(rng, pool));
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(ascii_lower(w));
    return out;
}

}  // namespace

SearchFixture random_search_fixture(std::mt19937_64& rng, std::size_t doc_count) {
    // (meta spelling, resolved name)
    static const std::vector<std::pair<std::optional<std::string>, std::string>> regions = {
        {"Centre", "Centre"},       {"centre", "Centre"},     {"Bourgogne", "Bourgogne"},
        {"BRETAGNE", "Bretagne"},   {"Alsace", "Alsace"},     {"Midi-Pyrénées", "Midi-Pyrénées"},
        {"Atlantide", "unknown"},   {std::nullopt, "unknown"},
    };
    SearchFixture fx;
    for (std::size_t i = 0; i < doc_count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "s%03zu", i);
        Document doc;
        doc.id = id;
        SearchFixtureDoc truth;
        truth.id = id;
        truth.date = fixture_date(rng);
        const auto& [meta_region, resolved] = pick(rng, regions);
        truth.region = resolved;
        doc.meta.date = truth.date;
        doc.meta.region = meta_region;
        std::size_t blocks = uniform(rng, 1, 3);
        for (std::size_t b = 0; b < blocks; ++b) {
            std::string t;
            std::size_t words = uniform(rng, 2, 6);
            for (std::size_t w = 0; w < words; ++w) {
                std::string word = pick(rng, kWords);
                if (chance(rng, 0.2)) word[0] = static_cast<char>(word[0] - 'a' + 'A');
                if (!t.empty()) t += chance(rng, 0.2) ? ", " : " ";
                t += word;
            }
            for (const auto& w : split_words(t)) {
                std::string clean;
                for (char c : w)
                    if (c != ',') clean.push_back(c);
                truth.words.push_back(clean);
            }
            doc.blocks.push_back({BlockKind::paragraph, t, b});
        }
        std::size_t rels = uniform(rng, 0, 3);
        std::set<std::pair<std::string, std::string>> seen;
        for (std::size_t k = 0; k < rels; ++k) {
            auto crop = pick(rng, kCrops);
            auto partner = pick(rng, kPartners);
            if (!seen.insert({crop, partner}).second) continue;
            Relation r;
            r.doc_id = doc.id;
            r.subject = {ConceptType::crop, crop};
            r.object = {*parse_concept(canonical_prefix(partner)), partner};
            r.context.date = truth.date ? std::optional<std::string>(truth.date->to_string()) : std::nullopt;
            r.context.region = meta_region;
            r.evidence.push_back({0, doc.blocks[0].text});
            r.units.push_back(0);
            r.source = RelationSource::paragraph;
            fx.relations.push_back(std::move(r));
        }
        fx.itemsets.push_back({doc.id, {}});
        fx.docs.push_back(std::move(doc));
        fx.truth.push_back(std::move(truth));
    }
    return fx;
}

Query random_query(std::mt19937_64& rng) {
    static const std::vector<std::string> bounds = {"1945-11-01", "1945-11-02", "1945-11-03", "1960-01-01",
                                                    "1998-04-12", "2011-07-27", "2011-07-28", "2011-07-29"};
    static const std::vector<std::string> query_regions = {"Centre", "centre", "Bourgogne", "Bretagne",
                                                           "Alsace", "unknown", "Corse", "Atlantide"};
    static const std::vector<std::string> free_words = {"gel", "Gel", "gelees", "gel mars", "pluie", "zzz", "froid"};
    auto bare_or_full = [&](const std::string& id) {
        return chance(rng, 0.5) ? id : std::string(id.substr(id.find(':') + 1));
    };
    Query q;
    switch (uniform(rng, 0, 4)) {
        case 0: q.crop = bare_or_full(chance(rng, 0.1) ? "crop:mais" : pick(rng, kCrops)); break;
        case 1: q.disease = bare_or_full(chance(rng, 0.5) ? "disease:rouille" : "disease:mildiou"); break;
        case 2: q.pest = bare_or_full(chance(rng, 0.5) ? "pest:mouche" : "pest:puceron"); break;
        case 3:
            q.crop = bare_or_full(pick(rng, kCrops));
            q.disease = bare_or_full(chance(rng, 0.5) ? "disease:rouille" : "disease:mildiou");
            break;
        default:
            q.crop = bare_or_full(pick(rng, kCrops));
            q.pest = bare_or_full(chance(rng, 0.5) ? "pest:mouche" : "pest:puceron");
            break;
    }
    if (chance(rng, 0.4)) q.date_from = Date::parse(pick(rng, bounds));
    if (chance(rng, 0.4)) q.date_to = Date::parse(pick(rng, bounds));
    if (chance(rng, 0.3)) q.free_word = pick(rng, free_words);
    if (chance(rng, 0.4)) q.region = pick(rng, query_regions);
    q.sort = chance(rng, 0.5) ? SortOrder::date_desc : SortOrder::date_asc;
    return q;
}

std::optional<QueryResult> oracle_search(const SearchFixture& fx, const RegionTable& regions, const Query& q) {
    if (q.date_from && q.date_to && *q.date_from > *q.date_to) return std::nullopt;
    auto full = [](const std::string& raw, const char* concept_name) {
        return raw.find(':') != std::string::npos ? raw : std::string(concept_name) + ":" + raw;
    };
    std::optional<std::string> region;
    if (q.region) {
        auto wanted = ascii_lower(*q.region);
        if (wanted == "unknown") {
            region = "unknown";
        } else {
            for (const auto& name : regions.names())
                if (ascii_lower(name) == wanted) region = name;
            if (!region) return std::nullopt;
        }
    }
    std::vector<const SearchFixtureDoc*> hits;
    for (std::size_t i = 0; i < fx.truth.size(); ++i) {
        const auto& t = fx.truth[i];
        bool species = false;
        for (const auto& r : fx.relations) {
            if (r.doc_id != t.id) continue;
            if (q.crop && (q.disease || q.pest)) {
                auto other = q.disease ? full(*q.disease, "disease") : full(*q.pest, "pest");
                species = species || (r.subject.id == full(*q.crop, "crop") && r.object.id == other);
            } else {
                std::string s = q.crop ? full(*q.crop, "crop") : q.disease ? full(*q.disease, "disease")
                                                                           : full(*q.pest, "pest");
                species = species || r.subject.id == s || r.object.id == s;
            }
        }
        if (!species) continue;
        if (q.free_word) {
            bool all = true;
            for (const auto& w : split_words(*q.free_word))
                all = all && std::find(t.words.begin(), t.words.end(), w) != t.words.end();
            if (!all) continue;
        }
        if (region && t.region != *region) continue;
        if (q.date_from || q.date_to) {
            if (!t.date) continue;
            if (q.date_from && *t.date < *q.date_from) continue;
            if (q.date_to && *t.date > *q.date_to) continue;
        }
        hits.push_back(&t);
    }
    // Dated documents first, by date in the requested direction, then id.
    std::vector<const SearchFixtureDoc*> dated, undated;
    for (auto* h : hits) (h->date ? dated : undated).push_back(h);
    std::sort(dated.begin(), dated.end(), [&](auto* a, auto* b) {
        if (*a->date == *b->date) return a->id < b->id;
        return q.sort == SortOrder::date_desc ? *a->date > *b->date : *a->date < *b->date;
    });
    std::sort(undated.begin(), undated.end(), [](auto* a, auto* b) { return a->id < b->id; });
    QueryResult out;
    for (auto* list : {&dated, &undated})
        for (auto* h : *list) out.docs.push_back({h->id, h->date, h->region, std::nullopt});
    for (const auto& name : regions.names()) {
        std::size_t n = 0;
        for (const auto& d : out.docs) n += d.region == name;
        out.region_hits.emplace_back(name, n);
    }
    std::size_t unknown = 0;
    for (const auto& d : out.docs) unknown += d.region == "unknown";
    out.region_hits.emplace_back("unknown", unknown);
    out.total = out.docs.size();
    return out;
}

bool same_result(const QueryResult& a, const QueryResult& b, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.total != b.total) return fail("total " + std::to_string(a.total) + " vs " + std::to_string(b.total));
    if (a.docs.size() != b.docs.size()) return fail("doc count differs");
    for (std::size_t i = 0; i < a.docs.size(); ++i) {
        const auto& x = a.docs[i];
        const auto& y = b.docs[i];
        if (x.doc_id != y.doc_id || x.date != y.date || x.region != y.region)
            return fail("row " + std::to_string(i) + ": " + x.doc_id + " vs " + y.doc_id);
    }
    if (a.region_hits != b.region_hits) return fail("region_hits differ");
    return true;
}

// ------------------------------------------------------ synthetic corpus

Document synthetic_bulletin(std::mt19937_64& rng, const std::string& id) {
    struct Pools {
        std::map<ConceptType, std::vector<std::string>> surfaces;
    };
    static const Pools pools = [] {
        Pools p;
        for (const auto& e : sample_data().lexicon.entries())
            for (const auto& s : e.surfaces) p.surfaces[e.concept_type].push_back(s);
        return p;
    }();
    auto any = [&](ConceptType c) { return pick(rng, pools.surfaces.at(c)); };
    static const std::vector<std::string> filler = {
        "les", "observations", "réalisées", "cette", "semaine", "montrent", "une", "situation", "variable",
        "selon", "secteurs", "parcelles", "précoces", "tardives", "il", "convient", "de", "surveiller",
        "attentivement", "présence", "sur", "feuilles", "tiges", "épis", "conditions", "climatiques",
        "favorables", "au", "développement", "des", "maladies", "en", "cours", "traitement", "recommandé",
        "dès", "que", "seuil", "d'intervention", "est", "dépassé", "dans", "le", "la", "et"};
    static const std::vector<std::string> months = {"janvier", "février", "mars",      "avril",   "mai",      "juin",
                                                    "juillet", "août",    "septembre", "octobre", "novembre", "décembre"};

    Document doc;
    doc.id = id;
    auto add = [&](BlockKind k, std::string t) { doc.blocks.push_back({k, std::move(t), doc.blocks.size()}); };
    add(BlockKind::header, "AVERTISSEMENTS AGRICOLES No " + std::to_string(uniform(rng, 1, 60)));
    add(BlockKind::header, any(ConceptType::region) + " - " + std::to_string(uniform(rng, 1, 28)) + " " +
                               pick(rng, months) + " " + std::to_string(uniform(rng, 1946, 2010)));

    auto sentence = [&](std::size_t words) {
        std::string s;
        for (std::size_t i = 0; i < words; ++i) {
            if (!s.empty()) s.push_back(' ');
            s += pick(rng, filler);
        }
        return s;
    };
    std::size_t sections = uniform(rng, 3, 5);
    for (std::size_t sct = 0; sct < sections; ++sct) {
        add(BlockKind::title, ascii_upper(any(ConceptType::crop)));
        std::size_t paras = uniform(rng, 2, 3);
        for (std::size_t p = 0; p < paras; ++p) {
            std::string t = any(chance(rng, 0.5) ? ConceptType::pest : ConceptType::disease) + " : " + sentence(uniform(rng, 12, 25));
            if (chance(rng, 0.5))
                t += " ; " + std::to_string(uniform(rng, 1, 60)) + "% de parcelles touchées";
            if (chance(rng, 0.3)) t += ", " + any(ConceptType::damage);
            if (chance(rng, 0.3)) t += ". Stade " + std::to_string(uniform(rng, 2, 6)) + " feuilles";
            t += ". " + sentence(uniform(rng, 15, 30)) + " " + any(ConceptType::climate) + ".";
            if (chance(rng, 0.4)) t += " " + any(ConceptType::auxiliary) + " " + sentence(uniform(rng, 5, 12)) + ".";
            add(BlockKind::paragraph, t);
        }
    }
    if (chance(rng, 0.2)) {
        add(BlockKind::title, "ABONNEMENT");
        add(BlockKind::paragraph, "Tarif annuel " + sentence(8) + " " + any(ConceptType::disease) + ".");
    }
    return doc;
}

}  // namespace bsvtest
