// bsvmine: ingest -> extract -> relate -> index -> serve/query.
//
// Exit codes: 0 success, 1 partial (some documents failed), 2 usage error,
// 3 fatal.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "CLI11.hpp"
#include "bsv/document.hpp"
#include "bsv/error.hpp"
#include "bsv/extraction.hpp"
#include "bsv/grammar.hpp"
#include "bsv/index.hpp"
#include "bsv/lexicon.hpp"
#include "bsv/parallel.hpp"
#include "bsv/relation.hpp"
#include "bsv/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

enum ExitCode : int { kOk = 0, kPartial = 1, kUsage = 2, kFatal = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw bsv::Error(bsv::Errc::io_error, "cannot write '" + path.string() + "'");
    return out;
}

void report(const std::vector<bsv::LineError>& errors, const std::string& file) {
    for (const auto& e : errors) std::cerr << file << ":" << e.line << ": " << e.message << "\n";
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
    std::string input;
    std::string format = "text";
    std::string out;
    bsv::SegmenterConfig segmenter;
};

int run_ingest(const IngestArgs& a) {
    std::error_code ec;
    if (!fs::exists(a.input, ec)) throw bsv::Error(bsv::Errc::io_error, "input '" + a.input + "' not found");
    std::size_t failures = 0;
    std::size_t written = 0;
    std::unordered_map<std::string, bool> seen;
    auto out = open_out(a.out);
    auto emit = [&](const bsv::Document& doc, const std::string& where) {
        if (!seen.emplace(doc.id, true).second) {
            std::cerr << where << ": duplicate document id '" << doc.id << "'\n";
            ++failures;
            return;
        }
        out << bsv::serialize_document(doc) << '\n';
        ++written;
    };

    if (a.format == "text") {
        std::vector<fs::path> files;
        if (fs::is_directory(a.input, ec)) {
            fs::directory_iterator it(a.input, ec);
            if (ec) throw bsv::Error(bsv::Errc::io_error, "cannot list '" + a.input + "': " + ec.message());
            for (const auto& entry : it)
                if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
        } else {
            files.emplace_back(a.input);
        }
        for (const auto& f : files) {
            try {
                emit(bsv::segment_plaintext(read_file(f), a.segmenter, f.stem().string()), f.string());
            } catch (const bsv::Error& e) {
                std::cerr << f.string() << ": " << bsv::errc_name(e.code()) << ": " << e.what() << "\n";
                ++failures;
            }
        }
    } else {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read '" + a.input + "'");
        bsv::for_each_line_batch(in, 4096, [&](auto& batch) {
            for (const auto& [line_no, line] : batch) {
                auto where = a.input + ":" + std::to_string(line_no);
                try {
                    emit(bsv::parse_document_json(line), where);
                } catch (const bsv::Error& e) {
                    std::cerr << where << ": " << e.what() << "\n";
                    ++failures;
                }
            }
        });
    }
    std::cerr << "ingest: " << written << " documents, " << failures << " failures\n";
    return failures ? kPartial : kOk;
}

// ------------------------------------------------------------------ extract

struct ExtractArgs {
    std::string corpus, lexicon, rules, out;
    unsigned jobs = 0;
};

int run_extract(const ExtractArgs& a) {
    auto lex = bsv::Lexicon::load_file(a.lexicon);
    auto rules = a.rules.empty() ? std::vector<bsv::PatternRule>{} : bsv::load_rules_file(a.rules);
    std::ifstream in(a.corpus, std::ios::binary);
    if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read corpus '" + a.corpus + "'");
    auto out = open_out(a.out);
    auto stats = bsv::extract_corpus(in, lex, rules, out, a.jobs);
    report(stats.errors, a.corpus);
    std::cerr << "extract: " << stats.documents << " documents, " << stats.errors.size() << " failures\n";
    return stats.errors.empty() ? kOk : kPartial;
}

// ------------------------------------------------------------------ relate

std::unordered_map<std::string, bsv::DocItemset> load_itemsets(const std::string& path) {
    std::unordered_map<std::string, bsv::DocItemset> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read mentions '" + path + "'");
    bsv::for_each_line_batch(in, 4096, [&](auto& batch) {
        for (const auto& [line_no, line] : batch) {
            try {
                auto set = bsv::itemset_from_json(json::parse(line));
                auto id = set.doc_id;
                out.insert_or_assign(std::move(id), std::move(set));
            } catch (const std::exception& e) {
                throw bsv::Error(bsv::Errc::format_error, path + ": " + e.what(), line_no);
            }
        }
    });
    return out;
}

struct RelateArgs {
    std::string corpus, mentions, config, out, cooc;
    unsigned jobs = 0;
};

int run_relate(const RelateArgs& a) {
    bsv::RelationConfig cfg;
    if (!a.config.empty()) cfg = bsv::load_relation_config(a.config);
    auto itemsets = load_itemsets(a.mentions);
    std::ifstream in(a.corpus, std::ios::binary);
    if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read corpus '" + a.corpus + "'");
    auto out = open_out(a.out);

    struct DocResult {
        std::vector<bsv::Relation> relations;
        std::size_t units = 0;
    };
    std::vector<bsv::LineError> errors;
    std::vector<bsv::Relation> all;
    std::size_t units = 0;
    std::size_t documents = 0;
    bsv::for_each_line_batch(in, 1024, [&](auto& batch) {
        std::vector<std::variant<DocResult, std::string>> results(batch.size());
        bsv::parallel_for(batch.size(), a.jobs, [&](std::size_t i) {
            try {
                auto doc = bsv::parse_document_json(batch[i].second);
                auto it = itemsets.find(doc.id);
                if (it == itemsets.end()) {
                    results[i] = "no mentions for document '" + doc.id + "'";
                    return;
                }
                results[i] = DocResult{bsv::relate_document(doc, it->second, cfg), bsv::count_units(doc, cfg)};
            } catch (const bsv::Error& e) {
                results[i] = std::string(e.what());
            }
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (auto* r = std::get_if<DocResult>(&results[i])) {
                ++documents;
                units += r->units;
                for (auto& rel : r->relations) {
                    out << bsv::serialize_relation(rel) << '\n';
                    if (!a.cooc.empty()) all.push_back(std::move(rel));
                }
            } else {
                errors.push_back({batch[i].first, std::get<std::string>(results[i])});
            }
        }
    });
    if (!a.cooc.empty()) {
        auto cooc_out = open_out(a.cooc);
        for (const auto& s : bsv::cooc_scores(all, units))
            cooc_out << bsv::cooc_to_json(s).dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
    }
    report(errors, a.corpus);
    std::cerr << "relate: " << documents << " documents, " << units << " units, " << errors.size() << " failures\n";
    return errors.empty() ? kOk : kPartial;
}

// ------------------------------------------------------------------ index

struct IndexArgs {
    std::string corpus, mentions, relations, out, regions, lexicon;
};

int run_index(const IndexArgs& a) {
    std::vector<bsv::Document> corpus;
    {
        std::ifstream in(a.corpus, std::ios::binary);
        if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read corpus '" + a.corpus + "'");
        bsv::for_each_line_batch(in, 4096, [&](auto& batch) {
            for (const auto& [line_no, line] : batch) {
                try {
                    corpus.push_back(bsv::parse_document_json(line));
                } catch (const bsv::Error& e) {
                    throw bsv::Error(e.code(), a.corpus + ": " + e.what(), line_no);
                }
            }
        });
    }
    std::vector<bsv::DocItemset> itemsets;
    for (auto& [id, set] : load_itemsets(a.mentions)) itemsets.push_back(std::move(set));
    std::sort(itemsets.begin(), itemsets.end(),
              [](const bsv::DocItemset& x, const bsv::DocItemset& y) { return x.doc_id < y.doc_id; });
    std::vector<bsv::Relation> relations;
    {
        std::ifstream in(a.relations, std::ios::binary);
        if (!in) throw bsv::Error(bsv::Errc::io_error, "cannot read relations '" + a.relations + "'");
        bsv::for_each_line_batch(in, 4096, [&](auto& batch) {
            for (const auto& [line_no, line] : batch) {
                try {
                    relations.push_back(bsv::relation_from_json(json::parse(line)));
                } catch (const std::exception& e) {
                    throw bsv::Error(bsv::Errc::format_error, a.relations + ": " + e.what(), line_no);
                }
            }
        });
    }
    bsv::IndexOptions options;
    if (!a.regions.empty()) options.regions = bsv::RegionTable::load_file(a.regions);
    std::optional<bsv::Lexicon> lex;
    if (!a.lexicon.empty()) {
        lex = bsv::Lexicon::load_file(a.lexicon);
        options.lexicon = &*lex;
    }
    auto summary = bsv::build_index(corpus, itemsets, relations, a.out, options);
    std::cout << "documents: " << summary.documents << "\nrelations: " << summary.relations
              << "\nmentions: " << summary.mentions << "\ncontent_hash: " << summary.content_hash << "\n";
    return kOk;
}

// ------------------------------------------------------------------ serve

bsv::ApiServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

struct ServeArgs {
    std::string index;
    bsv::ServiceOptions options;
};

int run_serve(const ServeArgs& a) {
    auto idx = bsv::Index::open(a.index);
    bsv::ApiServer server(idx, a.options);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving " << a.index << " on http://" << a.options.bind << ":" << a.options.port << "\n";
    bool ok = server.listen();
    g_server = nullptr;
    if (!ok) {
        std::cerr << "cannot listen on " << a.options.bind << ":" << a.options.port << "\n";
        return kFatal;
    }
    return kOk;
}

// ------------------------------------------------------------------ query

struct QueryArgs {
    std::string index;
    std::string crop, disease, pest, from, to, q, region;
    std::string sort = "date_desc";
    bool json_out = false;
};

std::string or_dash(const std::optional<std::string>& s) { return s ? *s : "-"; }

int run_query(const QueryArgs& a, const CLI::App& cmd) {
    bsv::Query q;
    auto set = [](std::optional<std::string>& slot, const std::string& v) {
        if (!v.empty()) slot = v;
    };
    set(q.crop, a.crop);
    set(q.disease, a.disease);
    set(q.pest, a.pest);
    set(q.free_word, a.q);
    set(q.region, a.region);
    auto date = [](const std::string& v, const char* flag) -> std::optional<bsv::Date> {
        if (v.empty()) return std::nullopt;
        auto d = bsv::Date::parse(v);
        if (!d) throw UsageError(std::string("bad date for ") + flag + ": " + v);
        return d;
    };
    q.date_from = date(a.from, "--from");
    q.date_to = date(a.to, "--to");
    q.sort = a.sort == "date_asc" ? bsv::SortOrder::date_asc : bsv::SortOrder::date_desc;
    try {
        q.validate();
    } catch (const bsv::Error& e) {
        std::cerr << e.what() << "\n\n" << cmd.help();
        return kUsage;
    }

    auto idx = bsv::Index::open(a.index);
    bsv::QueryResult result;
    try {
        result = idx.search(q);
    } catch (const bsv::Error& e) {
        if (e.code() != bsv::Errc::invalid_query) throw;
        std::cerr << e.what() << "\n";
        return kUsage;
    }
    if (a.json_out) {
        std::cout << bsv::query_result_to_json(result).dump(2, ' ', false, ordered_json::error_handler_t::replace)
                  << "\n";
        return kOk;
    }
    std::cout << std::left << std::setw(16) << "doc_id" << std::setw(12) << "date" << std::setw(28) << "region"
              << "issue\n";
    for (const auto& d : result.docs) {
        std::cout << std::setw(16) << d.doc_id << std::setw(12) << (d.date ? d.date->to_string() : "-")
                  << std::setw(28) << d.region << or_dash(d.issue) << "\n";
    }
    std::cout << "total: " << result.total << "\nregion hits:";
    for (const auto& [region, n] : result.region_hits)
        if (n > 0) std::cout << " " << region << "=" << n;
    std::cout << "\n";
    return kOk;
}

struct PartnersArgs {
    std::string index, region, species;
    bool json_out = false;
};

int run_partners(const PartnersArgs& a) {
    auto idx = bsv::Index::open(a.index);
    std::vector<std::pair<std::string, std::size_t>> list;
    try {
        list = idx.partners(a.region, a.species);
    } catch (const bsv::Error& e) {
        if (e.code() != bsv::Errc::unknown_region) throw;
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (a.json_out) {
        ordered_json out = ordered_json::array();
        for (const auto& [id, n] : list) out.push_back({{"id", id}, {"count", n}});
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& [id, n] : list) std::cout << std::left << std::setw(32) << id << n << "\n";
    }
    return kOk;
}

struct CitationsArgs {
    std::string index, subject, object, region;
    bool json_out = false;
};

int run_citations(const CitationsArgs& a) {
    auto idx = bsv::Index::open(a.index);
    std::optional<std::string_view> region;
    if (!a.region.empty()) region = a.region;
    auto list = idx.citations(a.subject, a.object, region);
    if (a.json_out) {
        ordered_json out = ordered_json::array();
        for (const auto& c : list) out.push_back(bsv::citation_to_json(c));
        std::cout << out.dump(2, ' ', false, ordered_json::error_handler_t::replace) << "\n";
    } else {
        for (const auto& c : list)
            std::cout << (c.date ? c.date->to_string() : "-") << "  " << c.doc_id << "  " << c.region << "  "
                      << c.snippet << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plant-health bulletin extraction and search"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Segment plain text or validate JSONL into a corpus file");
    ingest_cmd->add_option("--input", ingest.input, "Directory of .txt files, a .txt file, or a JSONL file")->required();
    ingest_cmd->add_option("--format", ingest.format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));
    ingest_cmd->add_option("--out", ingest.out, "Corpus JSONL to write")->required();
    ingest_cmd->add_option("--header-lines", ingest.segmenter.header_line_limit, "Maximum header lines");
    ingest_cmd->add_option("--title-max-len", ingest.segmenter.title_max_len, "Maximum title length");

    ExtractArgs extract;
    auto* extract_cmd = app.add_subcommand("extract", "Export per-document mention itemsets");
    extract_cmd->add_option("--corpus", extract.corpus)->required();
    extract_cmd->add_option("--lexicon", extract.lexicon)->required();
    extract_cmd->add_option("--rules", extract.rules, "Local grammar rule file");
    extract_cmd->add_option("--out", extract.out)->required();
    extract_cmd->add_option("--jobs", extract.jobs, "Worker threads (0 = all cores)");

    RelateArgs relate;
    auto* relate_cmd = app.add_subcommand("relate", "Extract crop-pest and crop-disease relations");
    relate_cmd->add_option("--corpus", relate.corpus)->required();
    relate_cmd->add_option("--mentions", relate.mentions)->required();
    relate_cmd->add_option("--config", relate.config, "Relation config JSON");
    relate_cmd->add_option("--out", relate.out)->required();
    relate_cmd->add_option("--cooc", relate.cooc, "Also write cooccurrence scores (JSONL)");
    relate_cmd->add_option("--jobs", relate.jobs, "Worker threads (0 = all cores)");

    IndexArgs index;
    auto* index_cmd = app.add_subcommand("index", "Build the immutable search index");
    index_cmd->add_option("--corpus", index.corpus)->required();
    index_cmd->add_option("--mentions", index.mentions)->required();
    index_cmd->add_option("--relations", index.relations)->required();
    index_cmd->add_option("--out", index.out)->required();
    index_cmd->add_option("--regions", index.regions, "Region list, one per line");
    index_cmd->add_option("--lexicon", index.lexicon, "Lexicon for the concept inventory");

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API over an index");
    serve_cmd->add_option("--index", serve.index)->required();
    serve_cmd->add_option("--port", serve.options.port, "Port (default 8080)");
    serve_cmd->add_option("--bind", serve.options.bind, "Address (default 127.0.0.1)");
    serve_cmd->add_option("--static", serve.options.static_dir, "Directory served at /");

    QueryArgs query;
    auto* query_cmd = app.add_subcommand("query", "Search the index");
    query_cmd->add_option("--index", query.index)->required();
    query_cmd->add_option("--crop", query.crop);
    query_cmd->add_option("--disease", query.disease);
    query_cmd->add_option("--pest", query.pest);
    query_cmd->add_option("--from", query.from, "YYYY-MM-DD, inclusive");
    query_cmd->add_option("--to", query.to, "YYYY-MM-DD, inclusive");
    query_cmd->add_option("--q", query.q, "Free word filter");
    query_cmd->add_option("--region", query.region);
    query_cmd->add_option("--sort", query.sort)->check(CLI::IsMember({"date_desc", "date_asc"}));
    auto* json_flag = query_cmd->add_flag("--json", query.json_out, "Print JSON");
    auto* table_flag = query_cmd->add_flag("--table", "Print a table (default)");
    json_flag->excludes(table_flag);

    PartnersArgs partners;
    auto* partners_cmd = app.add_subcommand("partners", "Species linked to a species within a region");
    partners_cmd->add_option("--index", partners.index)->required();
    partners_cmd->add_option("--region", partners.region)->required();
    partners_cmd->add_option("--species", partners.species)->required();
    partners_cmd->add_flag("--json", partners.json_out);

    CitationsArgs citations;
    auto* citations_cmd = app.add_subcommand("citations", "Evidence snippets of a relation");
    citations_cmd->add_option("--index", citations.index)->required();
    citations_cmd->add_option("--subject", citations.subject)->required();
    citations_cmd->add_option("--object", citations.object)->required();
    citations_cmd->add_option("--region", citations.region);
    citations_cmd->add_flag("--json", citations.json_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*extract_cmd) return run_extract(extract);
        if (*relate_cmd) return run_relate(relate);
        if (*index_cmd) return run_index(index);
        if (*serve_cmd) return run_serve(serve);
        if (*query_cmd) return run_query(query, *query_cmd);
        if (*partners_cmd) return run_partners(partners);
        if (*citations_cmd) return run_citations(citations);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const bsv::Error& e) {
        std::cerr << "error: " << bsv::errc_name(e.code()) << ": " << e.what() << "\n";
        return kFatal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    }
    return kUsage;
}
