#include "bsv/service.hpp"

#include <charconv>

#include "bsv/error.hpp"
#include "httplib.h"

namespace bsv {

using nlohmann::ordered_json;

namespace {

ApiResponse ok(const ordered_json& j) {
    return {200, j.dump(-1, ' ', false, ordered_json::error_handler_t::replace)};
}

std::optional<std::string> param(const Params& params, const char* name) {
    auto it = params.find(name);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::optional<Date> date_param(const Params& params, const char* name, const char* alias) {
    auto raw = param(params, name);
    if (!raw) raw = param(params, alias);
    if (!raw) return std::nullopt;
    auto d = Date::parse(*raw);
    if (!d) throw Error(Errc::invalid_query, std::string("bad date for '") + name + "': " + *raw);
    return d;
}

std::size_t size_param(const Params& params, const char* name, std::size_t fallback) {
    auto raw = param(params, name);
    if (!raw) return fallback;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), v);
    if (ec != std::errc() || ptr != raw->data() + raw->size())
        throw Error(Errc::invalid_query, std::string("bad integer for '") + name + "': " + *raw);
    return v;
}

ApiResponse from_error(const Error& e) {
    switch (e.code()) {
        case Errc::invalid_query: return api_error(400, "invalid_query", e.what());
        case Errc::unknown_region: return api_error(404, "unknown_region", e.what());
        default: return api_error(500, "internal", e.what());
    }
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return api_error(500, "internal", e.what());
    }
}

}  // namespace

ApiResponse api_error(int status, std::string_view code, std::string_view message) {
    ordered_json j;
    j["status"] = status;
    j["code"] = code;
    j["message"] = message;
    return {status, j.dump(-1, ' ', false, ordered_json::error_handler_t::replace)};
}

Query query_from_params(const Params& params) {
    Query q;
    q.crop = param(params, "crop");
    q.disease = param(params, "disease");
    q.pest = param(params, "pest");
    q.date_from = date_param(params, "from", "date_from");
    q.date_to = date_param(params, "to", "date_to");
    q.free_word = param(params, "q");
    q.region = param(params, "region");
    if (auto sort = param(params, "sort")) {
        if (*sort == "date_desc") q.sort = SortOrder::date_desc;
        else if (*sort == "date_asc") q.sort = SortOrder::date_asc;
        else throw Error(Errc::invalid_query, "sort must be date_desc or date_asc");
    }
    q.validate();
    return q;
}

ApiResponse api_search(const Index& idx, const Params& params) {
    return guarded([&] {
        auto q = query_from_params(params);
        auto limit = size_param(params, "limit", kDefaultPageLimit);
        auto offset = size_param(params, "offset", 0);
        if (limit == 0 || limit > kMaxPageLimit)
            throw Error(Errc::invalid_query, "limit must be between 1 and " + std::to_string(kMaxPageLimit));
        auto result = idx.search(q);
        auto j = query_result_to_json(result);
        ordered_json page = ordered_json::array();
        for (std::size_t i = offset; i < result.docs.size() && i < offset + limit; ++i)
            page.push_back(doc_hit_to_json(result.docs[i]));
        j["docs"] = std::move(page);
        j["offset"] = offset;
        j["limit"] = limit;
        return ok(j);
    });
}

ApiResponse api_partners(const Index& idx, const std::string& region, const Params& params) {
    return guarded([&] {
        auto species = param(params, "species");
        if (!species) throw Error(Errc::invalid_query, "missing 'species' parameter");
        ordered_json out = ordered_json::array();
        for (const auto& [id, count] : idx.partners(region, *species)) out.push_back({{"id", id}, {"count", count}});
        return ok(out);
    });
}

ApiResponse api_citations(const Index& idx, const Params& params) {
    return guarded([&] {
        auto subject = param(params, "subject");
        auto object = param(params, "object");
        if (!subject || !object) throw Error(Errc::invalid_query, "'subject' and 'object' are required");
        auto region = param(params, "region");
        std::optional<std::string_view> region_view;
        if (region) region_view = *region;
        ordered_json out = ordered_json::array();
        for (const auto& c : idx.citations(*subject, *object, region_view)) out.push_back(citation_to_json(c));
        return ok(out);
    });
}

ApiResponse api_document(const Index& idx, const std::string& id) {
    return guarded([&] {
        const auto* d = idx.document(id);
        if (!d) return api_error(404, "not_found", "no document '" + id + "'");
        ordered_json j;
        j["doc_id"] = d->doc.id;
        j["date"] = d->date ? ordered_json(d->date->to_string()) : ordered_json(nullptr);
        j["region"] = d->region;
        j["issue"] = d->issue ? ordered_json(*d->issue) : ordered_json(nullptr);
        j["document"] = document_to_json(d->doc);
        return ok(j);
    });
}

ApiResponse api_concepts(const Index& idx) {
    return guarded([&] {
        ordered_json j;
        j["concepts"] = idx.concepts().at("concepts");
        j["regions"] = idx.regions().names();
        return ok(j);
    });
}

struct ApiServer::Impl {
    Impl(const Index& i, ServiceOptions o) : idx(i), options(std::move(o)) {}

    const Index& idx;
    ServiceOptions options;
    httplib::Server server;
};

namespace {

Params to_params(const httplib::Params& p) { return Params(p.begin(), p.end()); }

void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
}

}  // namespace

ApiServer::ApiServer(const Index& idx, ServiceOptions options)
    : impl_(std::make_unique<Impl>(idx, std::move(options))) {
    auto& srv = impl_->server;
    const Index& index = impl_->idx;
    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    srv.Get("/api/search", [&index](const httplib::Request& req, httplib::Response& res) {
        send(res, api_search(index, to_params(req.params)));
    });
    srv.Get(R"(/api/regions/([^/]+)/partners)", [&index](const httplib::Request& req, httplib::Response& res) {
        send(res, api_partners(index, req.matches[1].str(), to_params(req.params)));
    });
    srv.Get("/api/citations", [&index](const httplib::Request& req, httplib::Response& res) {
        send(res, api_citations(index, to_params(req.params)));
    });
    srv.Get(R"(/api/documents/(.+))", [&index](const httplib::Request& req, httplib::Response& res) {
        send(res, api_document(index, req.matches[1].str()));
    });
    srv.Get("/api/meta/concepts", [&index](const httplib::Request&, httplib::Response& res) {
        send(res, api_concepts(index));
    });
    if (!impl_->options.static_dir.empty()) srv.set_mount_point("/", impl_->options.static_dir);
    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404 && req.path.rfind("/api/", 0) == 0)
            send(res, api_error(404, "not_found", "no route for " + req.path));
    });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string msg = "unexpected error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            msg = e.what();
        } catch (...) {
        }
        send(res, api_error(500, "internal", msg));
    });
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen() { return impl_->server.listen(impl_->options.bind, impl_->options.port); }

int ApiServer::bind_any_port() { return impl_->server.bind_to_any_port(impl_->options.bind); }

bool ApiServer::serve() { return impl_->server.listen_after_bind(); }

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ApiServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace bsv
