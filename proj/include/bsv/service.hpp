#pragma once

// Read-only JSON API over a built index.
//
//   GET /api/search                         QueryResult (paginated)
//   GET /api/regions/{region}/partners      [{id, count}]
//   GET /api/citations                      [Citation]
//   GET /api/documents/{id}                 document with resolved metadata
//   GET /api/meta/concepts                  concept inventory + region list
//
// Errors always have the shape {"status", "code", "message"}.

#include <map>
#include <memory>
#include <string>

#include "bsv/index.hpp"

namespace bsv {

using Params = std::multimap<std::string, std::string>;

struct ApiResponse {
    int status = 200;
    std::string body;
};

inline constexpr std::size_t kDefaultPageLimit = 100;
inline constexpr std::size_t kMaxPageLimit = 10000;

ApiResponse api_search(const Index& idx, const Params& params);
ApiResponse api_partners(const Index& idx, const std::string& region, const Params& params);
ApiResponse api_citations(const Index& idx, const Params& params);
ApiResponse api_document(const Index& idx, const std::string& id);
ApiResponse api_concepts(const Index& idx);
ApiResponse api_error(int status, std::string_view code, std::string_view message);

/// Decodes search parameters (crop, disease, pest, from, to, q, region,
/// sort). Throws Error(invalid_query).
Query query_from_params(const Params& params);

struct ServiceOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;
    /// Optional directory served at "/" (the browser UI build).
    std::string static_dir;
};

class ApiServer {
public:
    ApiServer(const Index& idx, ServiceOptions options = {});
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Blocks until stop(). Returns false when the socket cannot be bound.
    bool listen();
    /// Binds an ephemeral port and returns it (tests); then call serve().
    int bind_any_port();
    bool serve();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bsv
