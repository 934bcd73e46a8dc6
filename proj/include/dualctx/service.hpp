#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "dualctx/pipeline.hpp"

namespace httplib {
class Server;
}

namespace dualctx {

struct HttpReply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// Request handlers over an immutable in-memory index. Queries take a snapshot
// of the current index; a rebuild swaps in a new one without blocking them.
class Service {
public:
    // Loads the index artifacts when present; queries answer 409 until one is available.
    Service(std::filesystem::path root, PipelineConfig config);

    // Body: {"file": str, "line": int >= 1, "overrides": {config keys}}.
    HttpReply context(std::string_view body) const;
    HttpReply prompt(std::string_view body) const;
    // Rebuilds from the repository, writes artifacts and swaps the index in.
    HttpReply reindex();
    HttpReply healthz() const;

    bool has_index() const;

private:
    struct Query;
    std::shared_ptr<const RepoIndex> snapshot() const;
    HttpReply run(std::string_view body, bool want_prompt) const;

    std::filesystem::path root_;
    PipelineConfig config_;
    mutable std::mutex mu_;
    std::shared_ptr<const RepoIndex> index_;
    std::mutex rebuild_mu_;
};

// GET /healthz, POST /v1/context, POST /v1/prompt, POST /v1/index.
void install_routes(httplib::Server& server, Service& service);

// Blocks until the server stops. Throws DataError when the address cannot be bound.
void serve(Service& service, const std::string& host, int port);

}  // namespace dualctx
