#include "dualctx/service.hpp"

#include <httplib.h>

namespace dualctx {

using nlohmann::json;

namespace {

HttpReply error_reply(int status, std::string_view message, std::string_view field = {}) {
    json j = {{"error", message}};
    if (!field.empty()) {
        j["field"] = field;
    }
    return {status, j.dump() + "\n"};
}

const std::set<std::string> kFixedKeys = {"graph_file", "chunk_index", "include", "oracle_table"};

}  // namespace

struct Service::Query {
    std::string file;
    int line = 0;
    PipelineConfig config;
};

Service::Service(std::filesystem::path root, PipelineConfig config) : root_(std::move(root)), config_(std::move(config)) {
    config_.validate();
    try {
        index_ = std::make_shared<const RepoIndex>(load_index(root_, config_));
    } catch (const IndexMissing&) {
    }
}

std::shared_ptr<const RepoIndex> Service::snapshot() const {
    std::lock_guard lock(mu_);
    return index_;
}

bool Service::has_index() const { return snapshot() != nullptr; }

HttpReply Service::healthz() const { return {200, "ok", "text/plain"}; }

HttpReply Service::run(std::string_view body, bool want_prompt) const {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::parse_error& e) {
        return error_reply(400, std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object()) {
        return error_reply(400, "request body must be a JSON object");
    }
    for (auto it = req.begin(); it != req.end(); ++it) {
        if (it.key() != "file" && it.key() != "line" && it.key() != "overrides") {
            return error_reply(400, "unknown field", it.key());
        }
    }
    Query q;
    q.config = config_;
    if (!req.contains("file") || !req["file"].is_string() || req["file"].get<std::string>().empty()) {
        return error_reply(400, "must be a non-empty string", "file");
    }
    q.file = req["file"].get<std::string>();
    if (!req.contains("line") || !req["line"].is_number_integer() || req["line"].get<std::int64_t>() < 1 ||
        req["line"].get<std::int64_t>() > std::numeric_limits<int>::max()) {
        return error_reply(400, "must be an integer >= 1", "line");
    }
    q.line = req["line"].get<int>();
    if (req.contains("overrides")) {
        const json& ov = req["overrides"];
        if (!ov.is_object()) {
            return error_reply(400, "must be an object", "overrides");
        }
        for (auto it = ov.begin(); it != ov.end(); ++it) {
            if (kFixedKeys.contains(it.key())) {
                return error_reply(400, "cannot be overridden per request", "overrides." + it.key());
            }
        }
        try {
            apply_config_json(q.config, ov);
            q.config.validate();
        } catch (const ParameterError& e) {
            return error_reply(400, e.what(), "overrides");
        }
    }

    const auto index = snapshot();
    if (!index) {
        return error_reply(409, "no index loaded for " + root_.string() + "; run 'index' or POST /v1/index");
    }
    try {
        const ContextResult ctx = run_context(*index, q.file, q.line, q.config);
        if (want_prompt) {
            return {200, prompt_json(run_prompt(*index, ctx, q.config)).dump(2) + "\n"};
        }
        return {200, context_json(ctx).dump(2) + "\n"};
    } catch (const ParameterError& e) {
        return error_reply(400, e.what());
    } catch (const DataError& e) {
        return error_reply(422, e.what());
    }
}

HttpReply Service::context(std::string_view body) const { return run(body, false); }

HttpReply Service::prompt(std::string_view body) const { return run(body, true); }

HttpReply Service::reindex() {
    std::unique_lock rebuild(rebuild_mu_, std::try_to_lock);
    if (!rebuild.owns_lock()) {
        return error_reply(409, "an index rebuild is already running");
    }
    try {
        auto fresh = std::make_shared<const RepoIndex>(build_index(root_, config_));
        const json summary = save_index(*fresh, config_);
        {
            std::lock_guard lock(mu_);
            index_ = std::move(fresh);
        }
        return {200, summary.dump() + "\n"};
    } catch (const Error& e) {
        return error_reply(422, e.what());
    }
}

void install_routes(httplib::Server& server, Service& service) {
    auto send = [](httplib::Response& res, const HttpReply& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get("/healthz", [&service, send](const httplib::Request&, httplib::Response& res) {
        send(res, service.healthz());
    });
    server.Post("/v1/context", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.context(req.body));
    });
    server.Post("/v1/prompt", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.prompt(req.body));
    });
    server.Post("/v1/index", [&service, send](const httplib::Request&, httplib::Response& res) {
        send(res, service.reindex());
    });
}

void serve(Service& service, const std::string& host, int port) {
    httplib::Server server;
    install_routes(server, service);
    if (!server.bind_to_port(host, port)) {
        throw DataError("cannot bind " + host + ":" + std::to_string(port));
    }
    server.listen_after_bind();
}

}  // namespace dualctx
