#pragma once

// HTTP front end: /api/query, /api/feedback, /api/health.

#include "ctxsql/banding.hpp"
#include "ctxsql/eval/labels.hpp"
#include "ctxsql/workbench.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace ctxsql {

/// Service config (JSON), paths relative to the config file:
///
///   {"host": "127.0.0.1", "port": 8080,
///    "workbench": "workbench.json",
///    "index_dir": "build/index",            (optional; else built at startup)
///    "provider": "replay" | "remote",
///    "replay_file": "replay.json",          (replay mode)
///    "feedback_log": "feedback.jsonl",
///    "band_thresholds": {"p25": 7, "p75": 12},          (optional)
///    "expected_hashes": {"phase1": "<sha256>", ...}}    (optional)
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path workbench_path;
    std::optional<std::filesystem::path> index_dir;
    std::string provider = "replay";
    std::optional<std::filesystem::path> replay_path;
    std::filesystem::path feedback_log = "feedback.jsonl";
    std::optional<BandThresholds> band_thresholds;
    std::map<Phase, std::string> expected_hashes;

    static ServiceConfig from_file(const std::filesystem::path& path);
};

struct HttpReply {
    int status = 200;
    nlohmann::json body;
};

class Service {
public:
    /// Loads corpora and providers; throws when a corpus is missing, a hash
    /// does not verify, or the provider config is incomplete.
    explicit Service(const ServiceConfig& config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    HttpReply handle_query(const std::string& body) const;
    HttpReply handle_feedback(const std::string& body);
    HttpReply handle_health() const;

    /// Binds and serves until stop(). Returns false if binding failed.
    bool listen(const std::string& host, int port);
    /// Binds to an ephemeral port; serve with listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool is_running() const;

    const Workbench& workbench() const noexcept { return workbench_; }

private:
    void install_routes();

    ServiceConfig config_;
    Workbench workbench_;
    std::unique_ptr<CompletionProvider> llm_;
    PipelineOptions options_;
    eval::FeedbackLog feedback_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace ctxsql
