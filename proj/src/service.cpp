#include "ctxsql/service.hpp"

#include "ctxsql/json_io.hpp"

#include <httplib.h>

#include <chrono>

namespace ctxsql {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

HttpReply error_reply(int status, std::string_view kind, const std::string& message) {
    return HttpReply{status, json{{"error", {{"kind", kind}, {"message", message}}}}};
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::unique_ptr<CompletionProvider> make_llm(const ServiceConfig& config) {
    if (config.provider == "replay") {
        if (!config.replay_path) {
            throw Error("service: replay mode needs replay_file");
        }
        if (!std::filesystem::exists(*config.replay_path)) {
            throw Error("service: replay file not found: " + config.replay_path->string());
        }
        return std::make_unique<ReplayProvider>(ReplayProvider::from_file(config.replay_path->string()));
    }
    if (config.provider == "remote") {
        return std::make_unique<RemoteChatProvider>(RemoteEndpoint::from_environment("CTXSQL_MODEL", "gpt-4"));
    }
    throw Error("service: provider must be replay or remote, got '" + config.provider + "'");
}

Workbench open_workbench(const ServiceConfig& config) {
    if (!std::filesystem::exists(config.workbench_path)) {
        throw Error("service: workbench config not found: " + config.workbench_path.string());
    }
    const WorkbenchConfig wb = WorkbenchConfig::from_file(config.workbench_path);
    std::vector<std::filesystem::path> inputs{wb.schema_path};
    inputs.insert(inputs.end(), wb.context_documents.begin(), wb.context_documents.end());
    for (const auto& p : inputs) {
        if (!std::filesystem::exists(p)) {
            throw Error("service: corpus input not found: " + p.string());
        }
    }
    Workbench workbench = Workbench::open(wb, config.index_dir);
    for (const auto& [phase, expected] : config.expected_hashes) {
        if (workbench.corpus(phase).corpus_hash != expected) {
            throw Error("service: " + std::string(phase_name(phase)) + " corpus hash " +
                        workbench.corpus(phase).corpus_hash + " does not match expected " + expected);
        }
    }
    return workbench;
}

}  // namespace

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("service config " + path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    ServiceConfig c;
    try {
        c.host = doc.value("host", c.host);
        c.port = doc.value("port", c.port);
        c.workbench_path = resolve(base, doc.at("workbench").get<std::string>());
        if (doc.contains("index_dir")) {
            c.index_dir = resolve(base, doc.at("index_dir").get<std::string>());
        }
        c.provider = doc.value("provider", c.provider);
        if (doc.contains("replay_file")) {
            c.replay_path = resolve(base, doc.at("replay_file").get<std::string>());
        }
        c.feedback_log = resolve(base, doc.value("feedback_log", std::string("feedback.jsonl")));
        if (doc.contains("band_thresholds")) {
            c.band_thresholds = BandThresholds{doc["band_thresholds"].at("p25").get<double>(),
                                               doc["band_thresholds"].at("p75").get<double>()};
        }
        if (doc.contains("expected_hashes")) {
            for (const auto& [key, value] : doc.at("expected_hashes").items()) {
                const auto phase = parse_phase(key);
                if (!phase) {
                    throw Error("service config: unknown phase '" + key + "' in expected_hashes");
                }
                c.expected_hashes[*phase] = value.get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw Error("service config " + path.string() + ": " + e.what());
    }
    return c;
}

Service::Service(const ServiceConfig& config)
    : config_(config),
      workbench_(open_workbench(config)),
      llm_(make_llm(config)),
      options_(workbench_.pipeline_options(system_clock_ms())),
      feedback_(config.feedback_log),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Service::~Service() {
    stop();
}

HttpReply Service::handle_query(const std::string& body) const {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::parse_error& e) {
        return error_reply(400, "malformed_request", std::string("body is not JSON: ") + e.what());
    }
    if (!request.is_object() || !request.contains("nlq") || !request["nlq"].is_string()) {
        return error_reply(400, "malformed_request", "nlq must be a string");
    }
    const std::string nlq = request["nlq"].get<std::string>();
    if (trim(nlq).empty()) {
        return error_reply(400, "empty_nlq", "nlq is empty");
    }
    if (!request.contains("phase") || !request["phase"].is_string()) {
        return error_reply(422, "unknown_phase", "phase is required (phase1, phase2 or phase3)");
    }
    const auto phase = parse_phase(request["phase"].get<std::string>());
    if (!phase) {
        return error_reply(422, "unknown_phase", "unknown phase '" + request["phase"].get<std::string>() + "'");
    }
    std::string nlq_id;
    if (request.contains("nlq_id") && request["nlq_id"].is_string()) {
        nlq_id = request["nlq_id"].get<std::string>();
    }

    const PipelineEnvironment env{workbench_.corpus(*phase), workbench_.embedder(), *llm_, options_};
    try {
        const QueryResult result = answer_nlq(QueryRequest{nlq, *phase, std::nullopt, nlq_id}, env);
        json out = result;
        if (config_.band_thresholds && result.score) {
            out["band"] = band_name(band_for(result.score->value, *config_.band_thresholds));
        }
        return HttpReply{200, std::move(out)};
    } catch (const PipelineError& e) {
        json err{{"kind", provider_error_kind_name(e.cause().kind())}, {"message", e.what()}};
        if (e.cause().http_status()) {
            err["http_status"] = e.cause().http_status();
        }
        if (e.cause().retry_after_seconds()) {
            err["retry_after_seconds"] = *e.cause().retry_after_seconds();
        }
        return HttpReply{502, json{{"error", err}, {"retrieved", e.retrieved()}, {"run_metadata", e.metadata()}}};
    } catch (const std::exception& e) {
        return error_reply(500, "internal", e.what());
    }
}

HttpReply Service::handle_feedback(const std::string& body) {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::parse_error& e) {
        return error_reply(400, "malformed_request", std::string("body is not JSON: ") + e.what());
    }
    if (!request.is_object()) {
        return error_reply(400, "malformed_request", "expected an object");
    }
    const auto text = [&](const char* key) -> std::optional<std::string> {
        if (request.contains(key) && request[key].is_string()) {
            return request[key].get<std::string>();
        }
        return std::nullopt;
    };
    eval::LabelRecord record;
    if (auto id = text("id"); id && !id->empty()) {
        record.id = *id;
    } else if (auto nlq = text("nlq"); nlq && !trim(*nlq).empty()) {
        record.id = "nlq:" + sha256_hex(*nlq).substr(0, 16);
    } else {
        return error_reply(400, "malformed_request", "id or nlq is required");
    }
    const auto phase = text("phase") ? parse_phase(*text("phase")) : std::nullopt;
    if (!phase) {
        return error_reply(400, "malformed_request", "phase must be phase1, phase2 or phase3");
    }
    record.phase = *phase;
    const auto outcome = text("outcome") ? eval::parse_outcome(*text("outcome")) : std::nullopt;
    if (!outcome) {
        return error_reply(400, "malformed_request", "outcome must be pass, fail or partial_pass");
    }
    record.outcome = *outcome;
    const auto labeler = text("labeler");
    if (!labeler || trim(*labeler).empty()) {
        return error_reply(400, "malformed_request", "labeler is required");
    }
    record.labeler = *labeler;
    record.rationale = text("rationale");
    record.timestamp_ms = now_ms();
    try {
        const std::size_t seq = feedback_.append(record);
        return HttpReply{200, json{{"stored", std::to_string(seq)}, {"id", record.id}}};
    } catch (const std::exception& e) {
        return error_reply(500, "storage", e.what());
    }
}

HttpReply Service::handle_health() const {
    json phases = json::array();
    for (Phase phase : kAllPhases) {
        const PhaseCorpus& c = workbench_.corpus(phase);
        phases.push_back({{"phase", phase_short_name(phase)},
                          {"name", phase_name(phase)},
                          {"corpus_hash", c.corpus_hash},
                          {"index_size", c.index.size()},
                          {"documents", c.doc_ids},
                          {"tables", c.catalog.size()}});
    }
    return HttpReply{200, json{{"status", "ok"},
                               {"provider", config_.provider},
                               {"provider_id", llm_->id()},
                               {"embedding_provider", workbench_.embedder().id()},
                               {"phases", phases}}};
}

void Service::install_routes() {
    const auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(reply.body.dump(), "application/json");
    };
    server_->Post("/api/query", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_query(req.body));
    });
    server_->Post("/api/feedback", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_feedback(req.body));
    });
    server_->Get("/api/health",
                 [this, send](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
    server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

bool Service::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

int Service::bind_to_any_port(const std::string& host) {
    return server_->bind_to_any_port(host);
}

bool Service::listen_after_bind() {
    return server_->listen_after_bind();
}

void Service::stop() {
    if (server_) {
        server_->stop();
    }
}

bool Service::is_running() const {
    return server_->is_running();
}

}  // namespace ctxsql
