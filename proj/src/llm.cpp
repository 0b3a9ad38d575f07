#include "ctxsql/llm.hpp"

#include <json.hpp>

namespace ctxsql {

using nlohmann::json;

const std::string_view kDefaultPersona =
    "You are an Oracle SQL expert. Given a question, generate a syntactically correct Oracle SQL query. "
    "Avoid querying non-existent columns and pay close attention to column-table associations. "
    "For keywords in the WHERE clause, ensure case-insensitive data comparison, for example, "
    "'upper(STATE_NAME) = upper('deleted')'. If you are unable to generate the SQL query, please state that "
    "you cannot create the query without additional information or context, do not attempt to make "
    "anything up.";

std::string_view phase_name(Phase phase) noexcept {
    switch (phase) {
    case Phase::schema_only: return "schema_only";
    case Phase::schema_plus_context: return "schema_plus_context";
    case Phase::narrowed_schema: return "narrowed_schema";
    }
    return "schema_only";
}

std::string_view phase_short_name(Phase phase) noexcept {
    switch (phase) {
    case Phase::schema_only: return "phase1";
    case Phase::schema_plus_context: return "phase2";
    case Phase::narrowed_schema: return "phase3";
    }
    return "phase1";
}

std::optional<Phase> parse_phase(std::string_view text) noexcept {
    for (Phase p : kAllPhases) {
        if (text == phase_name(p) || text == phase_short_name(p)) {
            return p;
        }
    }
    if (text == "1") return Phase::schema_only;
    if (text == "2") return Phase::schema_plus_context;
    if (text == "3") return Phase::narrowed_schema;
    return std::nullopt;
}

std::string PromptBundle::render_user_message() const {
    std::string out;
    if (!context_blocks.empty()) {
        out += "Context:\n";
        for (const auto& block : context_blocks) {
            out += block;
            out += "\n\n";
        }
    }
    out += "Question: ";
    out += user_nlq;
    return out;
}

PromptBundle assemble_prompt(std::string_view nlq, const std::vector<ScoredChunk>& retrieved,
                             std::string_view persona) {
    if (persona.empty()) {
        throw Error("assemble_prompt: persona must not be empty");
    }
    if (trim(nlq).empty()) {
        throw Error("assemble_prompt: question must not be empty");
    }
    PromptBundle bundle;
    bundle.system_text = std::string(persona);
    bundle.user_nlq = std::string(nlq);
    bundle.context_blocks.reserve(retrieved.size());
    for (const auto& scored : retrieved) {
        bundle.context_blocks.push_back("[" + scored.chunk.id() + "]\n" + scored.chunk.text);
    }
    return bundle;
}

ReplayProvider::ReplayProvider(std::vector<Record> records, std::string source_name)
    : source_name_(std::move(source_name)) {
    for (auto& record : records) {
        if (!record.nlq.empty()) {
            by_text_[{record.phase, record.nlq}] = record.response;
        }
        if (!by_id_.emplace(std::make_pair(record.phase, record.nlq_id), std::move(record.response)).second) {
            throw Error("replay: duplicate record for (" + std::string(phase_short_name(record.phase)) + ", " +
                        record.nlq_id + ")");
        }
    }
}

ReplayProvider ReplayProvider::from_json(std::string_view text, std::string source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("replay file " + source_name + ": " + e.what());
    }
    const json* records = &doc;
    if (doc.is_object()) {
        auto it = doc.find("records");
        if (it == doc.end()) {
            throw Error("replay file " + source_name + ": missing 'records'");
        }
        records = &*it;
    }
    if (!records->is_array()) {
        throw Error("replay file " + source_name + ": records must be a list");
    }
    std::vector<Record> parsed;
    for (std::size_t i = 0; i < records->size(); ++i) {
        const json& r = (*records)[i];
        const std::string where = "replay file " + source_name + " record " + std::to_string(i);
        if (!r.is_object() || !r.contains("phase") || !r.contains("nlq_id") || !r.contains("response")) {
            throw Error(where + ": expected {phase, nlq_id, response}");
        }
        const auto phase = parse_phase(r.at("phase").get<std::string>());
        if (!phase) {
            throw Error(where + ": unknown phase " + r.at("phase").dump());
        }
        parsed.push_back(Record{*phase, r.at("nlq_id").get<std::string>(), r.value("nlq", std::string{}),
                                r.at("response").get<std::string>()});
    }
    return ReplayProvider(std::move(parsed), std::move(source_name));
}

ReplayProvider ReplayProvider::from_file(const std::string& path) {
    return from_json(read_file(path), path);
}

LlmResponse ReplayProvider::complete(const CompletionRequest& request) const {
    const std::map<std::pair<Phase, std::string>, std::string>::const_iterator miss = by_id_.end();
    auto it = miss;
    if (!request.nlq_id.empty()) {
        it = by_id_.find({request.phase, request.nlq_id});
    }
    if (it == miss) {
        if (auto by_text = by_text_.find({request.phase, request.bundle.user_nlq}); by_text != by_text_.end()) {
            return LlmResponse{by_text->second, id(), std::chrono::milliseconds{0}, std::nullopt};
        }
        throw ProviderError(ProviderError::Kind::replay_miss,
                            "replay miss: no recorded response for (" + std::string(phase_short_name(request.phase)) +
                                ", " + (request.nlq_id.empty() ? "\"" + request.bundle.user_nlq + "\"" : request.nlq_id) +
                                ")");
    }
    return LlmResponse{it->second, id(), std::chrono::milliseconds{0}, std::nullopt};
}

LlmResponse complete(const CompletionRequest& request, const CompletionProvider& provider) {
    return provider.complete(request);
}

}  // namespace ctxsql
