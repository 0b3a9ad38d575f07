#include "ctxsql/json_io.hpp"

namespace ctxsql {

using nlohmann::json;

Phase phase_from_json(const json& j) {
    if (!j.is_string()) {
        throw Error("phase must be a string");
    }
    const auto phase = parse_phase(j.get<std::string>());
    if (!phase) {
        throw Error("unknown phase: " + j.get<std::string>());
    }
    return *phase;
}

void to_json(json& j, const SqlFeatures& f) {
    j = json{{"number_of_tables", f.number_of_tables},
             {"number_of_joins", f.number_of_joins},
             {"number_of_where_clauses", f.number_of_where_clauses},
             {"has_group_by", f.has_group_by},
             {"has_order", f.has_order},
             {"has_aggregation", f.has_aggregation}};
}

void from_json(const json& j, SqlFeatures& f) {
    j.at("number_of_tables").get_to(f.number_of_tables);
    j.at("number_of_joins").get_to(f.number_of_joins);
    j.at("number_of_where_clauses").get_to(f.number_of_where_clauses);
    j.at("has_group_by").get_to(f.has_group_by);
    j.at("has_order").get_to(f.has_order);
    j.at("has_aggregation").get_to(f.has_aggregation);
}

void to_json(json& j, const ValidationReport& r) {
    json columns = json::array();
    for (const auto& c : r.unknown_columns) {
        columns.push_back({{"qualifier", c.qualifier}, {"table", c.table}, {"column", c.column}});
    }
    j = json{{"ok", r.ok}, {"unknown_tables", r.unknown_tables}, {"unknown_columns", columns}, {"notes", r.notes}};
}

void from_json(const json& j, ValidationReport& r) {
    j.at("ok").get_to(r.ok);
    j.at("unknown_tables").get_to(r.unknown_tables);
    r.unknown_columns.clear();
    for (const auto& c : j.at("unknown_columns")) {
        r.unknown_columns.push_back(UnknownColumn{c.at("qualifier").get<std::string>(), c.at("table").get<std::string>(),
                                                  c.at("column").get<std::string>()});
    }
    j.at("notes").get_to(r.notes);
}

void to_json(json& j, const ExtractionResult& e) {
    j = json{{"kind", extraction_kind_name(e.kind)}};
    if (e.sql_text) {
        j["sql_text"] = *e.sql_text;
    }
    if (e.refusal_text) {
        j["refusal_text"] = *e.refusal_text;
    }
}

void from_json(const json& j, ExtractionResult& e) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sql") {
        e.kind = ExtractionKind::sql;
    } else if (kind == "refusal") {
        e.kind = ExtractionKind::refusal;
    } else if (kind == "unparseable") {
        e.kind = ExtractionKind::unparseable;
    } else {
        throw Error("unknown extraction kind: " + kind);
    }
    e.sql_text = j.contains("sql_text") ? std::optional(j.at("sql_text").get<std::string>()) : std::nullopt;
    e.refusal_text =
        j.contains("refusal_text") ? std::optional(j.at("refusal_text").get<std::string>()) : std::nullopt;
}

void to_json(json& j, const RetrievedRef& r) {
    j = json{{"chunk_id", r.chunk_id},
             {"doc_id", r.doc_id},
             {"seq", r.seq},
             {"similarity", r.similarity},
             {"preview", r.preview}};
}

void from_json(const json& j, RetrievedRef& r) {
    j.at("chunk_id").get_to(r.chunk_id);
    j.at("doc_id").get_to(r.doc_id);
    j.at("seq").get_to(r.seq);
    j.at("similarity").get_to(r.similarity);
    r.preview = j.value("preview", std::string{});
}

void to_json(json& j, const RunMetadata& m) {
    j = json{{"provider", m.provider_id},
             {"embedding_provider", m.embedding_provider_id},
             {"phase", phase_name(m.phase)},
             {"started_at_ms", m.started_at_ms},
             {"finished_at_ms", m.finished_at_ms},
             {"latency_ms", m.latency_ms}};
    if (m.temperature) {
        j["temperature"] = *m.temperature;
    }
    if (m.token_usage) {
        j["token_usage"] = {{"prompt_tokens", m.token_usage->prompt_tokens},
                            {"completion_tokens", m.token_usage->completion_tokens},
                            {"total_tokens", m.token_usage->total_tokens}};
    }
}

void from_json(const json& j, RunMetadata& m) {
    j.at("provider").get_to(m.provider_id);
    m.embedding_provider_id = j.value("embedding_provider", std::string{});
    m.phase = phase_from_json(j.at("phase"));
    m.started_at_ms = j.value("started_at_ms", std::int64_t{0});
    m.finished_at_ms = j.value("finished_at_ms", std::int64_t{0});
    m.latency_ms = j.value("latency_ms", std::int64_t{0});
    m.temperature = j.contains("temperature") ? std::optional(j.at("temperature").get<double>()) : std::nullopt;
    if (j.contains("token_usage")) {
        const json& u = j.at("token_usage");
        m.token_usage = TokenUsage{u.at("prompt_tokens").get<std::uint64_t>(),
                                   u.at("completion_tokens").get<std::uint64_t>(),
                                   u.at("total_tokens").get<std::uint64_t>()};
    }
}

void to_json(json& j, const QueryResult& r) {
    j = json{{"nlq", r.nlq},
             {"nlq_id", r.nlq_id},
             {"phase", phase_name(r.run_metadata.phase)},
             {"extraction", r.extraction},
             {"retrieved", r.retrieved}};
    if (r.validation) {
        j["validation"] = *r.validation;
    }
    if (r.features) {
        j["features"] = *r.features;
    }
    if (r.score) {
        j["score"] = r.score->value;
    }
    if (r.analysis_error) {
        j["analysis_error"] = *r.analysis_error;
    }
    j["run_metadata"] = r.run_metadata;
}

void from_json(const json& j, QueryResult& r) {
    j.at("nlq").get_to(r.nlq);
    r.nlq_id = j.value("nlq_id", std::string{});
    j.at("extraction").get_to(r.extraction);
    j.at("retrieved").get_to(r.retrieved);
    r.validation = j.contains("validation") ? std::optional(j.at("validation").get<ValidationReport>()) : std::nullopt;
    r.features = j.contains("features") ? std::optional(j.at("features").get<SqlFeatures>()) : std::nullopt;
    r.score = j.contains("score") ? std::optional(ComplexityScore{j.at("score").get<std::uint32_t>()}) : std::nullopt;
    r.analysis_error =
        j.contains("analysis_error") ? std::optional(j.at("analysis_error").get<std::string>()) : std::nullopt;
    j.at("run_metadata").get_to(r.run_metadata);
}

void to_json(json& j, const FiveNumberSummary& s) {
    j = json{{"min", s.min}, {"p25", s.p25}, {"median", s.median}, {"p75", s.p75}, {"max", s.max}};
}

}  // namespace ctxsql
