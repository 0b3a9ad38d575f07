#pragma once

// Machine-readable record forms shared by the CLI, run files and the HTTP
// service.

#include "ctxsql/banding.hpp"
#include "ctxsql/pipeline.hpp"

#include <json.hpp>

namespace ctxsql {

void to_json(nlohmann::json& j, const SqlFeatures& f);
void from_json(const nlohmann::json& j, SqlFeatures& f);

void to_json(nlohmann::json& j, const ValidationReport& r);
void from_json(const nlohmann::json& j, ValidationReport& r);

void to_json(nlohmann::json& j, const ExtractionResult& e);
void from_json(const nlohmann::json& j, ExtractionResult& e);

void to_json(nlohmann::json& j, const RetrievedRef& r);
void from_json(const nlohmann::json& j, RetrievedRef& r);

void to_json(nlohmann::json& j, const RunMetadata& m);
void from_json(const nlohmann::json& j, RunMetadata& m);

void to_json(nlohmann::json& j, const QueryResult& r);
void from_json(const nlohmann::json& j, QueryResult& r);

void to_json(nlohmann::json& j, const FiveNumberSummary& s);

/// Phase from its canonical or short name; throws Error otherwise.
Phase phase_from_json(const nlohmann::json& j);

}  // namespace ctxsql
