#pragma once

// Single-question path: embed -> retrieve -> prompt -> complete -> extract ->
// validate -> score.

#include "ctxsql/llm.hpp"
#include "ctxsql/phase.hpp"
#include "ctxsql/schema_catalog.hpp"
#include "ctxsql/sql_extraction.hpp"
#include "ctxsql/sql_features.hpp"
#include "ctxsql/sql_validation.hpp"
#include "ctxsql/vector_index.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ctxsql {

/// Catalog and retrieval index backing one phase.
struct PhaseCorpus {
    Phase phase = Phase::schema_only;
    SchemaCatalog catalog;
    VectorIndex index;
    std::vector<std::string> doc_ids;
    std::string corpus_hash;
};

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;

Clock system_clock_ms();
/// Always returns 0; used for replay runs so results are byte-stable.
Clock fixed_clock_ms(std::int64_t value = 0);

struct PipelineOptions {
    std::string persona = std::string(kDefaultPersona);
    RefusalPatterns refusal_patterns;
    std::size_t top_k = kDefaultTopK;
    std::size_t preview_chars = 160;
    Clock clock = system_clock_ms();
};

struct QueryRequest {
    std::string nlq;
    Phase phase = Phase::schema_only;
    std::optional<std::uint32_t> time_to_create;
    std::string nlq_id;
};

struct RetrievedRef {
    std::string chunk_id;
    std::string doc_id;
    std::size_t seq = 0;
    double similarity = 0.0;
    std::string preview;

    bool operator==(const RetrievedRef&) const = default;
};

struct RunMetadata {
    std::string provider_id;
    std::string embedding_provider_id;
    Phase phase = Phase::schema_only;
    std::int64_t started_at_ms = 0;
    std::int64_t finished_at_ms = 0;
    std::int64_t latency_ms = 0;
    std::optional<double> temperature;
    std::optional<TokenUsage> token_usage;
};

struct QueryResult {
    std::string nlq;
    std::string nlq_id;
    ExtractionResult extraction;
    std::vector<RetrievedRef> retrieved;
    /// Present iff extraction.kind == sql.
    std::optional<ValidationReport> validation;
    std::optional<SqlFeatures> features;
    std::optional<ComplexityScore> score;
    /// Set when extracted SQL could not be analyzed; the extraction is then
    /// downgraded to unparseable.
    std::optional<std::string> analysis_error;
    RunMetadata run_metadata;
};

/// Provider failure with whatever provenance was collected before it.
class PipelineError : public Error {
public:
    PipelineError(const ProviderError& cause, std::vector<RetrievedRef> retrieved, RunMetadata metadata);

    const ProviderError& cause() const noexcept { return cause_; }
    const std::vector<RetrievedRef>& retrieved() const noexcept { return retrieved_; }
    const RunMetadata& metadata() const noexcept { return metadata_; }

private:
    ProviderError cause_;
    std::vector<RetrievedRef> retrieved_;
    RunMetadata metadata_;
};

struct PipelineEnvironment {
    const PhaseCorpus& corpus;
    const EmbeddingProvider& embedder;
    const CompletionProvider& llm;
    const PipelineOptions& options;
};

/// Stateless: the result depends only on the request and the environment.
/// Throws PipelineError on provider failure and Error when the request phase
/// does not match the environment.
QueryResult answer_nlq(const QueryRequest& request, const PipelineEnvironment& env);

}  // namespace ctxsql
