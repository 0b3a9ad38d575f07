#include "ctxsql/pipeline.hpp"

#include <chrono>

namespace ctxsql {

Clock system_clock_ms() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

Clock fixed_clock_ms(std::int64_t value) {
    return [value] { return value; };
}

PipelineError::PipelineError(const ProviderError& cause, std::vector<RetrievedRef> retrieved, RunMetadata metadata)
    : Error(std::string(cause.what())), cause_(cause), retrieved_(std::move(retrieved)), metadata_(std::move(metadata)) {}

namespace {

std::string preview_of(const std::string& text, std::size_t max_chars) {
    if (text.size() <= max_chars) {
        return text;
    }
    std::size_t cut = max_chars;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
        --cut;  // stay on a UTF-8 boundary
    }
    return text.substr(0, cut) + "...";
}

}  // namespace

QueryResult answer_nlq(const QueryRequest& request, const PipelineEnvironment& env) {
    if (trim(request.nlq).empty()) {
        throw Error("answer_nlq: empty question");
    }
    if (request.phase != env.corpus.phase) {
        throw Error("answer_nlq: request for " + std::string(phase_name(request.phase)) +
                    " but environment is built for " + std::string(phase_name(env.corpus.phase)));
    }

    QueryResult result;
    result.nlq = request.nlq;
    result.nlq_id = request.nlq_id;
    result.run_metadata.provider_id = env.llm.id();
    result.run_metadata.embedding_provider_id = env.embedder.id();
    result.run_metadata.phase = request.phase;
    if (dynamic_cast<const RemoteChatProvider*>(&env.llm) != nullptr) {
        result.run_metadata.temperature = RemoteChatProvider::kTemperature;
    }
    result.run_metadata.started_at_ms = env.options.clock();

    try {
        std::vector<ScoredChunk> retrieved;
        if (!env.corpus.index.empty()) {
            const EmbeddingVector query = embed({request.nlq}, env.embedder).front();
            retrieved = env.corpus.index.retrieve_top_k(query, env.options.top_k);
        }
        for (const auto& scored : retrieved) {
            result.retrieved.push_back(RetrievedRef{scored.chunk.id(), scored.chunk.doc_id, scored.chunk.seq,
                                                    scored.similarity,
                                                    preview_of(scored.chunk.text, env.options.preview_chars)});
        }

        const CompletionRequest completion{assemble_prompt(request.nlq, retrieved, env.options.persona), request.phase,
                                           request.nlq_id};
        const LlmResponse response = complete(completion, env.llm);
        result.run_metadata.token_usage = response.token_usage;
        result.run_metadata.latency_ms = response.latency.count();
        result.extraction = extract_sql(response, env.options.refusal_patterns);
    } catch (const ProviderError& e) {
        result.run_metadata.finished_at_ms = env.options.clock();
        throw PipelineError(e, std::move(result.retrieved), result.run_metadata);
    }

    if (result.extraction.kind == ExtractionKind::sql) {
        const std::string& sql = *result.extraction.sql_text;
        try {
            SqlFeatures features = extract_features(sql);
            result.validation = validate_against_schema(sql, env.corpus.catalog);
            result.features = features;
            result.score = complexity_score(ComplexityInput{features, request.time_to_create.value_or(0)});
        } catch (const Error& e) {
            result.analysis_error = std::string("extracted SQL could not be analyzed: ") + e.what();
            result.extraction = ExtractionResult{};
            result.validation.reset();
            result.features.reset();
            result.score.reset();
        }
    }
    result.run_metadata.finished_at_ms = env.options.clock();
    return result;
}

}  // namespace ctxsql
