#pragma once

// Assembles the three phase corpora from a workbench config file and keeps
// the providers and pipeline options that go with them.

#include "ctxsql/pipeline.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctxsql {

/// Workbench config (JSON). Relative paths resolve against the config
/// file's directory.
///
///   {"schema": "sample_schema.json",
///    "narrowed_tables": ["CASE_MASTER", ...],
///    "context_documents": ["business_context.md"],
///    "chunk_size": 1000, "chunk_overlap": 200, "top_k": 8,
///    "embedding": "local" | "remote",
///    "persona_file": "persona.txt",
///    "refusal_patterns_file": "refusal_patterns.txt",
///    "max_in_flight": 4}
struct WorkbenchConfig {
    std::filesystem::path schema_path;
    std::vector<std::string> narrowed_tables;
    std::vector<std::filesystem::path> context_documents;
    std::size_t chunk_size = kDefaultChunkSize;
    std::size_t chunk_overlap = kDefaultChunkOverlap;
    std::size_t top_k = kDefaultTopK;
    std::string embedding = "local";
    std::optional<std::filesystem::path> persona_path;
    std::optional<std::filesystem::path> refusal_patterns_path;
    std::size_t max_in_flight = 4;

    static WorkbenchConfig from_file(const std::filesystem::path& path);
};

struct CorpusDocument {
    std::string doc_id;
    std::string text;
};

class Workbench {
public:
    /// Loads catalogs and documents, then embeds and indexes every phase
    /// corpus (or loads indexes from `index_dir` when given).
    static Workbench open(const WorkbenchConfig& config,
                          const std::optional<std::filesystem::path>& index_dir = std::nullopt);

    const WorkbenchConfig& config() const noexcept { return config_; }
    const PhaseCorpus& corpus(Phase phase) const;
    const EmbeddingProvider& embedder() const noexcept { return *embedder_; }
    const SchemaCatalog& full_catalog() const noexcept { return full_catalog_; }
    const std::vector<DroppedForeignKey>& narrowing_drops() const noexcept { return narrowing_drops_; }
    const std::vector<CorpusDocument>& documents(Phase phase) const;
    const std::string& persona() const noexcept { return persona_; }
    const RefusalPatterns& refusal_patterns() const noexcept { return refusals_; }

    /// Writes one index file per phase plus a manifest into `dir`.
    void save_indexes(const std::filesystem::path& dir) const;

    PipelineOptions pipeline_options(Clock clock) const;

private:
    Workbench() = default;

    WorkbenchConfig config_;
    SchemaCatalog full_catalog_;
    std::vector<DroppedForeignKey> narrowing_drops_;
    std::array<std::vector<CorpusDocument>, 3> documents_;
    std::array<std::shared_ptr<PhaseCorpus>, 3> corpora_;
    std::shared_ptr<EmbeddingProvider> embedder_;
    std::string persona_;
    RefusalPatterns refusals_;
};

std::string index_file_name(Phase phase);

/// SHA-256 over the phase's documents (doc id, NUL, text, NUL for each).
std::string corpus_hash(const std::vector<CorpusDocument>& documents);

}  // namespace ctxsql
