#pragma once

#include "ctxsql/embedding.hpp"
#include "ctxsql/text_splitter.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ctxsql {

inline constexpr std::size_t kDefaultTopK = 8;

struct ScoredChunk {
    Chunk chunk;
    double similarity = 0.0;
};

/// Exact brute-force cosine index. Immutable after construction; safe for
/// concurrent retrieval.
class VectorIndex {
public:
    VectorIndex() = default;

    /// Throws if vectors and chunks differ in count, dimensions differ, or
    /// chunk ids repeat.
    VectorIndex(std::vector<Chunk> chunks, const std::vector<EmbeddingVector>& vectors, std::string provider_id,
                std::string corpus_hash = {});

    std::size_t size() const noexcept { return chunks_.size(); }
    bool empty() const noexcept { return chunks_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::string& provider_id() const noexcept { return provider_id_; }
    const std::string& corpus_hash() const noexcept { return corpus_hash_; }
    const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
    EmbeddingVector vector_at(std::size_t i) const;

    /// Top-k by cosine similarity, descending, ties by (doc_id, seq).
    /// Returns min(k, size()) entries; an empty index yields an empty list.
    std::vector<ScoredChunk> retrieve_top_k(const EmbeddingVector& query, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

private:
    std::vector<Chunk> chunks_;
    std::vector<double> rows_;  // row-major, size() x dim_
    std::vector<double> norms_;
    std::size_t dim_ = 0;
    std::string provider_id_;
    std::string corpus_hash_;
};

/// Embeds every chunk, then builds the index. Nothing is produced if
/// embedding fails.
VectorIndex build_index(std::vector<Chunk> chunks, const EmbeddingProvider& provider, std::string corpus_hash = {});

std::vector<ScoredChunk> retrieve_top_k(const VectorIndex& index, const EmbeddingVector& query, std::size_t k);

}  // namespace ctxsql
