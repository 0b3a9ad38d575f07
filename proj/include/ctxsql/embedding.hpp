#pragma once

#include "ctxsql/util.hpp"

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctxsql {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    double norm() const noexcept;
    bool operator==(const EmbeddingVector&) const = default;
};

/// Failure talking to a remote model endpoint (embeddings or chat).
class ProviderError : public Error {
public:
    enum class Kind { transport, auth, rate_limit, http, bad_response, replay_miss, dimension_mismatch };

    ProviderError(Kind kind, std::string message, int http_status = 0,
                  std::optional<double> retry_after_seconds = std::nullopt);

    Kind kind() const noexcept { return kind_; }
    int http_status() const noexcept { return http_status_; }
    std::optional<double> retry_after_seconds() const noexcept { return retry_after_; }
    bool retryable() const noexcept;

private:
    Kind kind_;
    int http_status_;
    std::optional<double> retry_after_;
};

std::string_view provider_error_kind_name(ProviderError::Kind kind) noexcept;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string id() const = 0;
    /// One vector per text, all of the same dimension.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const = 0;
};

/// Hashed character-trigram frequencies, L2-normalized. Offline and
/// deterministic.
class LocalHashEmbedder final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDim = 256;

    std::string id() const override { return "local-trigram-256"; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

    static EmbeddingVector embed_one(std::string_view text);
};

struct RemoteEndpoint {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::string model;
    std::chrono::seconds timeout{60};
    std::size_t max_in_flight = 4;

    /// Reads CTXSQL_API_BASE, CTXSQL_API_KEY and the given model variable.
    static RemoteEndpoint from_environment(const char* model_variable, std::string default_model);
};

/// Embeddings over the widely used `POST {base}/embeddings` protocol.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    explicit RemoteEmbedder(RemoteEndpoint endpoint, std::size_t batch_size = 64);

    std::string id() const override { return "remote:" + endpoint_.model; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

private:
    RemoteEndpoint endpoint_;
    std::size_t batch_size_;
};

/// Calls provider.embed and enforces one output per input with a shared
/// dimension.
std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const EmbeddingProvider& provider);

/// Cosine similarity; 0 when either vector has zero norm.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace ctxsql
