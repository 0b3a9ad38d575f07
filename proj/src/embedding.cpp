#include "ctxsql/embedding.hpp"

#include "ctxsql/simd/vector_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ctxsql {

double EmbeddingVector::norm() const noexcept {
    return std::sqrt(simd::squared_norm(values));
}

ProviderError::ProviderError(Kind kind, std::string message, int http_status, std::optional<double> retry_after)
    : Error(std::move(message)), kind_(kind), http_status_(http_status), retry_after_(retry_after) {}

bool ProviderError::retryable() const noexcept {
    return kind_ == Kind::transport || kind_ == Kind::rate_limit || (kind_ == Kind::http && http_status_ >= 500);
}

std::string_view provider_error_kind_name(ProviderError::Kind kind) noexcept {
    switch (kind) {
    case ProviderError::Kind::transport: return "transport";
    case ProviderError::Kind::auth: return "auth";
    case ProviderError::Kind::rate_limit: return "rate_limit";
    case ProviderError::Kind::http: return "http";
    case ProviderError::Kind::bad_response: return "bad_response";
    case ProviderError::Kind::replay_miss: return "replay_miss";
    case ProviderError::Kind::dimension_mismatch: return "dimension_mismatch";
    }
    return "unknown";
}

EmbeddingVector LocalHashEmbedder::embed_one(std::string_view text) {
    EmbeddingVector vec;
    vec.values.assign(kDim, 0.0);
    if (text.empty()) {
        return vec;
    }
    const std::string lowered = to_lower(text);
    const std::string_view view(lowered);
    if (view.size() < 3) {
        vec.values[fnv1a32(view) % kDim] += 1.0;
    } else {
        for (std::size_t i = 0; i + 3 <= view.size(); ++i) {
            vec.values[fnv1a32(view.substr(i, 3)) % kDim] += 1.0;
        }
    }
    const double norm = vec.norm();
    simd::scale(vec.values, 1.0 / norm);
    return vec;
}

std::vector<EmbeddingVector> LocalHashEmbedder::embed(const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(embed_one(text));
    }
    return out;
}

RemoteEndpoint RemoteEndpoint::from_environment(const char* model_variable, std::string default_model) {
    RemoteEndpoint endpoint;
    const char* base = std::getenv("CTXSQL_API_BASE");
    endpoint.base_url = base != nullptr ? base : "https://api.openai.com/v1";
    const char* key = std::getenv("CTXSQL_API_KEY");
    endpoint.api_key = key != nullptr ? key : "";
    const char* model = model_variable != nullptr ? std::getenv(model_variable) : nullptr;
    endpoint.model = model != nullptr ? model : std::move(default_model);
    return endpoint;
}

std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const EmbeddingProvider& provider) {
    if (texts.empty()) {
        throw Error("embed requires at least one text");
    }
    auto vectors = provider.embed(texts);
    if (vectors.size() != texts.size()) {
        throw ProviderError(ProviderError::Kind::bad_response,
                            "provider " + provider.id() + " returned " + std::to_string(vectors.size()) +
                                " vectors for " + std::to_string(texts.size()) + " texts");
    }
    const std::size_t dim = vectors.front().dim();
    for (const auto& v : vectors) {
        if (v.dim() != dim || dim == 0) {
            throw ProviderError(ProviderError::Kind::dimension_mismatch,
                                "provider " + provider.id() + " returned inconsistent dimensions (" +
                                    std::to_string(dim) + " vs " + std::to_string(v.dim()) + ")");
        }
    }
    return vectors;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ProviderError(ProviderError::Kind::dimension_mismatch,
                            "dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(simd::dot(a.values, b.values) / (na * nb), -1.0, 1.0);
}

}  // namespace ctxsql
