#pragma once

#include "ctxsql/embedding.hpp"
#include "ctxsql/phase.hpp"
#include "ctxsql/vector_index.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctxsql {

/// The default system persona for SQL generation.
extern const std::string_view kDefaultPersona;

struct PromptBundle {
    std::string system_text;
    /// Each block is "[doc_id#seq]\n" followed by the chunk text, in
    /// retrieval-rank order.
    std::vector<std::string> context_blocks;
    std::string user_nlq;

    /// Text of the user turn: the context blocks followed by the question.
    std::string render_user_message() const;
    bool operator==(const PromptBundle&) const = default;
};

/// Pure function of its inputs. Throws if persona or nlq is empty.
PromptBundle assemble_prompt(std::string_view nlq, const std::vector<ScoredChunk>& retrieved, std::string_view persona);

struct TokenUsage {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t total_tokens = 0;
};

struct LlmResponse {
    std::string raw_text;
    std::string provider_id;
    std::chrono::milliseconds latency{0};
    std::optional<TokenUsage> token_usage;
};

struct CompletionRequest {
    PromptBundle bundle;
    Phase phase = Phase::schema_only;
    std::string nlq_id;  // may be empty for ad-hoc questions
};

/// Stateless per call: each completion is an independent single-turn
/// conversation.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    virtual std::string id() const = 0;
    /// True when responses are a pure function of the request.
    virtual bool deterministic() const = 0;
    virtual LlmResponse complete(const CompletionRequest& request) const = 0;
};

/// Recorded responses keyed by (phase, nlq_id). Read-only after load.
///
/// File format:
///   {"format": "ctxsql-replay/1",
///    "records": [{"phase": "phase2", "nlq_id": "q17", "nlq": "...", "response": "..."}]}
/// `nlq` is optional; when present, requests without an id are matched on
/// the exact question text.
class ReplayProvider final : public CompletionProvider {
public:
    struct Record {
        Phase phase;
        std::string nlq_id;
        std::string nlq;
        std::string response;
    };

    explicit ReplayProvider(std::vector<Record> records, std::string source_name = "replay");

    static ReplayProvider from_json(std::string_view text, std::string source_name = "replay");
    static ReplayProvider from_file(const std::string& path);

    std::string id() const override { return "replay"; }
    bool deterministic() const override { return true; }
    LlmResponse complete(const CompletionRequest& request) const override;

    std::size_t size() const noexcept { return by_id_.size(); }
    const std::string& source_name() const noexcept { return source_name_; }

private:
    std::map<std::pair<Phase, std::string>, std::string> by_id_;
    std::map<std::pair<Phase, std::string>, std::string> by_text_;
    std::string source_name_;
};

/// OpenAI-compatible `POST {base}/chat/completions` with a system and a user
/// message. Temperature is fixed at 0.
class RemoteChatProvider final : public CompletionProvider {
public:
    static constexpr double kTemperature = 0.0;

    explicit RemoteChatProvider(RemoteEndpoint endpoint);

    std::string id() const override { return "remote:" + endpoint_.model; }
    bool deterministic() const override { return false; }
    LlmResponse complete(const CompletionRequest& request) const override;

    const RemoteEndpoint& endpoint() const noexcept { return endpoint_; }

private:
    RemoteEndpoint endpoint_;
};

/// Single completion call; errors propagate as ProviderError.
LlmResponse complete(const CompletionRequest& request, const CompletionProvider& provider);

}  // namespace ctxsql
