#pragma once

#include "ctxsql/llm.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql {

enum class ExtractionKind { sql, refusal, unparseable };

std::string_view extraction_kind_name(ExtractionKind kind) noexcept;

struct ExtractionResult {
    ExtractionKind kind = ExtractionKind::unparseable;
    std::optional<std::string> sql_text;
    std::optional<std::string> refusal_text;

    bool operator==(const ExtractionResult&) const = default;
};

/// Case-insensitive substring patterns that mark a response as a refusal.
class RefusalPatterns {
public:
    RefusalPatterns();  // built-in defaults
    explicit RefusalPatterns(std::vector<std::string> patterns);

    /// One pattern per line; blank lines and lines starting with '#' are
    /// skipped.
    static RefusalPatterns from_text(std::string_view text);
    static RefusalPatterns from_file(const std::string& path);

    bool matches(std::string_view text) const;
    const std::vector<std::string>& patterns() const noexcept { return patterns_; }

private:
    std::vector<std::string> patterns_;  // lower-cased
};

bool detect_refusal(std::string_view text, const RefusalPatterns& patterns = RefusalPatterns{});

/// Precedence: fenced ```sql (or unlabeled) block, then refusal phrasing,
/// then the first bare SELECT/WITH statement, else unparseable.
ExtractionResult extract_sql(std::string_view response_text, const RefusalPatterns& patterns = RefusalPatterns{});
ExtractionResult extract_sql(const LlmResponse& response, const RefusalPatterns& patterns = RefusalPatterns{});

}  // namespace ctxsql
