#pragma once

#include "ctxsql/phase.hpp"
#include "ctxsql/util.hpp"

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql::eval {

enum class Outcome { pass, fail, partial_pass };

inline constexpr std::array<Outcome, 3> kAllOutcomes = {Outcome::pass, Outcome::fail, Outcome::partial_pass};

std::string_view outcome_name(Outcome outcome) noexcept;
std::optional<Outcome> parse_outcome(std::string_view text) noexcept;

struct LabelRecord {
    std::string id;  // NLQ case id
    Phase phase = Phase::schema_only;
    Outcome outcome = Outcome::fail;
    std::optional<std::string> rationale;
    std::string labeler;
    std::int64_t timestamp_ms = 0;  // 0 when the source carries none
};

/// Accepts a JSON array of records or a JSONL log (one record per line).
/// Records keep file order.
std::vector<LabelRecord> parse_labels(std::string_view text);
std::vector<LabelRecord> load_labels(const std::filesystem::path& path);

/// Later records replace earlier ones with the same (id, phase, labeler);
/// across labelers the most recently written record for (id, phase) wins.
class LabelStore {
public:
    LabelStore() = default;
    explicit LabelStore(const std::vector<LabelRecord>& records);

    void add(const LabelRecord& record);
    /// Resolved label for (id, phase), or nullptr.
    const LabelRecord* find(std::string_view id, Phase phase) const;
    std::size_t size() const noexcept { return resolved_.size(); }

private:
    std::vector<LabelRecord> resolved_;  // one per (id, phase), latest write
};

std::string label_to_json_line(const LabelRecord& record);

/// Append-only JSONL feedback log. Appends are serialized; each returns the
/// 1-based sequence number of the stored record within the log.
class FeedbackLog {
public:
    explicit FeedbackLog(std::filesystem::path path);

    std::size_t append(const LabelRecord& record);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
    std::size_t count_ = 0;
};

}  // namespace ctxsql::eval
