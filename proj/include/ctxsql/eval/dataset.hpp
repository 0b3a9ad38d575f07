#pragma once

#include "ctxsql/sql_features.hpp"
#include "ctxsql/util.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql::eval {

struct NlqCase {
    std::string id;
    std::string nlq;
    std::uint32_t time_to_create = 0;  // analyst minutes
    std::optional<std::string> reference_sql;
};

/// Dataset file: a JSON array (or {"cases": [...]}) of
/// {id, nlq, time_to_create?, reference_sql?}.
class Dataset {
public:
    Dataset() = default;
    /// Throws on an empty list, an empty id or question, or a repeated id.
    explicit Dataset(std::vector<NlqCase> cases);

    static Dataset from_json(std::string_view text);
    static Dataset from_file(const std::filesystem::path& path);

    const std::vector<NlqCase>& cases() const noexcept { return cases_; }
    std::size_t size() const noexcept { return cases_.size(); }
    const NlqCase* find(std::string_view id) const;

private:
    std::vector<NlqCase> cases_;
};

/// Score of the case's reference SQL, or nullopt when none is given.
/// Throws if the reference SQL does not parse.
std::optional<ComplexityScore> reference_score(const NlqCase& c);

}  // namespace ctxsql::eval
