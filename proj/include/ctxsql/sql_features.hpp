#pragma once

#include <cstdint>
#include <string_view>

namespace ctxsql {

/// Operands of the complexity score, counted over the whole statement
/// including subqueries and CTE bodies.
struct SqlFeatures {
    /// Distinct (name, alias) references in FROM/JOIN at every depth; a
    /// derived table counts once.
    std::uint32_t number_of_tables = 0;
    /// Explicit JOIN keywords plus (n - 1) per comma-separated FROM list.
    std::uint32_t number_of_joins = 0;
    /// Atomic WHERE predicates split on top-level AND/OR. ON and HAVING
    /// predicates are not counted.
    std::uint32_t number_of_where_clauses = 0;
    bool has_group_by = false;
    bool has_order = false;
    /// COUNT/SUM/AVG/MIN/MAX called anywhere.
    bool has_aggregation = false;

    bool operator==(const SqlFeatures&) const = default;
};

struct ComplexityInput {
    SqlFeatures features;
    std::uint32_t time_to_create = 0;  // analyst minutes
};

struct ComplexityScore {
    std::uint32_t value = 0;

    auto operator<=>(const ComplexityScore&) const = default;
};

/// Throws SqlSyntaxError (tokenizer/structure) or NotSelectError.
SqlFeatures extract_features(std::string_view sql);

/// time_to_create + tables + joins + where predicates + one point for each
/// of GROUP BY, ORDER BY and aggregation.
constexpr ComplexityScore complexity_score(const ComplexityInput& input) noexcept {
    std::uint32_t score = 0;
    score = input.time_to_create;
    score += input.features.number_of_tables;
    score += input.features.number_of_joins;
    score += input.features.number_of_where_clauses;
    if (input.features.has_group_by) {
        score += 1;
    }
    if (input.features.has_order) {
        score += 1;
    }
    if (input.features.has_aggregation) {
        score += 1;
    }
    return ComplexityScore{score};
}

}  // namespace ctxsql
