#include "ctxsql/sql_features.hpp"

#include "ctxsql/sql_structure.hpp"

#include <set>
#include <utility>

namespace ctxsql {

namespace {

struct Tally {
    std::set<std::pair<std::string, std::string>> tables;
    std::uint32_t joins = 0;
    std::uint32_t predicates = 0;
    bool group_by = false;
    bool order_by = false;
};

void accumulate(const QueryScope& scope, Tally& tally) {
    for (const auto& ref : scope.tables) {
        tally.tables.emplace(ref.name, ref.alias);
    }
    tally.joins += static_cast<std::uint32_t>(scope.explicit_joins + scope.implicit_joins);
    tally.predicates += static_cast<std::uint32_t>(scope.where_predicates);
    tally.group_by = tally.group_by || scope.group_by;
    tally.order_by = tally.order_by || scope.order_by;
    for (const auto& child : scope.children) {
        accumulate(child, tally);
    }
}

bool is_aggregate_name(std::string_view name) {
    return name == "COUNT" || name == "SUM" || name == "AVG" || name == "MIN" || name == "MAX";
}

}  // namespace

SqlFeatures extract_features(std::string_view sql) {
    const auto tokens = tokenize_sql_code(sql);
    const QueryScope root = parse_select_statement(tokens);

    Tally tally;
    accumulate(root, tally);

    SqlFeatures features;
    features.number_of_tables = static_cast<std::uint32_t>(tally.tables.size());
    features.number_of_joins = tally.joins;
    features.number_of_where_clauses = tally.predicates;
    features.has_group_by = tally.group_by;
    features.has_order = tally.order_by;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].kind == TokenKind::identifier && is_aggregate_name(tokens[i].text) &&
            tokens[i + 1].is_punct('(')) {
            features.has_aggregation = true;
            break;
        }
    }
    return features;
}

}  // namespace ctxsql
