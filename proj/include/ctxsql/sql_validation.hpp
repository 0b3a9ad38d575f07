#pragma once

#include "ctxsql/schema_catalog.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ctxsql {

struct UnknownColumn {
    std::string qualifier;  // alias or table name as written (upper-cased)
    std::string table;      // resolved table, empty when the qualifier itself is unresolved
    std::string column;

    bool operator==(const UnknownColumn&) const = default;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> unknown_tables;
    std::vector<UnknownColumn> unknown_columns;
    std::vector<std::string> notes;
};

/// Resolves every table reference and every qualified column against the
/// catalog. Unqualified columns are resolved when exactly one in-scope table
/// has them and noted otherwise; they never make the report fail.
/// Tokenizer and structure errors propagate.
ValidationReport validate_against_schema(std::string_view sql, const SchemaCatalog& catalog);

}  // namespace ctxsql
