#pragma once

// Scope tree for the pragmatic SELECT subset: CTEs, set operations, joins,
// subqueries in FROM/WHERE/select list, GROUP BY/HAVING/ORDER BY. It is a
// clause-level structure, not an expression AST.

#include "ctxsql/sql_tokenizer.hpp"

#include <string>
#include <vector>

namespace ctxsql {

struct TableReference {
    /// Upper-case table name (last part of a dotted name). For derived
    /// tables a synthetic "(DERIVED#n)" name.
    std::string name;
    std::string alias;
    bool derived = false;
    std::size_t offset = 0;
};

struct ColumnReference {
    std::string qualifier;  // empty when unqualified
    std::string column;     // "*" for qualifier.*
    std::size_t offset = 0;
};

struct QueryScope {
    /// `query` scopes group a statement's CTE bodies and set-operation
    /// branches; `select` scopes are single SELECT ... FROM ... blocks.
    enum class Kind { query, select };

    Kind kind = Kind::query;
    std::vector<TableReference> tables;
    std::vector<ColumnReference> columns;
    std::vector<std::string> select_aliases;
    std::vector<std::string> cte_names;
    std::size_t explicit_joins = 0;
    std::size_t implicit_joins = 0;
    std::size_t where_predicates = 0;
    bool group_by = false;
    bool order_by = false;
    std::vector<QueryScope> children;
};

class NotSelectError : public Error {
public:
    using Error::Error;
};

/// Parses one SELECT statement (optionally WITH-prefixed, optionally
/// terminated by ';') from comment-free tokens. Throws SqlSyntaxError on
/// unbalanced or malformed structure and NotSelectError for DDL/DML.
QueryScope parse_select_statement(const std::vector<Token>& tokens);

}  // namespace ctxsql
