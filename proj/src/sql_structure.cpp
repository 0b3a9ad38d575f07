#include "ctxsql/sql_structure.hpp"

#include <algorithm>
#include <array>

namespace ctxsql {

namespace {

// Pseudo-columns and datetime field names that look like bare identifiers.
constexpr std::array<std::string_view, 13> kPseudoColumns = {
    "ROWNUM", "ROWID", "SYSDATE", "SYSTIMESTAMP", "LEVEL", "USER", "NULLS",
    "YEAR",   "MONTH", "DAY",     "HOUR",         "MINUTE", "SECOND"};

bool is_pseudo_column(std::string_view name) {
    return std::find(kPseudoColumns.begin(), kPseudoColumns.end(), name) != kPseudoColumns.end();
}

bool is_join_modifier(const Token& t) {
    return t.kind == TokenKind::keyword && (t.text == "NATURAL" || t.text == "INNER" || t.text == "LEFT" ||
                                            t.text == "RIGHT" || t.text == "FULL" || t.text == "OUTER" ||
                                            t.text == "CROSS");
}

bool is_set_operator(const Token& t) {
    return t.kind == TokenKind::keyword &&
           (t.text == "UNION" || t.text == "INTERSECT" || t.text == "MINUS" || t.text == "EXCEPT");
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : t_(tokens) {}

    QueryScope statement() {
        std::size_t end = t_.size();
        while (end > 0 && t_[end - 1].is_punct(';')) {
            --end;
        }
        if (end == 0) {
            throw NotSelectError("statement contains no SQL");
        }
        for (std::size_t i = 0; i < end; ++i) {
            if (t_[i].is_punct(';')) {
                throw NotSelectError("multiple statements are not supported");
            }
        }
        if (!starts_query(0, end)) {
            throw NotSelectError("not a SELECT statement: starts with " + t_[0].text);
        }
        QueryScope root;
        root.kind = QueryScope::Kind::query;
        parse_query(0, end, root);
        return root;
    }

private:
    std::size_t match(std::size_t open, std::size_t end) const {
        int depth = 0;
        for (std::size_t i = open; i < end; ++i) {
            if (t_[i].is_punct('(')) {
                ++depth;
            } else if (t_[i].is_punct(')')) {
                if (--depth == 0) {
                    return i;
                }
            }
        }
        fail(open, "unbalanced parenthesis");
    }

    [[noreturn]] void fail(std::size_t index, const std::string& what) const {
        const Token& token = t_[std::min(index, t_.size() - 1)];
        throw SqlSyntaxError(what + " at line " + std::to_string(token.line) + ", column " +
                                 std::to_string(token.column),
                             token.offset, token.line, token.column);
    }

    bool starts_query(std::size_t b, std::size_t e) const {
        while (b < e && t_[b].is_punct('(')) {
            ++b;
        }
        return b < e && (t_[b].is_keyword("SELECT") || t_[b].is_keyword("WITH"));
    }

    // [b, e) is a full query; branches are appended to `container.children`.
    void parse_query(std::size_t b, std::size_t e, QueryScope& container) {
        if (b >= e) {
            fail(b, "empty query");
        }
        std::size_t i = b;
        if (t_[i].is_keyword("WITH")) {
            i = parse_ctes(i + 1, e, container);
        }

        std::vector<std::pair<std::size_t, std::size_t>> branches;
        std::size_t segment = i;
        int depth = 0;
        for (std::size_t k = i; k < e; ++k) {
            if (t_[k].is_punct('(')) {
                ++depth;
            } else if (t_[k].is_punct(')')) {
                --depth;
            } else if (depth == 0 && is_set_operator(t_[k])) {
                branches.emplace_back(segment, k);
                segment = k + 1;
                if (segment < e && (t_[segment].is_keyword("ALL") || t_[segment].is_keyword("DISTINCT"))) {
                    ++segment;
                }
            }
        }
        branches.emplace_back(segment, e);

        for (auto [sb, se] : branches) {
            if (sb >= se) {
                fail(sb, "empty set-operation branch");
            }
            if (t_[sb].is_punct('(')) {
                const std::size_t close = match(sb, se);
                QueryScope nested;
                nested.kind = QueryScope::Kind::query;
                parse_query(sb + 1, close, nested);
                if (close + 1 < se) {
                    trailing_clauses(close + 1, se, nested);
                }
                container.children.push_back(std::move(nested));
            } else {
                container.children.push_back(parse_select(sb, se));
            }
        }
    }

    std::size_t parse_ctes(std::size_t i, std::size_t e, QueryScope& container) {
        while (true) {
            if (i >= e || !t_[i].is_name()) {
                fail(i, "expected CTE name");
            }
            container.cte_names.push_back(t_[i].text);
            ++i;
            if (i < e && t_[i].is_punct('(')) {
                i = match(i, e) + 1;
            }
            if (i >= e || !t_[i].is_keyword("AS")) {
                fail(i, "expected AS in CTE definition");
            }
            ++i;
            if (i >= e || !t_[i].is_punct('(')) {
                fail(i, "expected ( after AS in CTE definition");
            }
            const std::size_t close = match(i, e);
            QueryScope body;
            body.kind = QueryScope::Kind::query;
            parse_query(i + 1, close, body);
            container.children.push_back(std::move(body));
            i = close + 1;
            if (i < e && t_[i].is_punct(',')) {
                ++i;
                continue;
            }
            return i;
        }
    }

    // ORDER BY / FETCH after a parenthesized branch.
    void trailing_clauses(std::size_t b, std::size_t e, QueryScope& scope) {
        if (t_[b].is_keyword("ORDER")) {
            scope.order_by = true;
        }
        scan_expression(b, e, scope, false);
    }

    struct Clause {
        std::string name;
        std::size_t begin;  // first token after the clause keyword(s)
        std::size_t end;
    };

    QueryScope parse_select(std::size_t b, std::size_t e) {
        if (!t_[b].is_keyword("SELECT")) {
            fail(b, "expected SELECT");
        }
        QueryScope scope;
        scope.kind = QueryScope::Kind::select;

        std::vector<Clause> clauses;
        clauses.push_back({"SELECT", b + 1, e});
        int depth = 0;
        for (std::size_t k = b + 1; k < e; ++k) {
            const Token& tok = t_[k];
            if (tok.is_punct('(')) {
                ++depth;
                continue;
            }
            if (tok.is_punct(')')) {
                --depth;
                continue;
            }
            if (depth != 0 || tok.kind != TokenKind::keyword) {
                continue;
            }
            std::string name;
            std::size_t width = 1;
            const bool next_is_by = k + 1 < e && t_[k + 1].is_keyword("BY");
            if (tok.text == "FROM" || tok.text == "WHERE" || tok.text == "HAVING" || tok.text == "FETCH" ||
                tok.text == "OFFSET" || tok.text == "LIMIT") {
                name = tok.text;
            } else if ((tok.text == "GROUP" || tok.text == "ORDER" || tok.text == "CONNECT") && next_is_by) {
                name = tok.text;
                width = 2;
            } else if (tok.text == "START" && k + 1 < e && t_[k + 1].is_keyword("WITH")) {
                name = "START";
                width = 2;
            } else if (tok.text == "FOR" && k + 1 < e && t_[k + 1].is_keyword("UPDATE")) {
                name = "FOR";
            } else {
                continue;
            }
            clauses.back().end = k;
            clauses.push_back({name, k + width, e});
            k += width - 1;
        }

        for (const Clause& clause : clauses) {
            if (clause.name == "SELECT") {
                std::size_t start = clause.begin;
                if (start < clause.end && (t_[start].is_keyword("DISTINCT") || t_[start].is_keyword("ALL"))) {
                    ++start;
                }
                scan_expression(start, clause.end, scope, true);
            } else if (clause.name == "FROM") {
                parse_from(clause.begin, clause.end, scope);
            } else if (clause.name == "WHERE") {
                scope.where_predicates += count_predicates(clause.begin, clause.end);
                scan_expression(clause.begin, clause.end, scope, false);
            } else if (clause.name == "GROUP") {
                scope.group_by = true;
                scan_expression(clause.begin, clause.end, scope, false);
            } else if (clause.name == "ORDER") {
                scope.order_by = true;
                scan_expression(clause.begin, clause.end, scope, false);
            } else if (clause.name == "HAVING" || clause.name == "CONNECT" || clause.name == "START") {
                scan_expression(clause.begin, clause.end, scope, false);
            }
        }
        return scope;
    }

    void parse_from(std::size_t b, std::size_t e, QueryScope& scope) {
        if (b >= e) {
            fail(b, "empty FROM clause");
        }
        std::size_t items = 0;
        std::size_t item_start = b;
        int depth = 0;
        for (std::size_t k = b; k <= e; ++k) {
            if (k < e && t_[k].is_punct('(')) {
                ++depth;
            } else if (k < e && t_[k].is_punct(')')) {
                --depth;
            } else if (k == e || (depth == 0 && t_[k].is_punct(','))) {
                parse_from_item(item_start, k, scope);
                ++items;
                item_start = k + 1;
            }
        }
        scope.implicit_joins += items - 1;
    }

    void parse_from_item(std::size_t b, std::size_t e, QueryScope& scope) {
        if (b >= e) {
            fail(b, "empty FROM item");
        }
        std::size_t i = parse_source(b, e, scope);
        while (i < e) {
            while (i < e && is_join_modifier(t_[i])) {
                ++i;
            }
            if (i < e && t_[i].is_keyword("JOIN")) {
                ++scope.explicit_joins;
                i = parse_source(i + 1, e, scope);
                continue;
            }
            if (i < e && t_[i].is_keyword("ON")) {
                std::size_t k = i + 1;
                int depth = 0;
                for (; k < e; ++k) {
                    if (t_[k].is_punct('(')) {
                        ++depth;
                    } else if (t_[k].is_punct(')')) {
                        --depth;
                    } else if (depth == 0 && (is_join_modifier(t_[k]) || t_[k].is_keyword("JOIN"))) {
                        break;
                    }
                }
                scan_expression(i + 1, k, scope, false);
                i = k;
                continue;
            }
            if (i < e && t_[i].is_keyword("USING")) {
                ++i;
                if (i < e && t_[i].is_punct('(')) {
                    i = match(i, e) + 1;
                }
                continue;
            }
            if (i < e) {
                fail(i, "unexpected token '" + t_[i].text + "' in FROM clause");
            }
        }
    }

    // Returns the index just past the source and its alias.
    std::size_t parse_source(std::size_t i, std::size_t e, QueryScope& scope) {
        if (i >= e) {
            fail(i, "expected table reference");
        }
        TableReference ref;
        ref.offset = t_[i].offset;
        if (t_[i].is_punct('(')) {
            const std::size_t close = match(i, e);
            if (starts_query(i + 1, close)) {
                QueryScope nested;
                nested.kind = QueryScope::Kind::query;
                parse_query(i + 1, close, nested);
                scope.children.push_back(std::move(nested));
                ref.derived = true;
                ref.name = "(DERIVED#" + std::to_string(++derived_count_) + ")";
            } else {
                parse_from(i + 1, close, scope);
                return close + 1;
            }
            i = close + 1;
        } else if (t_[i].is_name()) {
            ref.name = t_[i].text;
            ++i;
            while (i + 1 < e && t_[i].is_punct('.') && t_[i + 1].is_name()) {
                ref.name = t_[i + 1].text;
                i += 2;
            }
            if (i < e && t_[i].is_punct('(')) {
                // Table function such as TABLE(...).
                scan_expression(i + 1, match(i, e), scope, false);
                i = match(i, e) + 1;
                ref.derived = true;
                ref.name = "(DERIVED#" + std::to_string(++derived_count_) + ")";
            }
        } else {
            fail(i, "expected table reference, found '" + t_[i].text + "'");
        }

        if (i < e && t_[i].is_keyword("AS")) {
            ++i;
            if (i >= e || !t_[i].is_name()) {
                fail(i, "expected alias after AS");
            }
        }
        if (i < e && t_[i].is_name()) {
            ref.alias = t_[i].text;
            ++i;
        }
        scope.tables.push_back(std::move(ref));
        return i;
    }

    std::size_t count_predicates(std::size_t b, std::size_t e) const {
        std::size_t count = 0;
        std::size_t piece = b;
        int depth = 0;
        int case_depth = 0;
        bool pending_between = false;
        for (std::size_t k = b; k <= e; ++k) {
            if (k < e) {
                const Token& tok = t_[k];
                if (tok.is_punct('(')) {
                    ++depth;
                    continue;
                }
                if (tok.is_punct(')')) {
                    --depth;
                    continue;
                }
                if (depth != 0) {
                    continue;
                }
                if (tok.is_keyword("CASE")) {
                    ++case_depth;
                    continue;
                }
                if (tok.is_keyword("END") && case_depth > 0) {
                    --case_depth;
                    continue;
                }
                if (case_depth > 0) {
                    continue;
                }
                if (tok.is_keyword("BETWEEN")) {
                    pending_between = true;
                    continue;
                }
                const bool is_and = tok.is_keyword("AND");
                if (is_and && pending_between) {
                    pending_between = false;
                    continue;
                }
                if (!is_and && !tok.is_keyword("OR")) {
                    continue;
                }
            }
            count += count_piece(piece, k);
            piece = k + 1;
        }
        return count;
    }

    std::size_t count_piece(std::size_t b, std::size_t e) const {
        while (b < e && t_[b].is_keyword("NOT")) {
            ++b;
        }
        if (b >= e) {
            return 0;
        }
        if (t_[b].is_punct('(') && match(b, e) == e - 1 && !starts_query(b + 1, e - 1)) {
            return std::max<std::size_t>(1, count_predicates(b + 1, e - 1));
        }
        return 1;
    }

    void scan_expression(std::size_t b, std::size_t e, QueryScope& scope, bool select_list) {
        std::size_t i = b;
        while (i < e) {
            const Token& tok = t_[i];
            if (tok.is_punct('(')) {
                const std::size_t close = match(i, e);
                if (starts_query(i + 1, close)) {
                    QueryScope nested;
                    nested.kind = QueryScope::Kind::query;
                    parse_query(i + 1, close, nested);
                    scope.children.push_back(std::move(nested));
                } else {
                    scan_expression(i + 1, close, scope, false);
                }
                i = close + 1;
                continue;
            }
            if (tok.is_keyword("AS") && i + 1 < e && t_[i + 1].is_name()) {
                if (select_list) {
                    scope.select_aliases.push_back(t_[i + 1].text);
                }
                i += 2;
                continue;
            }
            if (!tok.is_name()) {
                ++i;
                continue;
            }

            const std::size_t chain_start = i;
            std::vector<std::string> parts{tok.text};
            bool star = false;
            ++i;
            while (i + 1 < e && t_[i].is_punct('.')) {
                if (t_[i + 1].is_name()) {
                    parts.push_back(t_[i + 1].text);
                    i += 2;
                } else if (t_[i + 1].kind == TokenKind::op && t_[i + 1].text == "*") {
                    star = true;
                    i += 2;
                    break;
                } else {
                    break;
                }
            }

            if (i < e && t_[i].is_punct('(')) {
                continue;  // function call; arguments scanned next iteration
            }
            if (!star && parts.size() == 1) {
                if (i < e && t_[i].kind == TokenKind::string) {
                    continue;  // typed literal: DATE '2020-01-01'
                }
                if (select_list && is_bare_alias(chain_start, b, i, e)) {
                    scope.select_aliases.push_back(parts[0]);
                    continue;
                }
                if (is_pseudo_column(parts[0])) {
                    continue;
                }
                scope.columns.push_back(ColumnReference{{}, parts[0], t_[chain_start].offset});
                continue;
            }
            if (star) {
                scope.columns.push_back(ColumnReference{parts.back(), "*", t_[chain_start].offset});
            } else {
                scope.columns.push_back(
                    ColumnReference{parts[parts.size() - 2], parts.back(), t_[chain_start].offset});
            }
        }
    }

    // `expr alias` in a select list: a single name directly after the end of
    // an expression and directly before a comma or the end of the list.
    bool is_bare_alias(std::size_t at, std::size_t list_begin, std::size_t after, std::size_t list_end) const {
        if (at == list_begin) {
            return false;
        }
        if (after < list_end && !t_[after].is_punct(',')) {
            return false;
        }
        const Token& prev = t_[at - 1];
        return prev.is_punct(')') || prev.is_name() || prev.kind == TokenKind::number ||
               prev.kind == TokenKind::string || prev.is_keyword("END") || prev.is_keyword("NULL");
    }

    const std::vector<Token>& t_;
    std::size_t derived_count_ = 0;
};

}  // namespace

QueryScope parse_select_statement(const std::vector<Token>& tokens) {
    if (tokens.empty()) {
        throw NotSelectError("statement contains no SQL");
    }
    return Parser(tokens).statement();
}

}  // namespace ctxsql
