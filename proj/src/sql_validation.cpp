#include "ctxsql/sql_validation.hpp"

#include "ctxsql/sql_structure.hpp"

#include <algorithm>

namespace ctxsql {

namespace {

class Validator {
public:
    explicit Validator(const SchemaCatalog& catalog) : catalog_(catalog) {}

    ValidationReport run(const QueryScope& root) {
        walk(root);
        report_.ok = report_.unknown_tables.empty() && report_.unknown_columns.empty();
        return std::move(report_);
    }

private:
    enum class Source { catalog, derived, unknown };

    struct Resolved {
        Source source;
        const TableDef* table = nullptr;
        std::string name;
    };

    void walk(const QueryScope& scope) {
        chain_.push_back(&scope);
        for (const auto& ref : scope.tables) {
            if (classify(ref).source == Source::unknown &&
                std::find(report_.unknown_tables.begin(), report_.unknown_tables.end(), ref.name) ==
                    report_.unknown_tables.end()) {
                report_.unknown_tables.push_back(ref.name);
            }
        }
        for (const auto& column : scope.columns) {
            if (column.qualifier.empty()) {
                check_unqualified(column);
            } else {
                check_qualified(column);
            }
        }
        for (const auto& child : scope.children) {
            walk(child);
        }
        chain_.pop_back();
    }

    bool is_cte(const std::string& name) const {
        return std::any_of(chain_.begin(), chain_.end(), [&](const QueryScope* s) {
            return std::find(s->cte_names.begin(), s->cte_names.end(), name) != s->cte_names.end();
        });
    }

    Resolved classify(const TableReference& ref) const {
        if (ref.derived || is_cte(ref.name)) {
            return {Source::derived, nullptr, ref.name};
        }
        if (ref.name == "DUAL") {
            return {Source::derived, nullptr, ref.name};
        }
        if (const TableDef* table = catalog_.find_table(ref.name)) {
            return {Source::catalog, table, ref.name};
        }
        return {Source::unknown, nullptr, ref.name};
    }

    // Innermost scope first; within a scope aliases win over bare names.
    const TableReference* find_qualifier(const std::string& qualifier) const {
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
            for (const auto& ref : (*it)->tables) {
                if (ref.alias == qualifier) {
                    return &ref;
                }
            }
            for (const auto& ref : (*it)->tables) {
                if (ref.alias.empty() && ref.name == qualifier) {
                    return &ref;
                }
            }
        }
        return nullptr;
    }

    void check_qualified(const ColumnReference& column) {
        const TableReference* ref = find_qualifier(column.qualifier);
        if (ref == nullptr) {
            add_unknown_column(UnknownColumn{column.qualifier, {}, column.column});
            report_.notes.push_back("qualifier " + column.qualifier + " does not name a table or alias in scope");
            return;
        }
        const Resolved resolved = classify(*ref);
        if (resolved.source != Source::catalog || column.column == "*") {
            return;
        }
        if (resolved.table->find_column(column.column) == nullptr) {
            add_unknown_column(UnknownColumn{column.qualifier, resolved.table->name, column.column});
        }
    }

    void check_unqualified(const ColumnReference& column) {
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
            const QueryScope& scope = **it;
            if (std::find(scope.select_aliases.begin(), scope.select_aliases.end(), column.column) !=
                scope.select_aliases.end()) {
                return;
            }
            std::size_t matches = 0;
            bool opaque_source = false;
            for (const auto& ref : scope.tables) {
                const Resolved resolved = classify(ref);
                if (resolved.source == Source::catalog) {
                    matches += resolved.table->find_column(column.column) != nullptr ? 1 : 0;
                } else {
                    opaque_source = true;
                }
            }
            if (matches == 1) {
                return;
            }
            if (matches > 1) {
                add_note("column " + column.column + " is ambiguous: present in " + std::to_string(matches) +
                         " tables in scope");
                return;
            }
            if (opaque_source) {
                return;
            }
            // Not found here: try the enclosing scope (correlated reference).
        }
        add_note("column " + column.column + " not found in any table in scope");
    }

    void add_unknown_column(UnknownColumn unknown) {
        if (std::find(report_.unknown_columns.begin(), report_.unknown_columns.end(), unknown) ==
            report_.unknown_columns.end()) {
            report_.unknown_columns.push_back(std::move(unknown));
        }
    }

    void add_note(std::string note) {
        if (std::find(report_.notes.begin(), report_.notes.end(), note) == report_.notes.end()) {
            report_.notes.push_back(std::move(note));
        }
    }

    const SchemaCatalog& catalog_;
    std::vector<const QueryScope*> chain_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate_against_schema(std::string_view sql, const SchemaCatalog& catalog) {
    const QueryScope root = parse_select_statement(tokenize_sql_code(sql));
    return Validator(catalog).run(root);
}

}  // namespace ctxsql
