#pragma once

// Schema definitions used as ground truth for SQL validation and as the
// retrieval corpus for the schema-driven phases.
//
// All identifiers are normalized to upper case on load; lookups are
// case-insensitive.

#include "ctxsql/util.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql {

struct ColumnDef {
    std::string name;
    std::string type_name;
    bool nullable = true;
    std::optional<std::string> description;

    bool operator==(const ColumnDef&) const = default;
};

struct ForeignKey {
    std::string column;
    std::string ref_table;
    std::string ref_column;

    bool operator==(const ForeignKey&) const = default;
};

struct TableDef {
    std::string name;
    std::vector<ColumnDef> columns;
    std::vector<std::string> primary_key;
    std::vector<ForeignKey> foreign_keys;
    std::optional<std::string> description;

    const ColumnDef* find_column(std::string_view column) const;
    bool operator==(const TableDef&) const = default;
};

/// Immutable after construction through load_catalog / narrow.
class SchemaCatalog {
public:
    SchemaCatalog() = default;

    const std::string& name() const noexcept { return name_; }
    const std::vector<TableDef>& tables() const noexcept { return tables_; }
    std::size_t size() const noexcept { return tables_.size(); }

    const TableDef* find_table(std::string_view table) const;
    bool has_table(std::string_view table) const { return find_table(table) != nullptr; }
    std::size_t foreign_key_count() const noexcept;

    bool operator==(const SchemaCatalog&) const = default;

private:
    friend SchemaCatalog build_catalog(std::string name, std::vector<TableDef> tables);

    std::string name_;
    std::vector<TableDef> tables_;
};

/// Thrown for malformed schema sources. `line`/`column` are 1-based and
/// set only for syntax errors; `path` locates structural errors.
class SchemaError : public Error {
public:
    enum class Kind { parse, structure, empty_catalog, duplicate_name, dangling_reference, unknown_table };

    SchemaError(Kind kind, std::string message, std::size_t line = 0, std::size_t column = 0,
                std::string path = {});

    Kind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& path() const noexcept { return path_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string path_;
};

/// Validates invariants (non-empty, unique names, key columns exist,
/// foreign keys resolve) and returns the normalized catalog.
SchemaCatalog build_catalog(std::string name, std::vector<TableDef> tables);

/// Parses the JSON schema file format:
/// {"name": "...", "tables": [{"name", "description"?, "columns": [{"name",
/// "type", "nullable"?, "description"?}], "primary_key": [...],
/// "foreign_keys": [{"column", "ref_table", "ref_column"}]}]}
SchemaCatalog load_catalog(std::string_view source);
SchemaCatalog load_catalog_file(const std::string& path);

/// Inverse of load_catalog: emits a schema source that loads back to an
/// equal catalog.
std::string to_schema_source(const SchemaCatalog& catalog);

struct DroppedForeignKey {
    std::string table;
    ForeignKey key;
};

struct NarrowResult {
    SchemaCatalog catalog;
    std::vector<DroppedForeignKey> dropped;
};

/// Keeps only the listed tables. Foreign keys pointing at dropped tables are
/// removed and reported, never an error. Unknown names throw.
NarrowResult narrow(const SchemaCatalog& catalog, const std::vector<std::string>& keep);

/// Deterministic plain-text rendering: one block per table, tables ordered
/// by name, columns in declaration order, blocks separated by a blank line.
std::string render_schema_text(const SchemaCatalog& catalog);

}  // namespace ctxsql
