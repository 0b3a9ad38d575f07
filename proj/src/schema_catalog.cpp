#include "ctxsql/schema_catalog.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace ctxsql {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column_at(std::string_view source, std::size_t byte_offset) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min(byte_offset, source.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (source[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

[[noreturn]] void structure_error(const std::string& path, const std::string& what) {
    throw SchemaError(SchemaError::Kind::structure, path + ": " + what, 0, 0, path);
}

const json& require(const json& object, const char* key, const std::string& path) {
    if (!object.is_object()) {
        structure_error(path, "expected an object");
    }
    auto it = object.find(key);
    if (it == object.end()) {
        structure_error(path, std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string require_string(const json& object, const char* key, const std::string& path) {
    const json& value = require(object, key, path);
    if (!value.is_string() || value.get_ref<const std::string&>().empty()) {
        structure_error(path + "." + key, "expected a non-empty string");
    }
    return value.get<std::string>();
}

std::optional<std::string> optional_string(const json& object, const char* key, const std::string& path) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        structure_error(path + "." + key, "expected a string");
    }
    return it->get<std::string>();
}

const json& optional_array(const json& object, const char* key, const std::string& path) {
    static const json empty = json::array();
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return empty;
    }
    if (!it->is_array()) {
        structure_error(path + "." + key, "expected a list");
    }
    return *it;
}

TableDef parse_table(const json& node, const std::string& path) {
    TableDef table;
    table.name = require_string(node, "name", path);
    table.description = optional_string(node, "description", path);

    const json& columns = require(node, "columns", path);
    if (!columns.is_array()) {
        structure_error(path + ".columns", "expected a list");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const std::string column_path = path + ".columns[" + std::to_string(i) + "]";
        ColumnDef column;
        column.name = require_string(columns[i], "name", column_path);
        column.type_name = require_string(columns[i], "type", column_path);
        if (auto it = columns[i].find("nullable"); it != columns[i].end()) {
            if (!it->is_boolean()) {
                structure_error(column_path + ".nullable", "expected a boolean");
            }
            column.nullable = it->get<bool>();
        }
        column.description = optional_string(columns[i], "description", column_path);
        table.columns.push_back(std::move(column));
    }

    const json& pk = optional_array(node, "primary_key", path);
    for (std::size_t i = 0; i < pk.size(); ++i) {
        if (!pk[i].is_string()) {
            structure_error(path + ".primary_key[" + std::to_string(i) + "]", "expected a column name");
        }
        table.primary_key.push_back(pk[i].get<std::string>());
    }

    const json& fks = optional_array(node, "foreign_keys", path);
    for (std::size_t i = 0; i < fks.size(); ++i) {
        const std::string fk_path = path + ".foreign_keys[" + std::to_string(i) + "]";
        table.foreign_keys.push_back(ForeignKey{require_string(fks[i], "column", fk_path),
                                                require_string(fks[i], "ref_table", fk_path),
                                                require_string(fks[i], "ref_column", fk_path)});
    }
    return table;
}

void normalize(TableDef& table) {
    table.name = to_upper(table.name);
    for (auto& column : table.columns) {
        column.name = to_upper(column.name);
    }
    for (auto& key : table.primary_key) {
        key = to_upper(key);
    }
    for (auto& fk : table.foreign_keys) {
        fk.column = to_upper(fk.column);
        fk.ref_table = to_upper(fk.ref_table);
        fk.ref_column = to_upper(fk.ref_column);
    }
}

}  // namespace

SchemaError::SchemaError(Kind kind, std::string message, std::size_t line, std::size_t column,
                         std::string path)
    : Error(std::move(message)), kind_(kind), line_(line), column_(column), path_(std::move(path)) {}

const ColumnDef* TableDef::find_column(std::string_view column) const {
    for (const auto& c : columns) {
        if (iequals(c.name, column)) {
            return &c;
        }
    }
    return nullptr;
}

const TableDef* SchemaCatalog::find_table(std::string_view table) const {
    for (const auto& t : tables_) {
        if (iequals(t.name, table)) {
            return &t;
        }
    }
    return nullptr;
}

std::size_t SchemaCatalog::foreign_key_count() const noexcept {
    std::size_t count = 0;
    for (const auto& t : tables_) {
        count += t.foreign_keys.size();
    }
    return count;
}

SchemaCatalog build_catalog(std::string name, std::vector<TableDef> tables) {
    if (tables.empty()) {
        throw SchemaError(SchemaError::Kind::empty_catalog, "empty catalog: no tables defined");
    }

    std::set<std::string> table_names;
    for (auto& table : tables) {
        normalize(table);
        if (!table_names.insert(table.name).second) {
            throw SchemaError(SchemaError::Kind::duplicate_name, "duplicate table name: " + table.name);
        }
        if (table.columns.empty()) {
            throw SchemaError(SchemaError::Kind::structure, "table " + table.name + " has no columns");
        }
        std::set<std::string> column_names;
        for (const auto& column : table.columns) {
            if (column.name.empty()) {
                throw SchemaError(SchemaError::Kind::structure, "table " + table.name + " has an unnamed column");
            }
            if (!column_names.insert(column.name).second) {
                throw SchemaError(SchemaError::Kind::duplicate_name,
                                  "duplicate column name: " + table.name + "." + column.name);
            }
        }
        for (const auto& key : table.primary_key) {
            if (!column_names.contains(key)) {
                throw SchemaError(SchemaError::Kind::structure,
                                  "primary key column " + table.name + "." + key + " is not defined");
            }
        }
        for (const auto& fk : table.foreign_keys) {
            if (!column_names.contains(fk.column)) {
                throw SchemaError(SchemaError::Kind::structure,
                                  "foreign key column " + table.name + "." + fk.column + " is not defined");
            }
        }
    }

    SchemaCatalog catalog;
    catalog.name_ = std::move(name);
    catalog.tables_ = std::move(tables);

    for (const auto& table : catalog.tables_) {
        for (const auto& fk : table.foreign_keys) {
            const TableDef* target = catalog.find_table(fk.ref_table);
            if (target == nullptr) {
                throw SchemaError(SchemaError::Kind::dangling_reference,
                                  "dangling foreign key " + table.name + "." + fk.column +
                                      " references unknown table " + fk.ref_table);
            }
            if (target->find_column(fk.ref_column) == nullptr) {
                throw SchemaError(SchemaError::Kind::dangling_reference,
                                  "dangling foreign key " + table.name + "." + fk.column +
                                      " references unknown column " + fk.ref_table + "." + fk.ref_column);
            }
        }
    }
    return catalog;
}

SchemaCatalog load_catalog(std::string_view source) {
    json document;
    try {
        document = json::parse(source);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column_at(source, e.byte == 0 ? 0 : e.byte - 1);
        throw SchemaError(SchemaError::Kind::parse,
                          "schema parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what(),
                          line, column);
    }

    if (!document.is_object()) {
        structure_error("$", "expected a top-level object");
    }
    std::string name = "schema";
    if (auto n = optional_string(document, "name", "$")) {
        name = *n;
    }
    const json& tables_node = require(document, "tables", "$");
    if (!tables_node.is_array()) {
        structure_error("$.tables", "expected a list");
    }

    std::vector<TableDef> tables;
    tables.reserve(tables_node.size());
    for (std::size_t i = 0; i < tables_node.size(); ++i) {
        tables.push_back(parse_table(tables_node[i], "$.tables[" + std::to_string(i) + "]"));
    }
    return build_catalog(std::move(name), std::move(tables));
}

SchemaCatalog load_catalog_file(const std::string& path) {
    return load_catalog(read_file(path));
}

std::string to_schema_source(const SchemaCatalog& catalog) {
    json tables = json::array();
    for (const auto& table : catalog.tables()) {
        json node;
        node["name"] = table.name;
        if (table.description) {
            node["description"] = *table.description;
        }
        json columns = json::array();
        for (const auto& column : table.columns) {
            json c{{"name", column.name}, {"type", column.type_name}, {"nullable", column.nullable}};
            if (column.description) {
                c["description"] = *column.description;
            }
            columns.push_back(std::move(c));
        }
        node["columns"] = std::move(columns);
        node["primary_key"] = table.primary_key;
        json fks = json::array();
        for (const auto& fk : table.foreign_keys) {
            fks.push_back({{"column", fk.column}, {"ref_table", fk.ref_table}, {"ref_column", fk.ref_column}});
        }
        node["foreign_keys"] = std::move(fks);
        tables.push_back(std::move(node));
    }
    json document{{"name", catalog.name()}, {"tables", std::move(tables)}};
    return document.dump(2) + "\n";
}

NarrowResult narrow(const SchemaCatalog& catalog, const std::vector<std::string>& keep) {
    std::set<std::string> wanted;
    for (const auto& name : keep) {
        const std::string upper = to_upper(name);
        if (!catalog.has_table(upper)) {
            throw SchemaError(SchemaError::Kind::unknown_table, "cannot narrow to unknown table " + upper);
        }
        wanted.insert(upper);
    }

    NarrowResult result;
    std::vector<TableDef> kept;
    for (const auto& table : catalog.tables()) {
        if (!wanted.contains(table.name)) {
            continue;
        }
        TableDef copy = table;
        std::erase_if(copy.foreign_keys, [&](const ForeignKey& fk) {
            if (wanted.contains(fk.ref_table)) {
                return false;
            }
            result.dropped.push_back(DroppedForeignKey{table.name, fk});
            return true;
        });
        kept.push_back(std::move(copy));
    }
    result.catalog = build_catalog(catalog.name(), std::move(kept));
    return result;
}

std::string render_schema_text(const SchemaCatalog& catalog) {
    std::vector<const TableDef*> ordered;
    ordered.reserve(catalog.size());
    for (const auto& table : catalog.tables()) {
        ordered.push_back(&table);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const TableDef* a, const TableDef* b) { return a->name < b->name; });

    std::ostringstream out;
    bool first = true;
    for (const TableDef* table : ordered) {
        if (!first) {
            out << '\n';
        }
        first = false;
        out << "TABLE " << table->name << '\n';
        if (table->description) {
            out << "  " << *table->description << '\n';
        }
        for (const auto& column : table->columns) {
            out << "  " << column.name << ' ' << column.type_name << (column.nullable ? " NULL" : " NOT NULL");
            if (std::find(table->primary_key.begin(), table->primary_key.end(), column.name) !=
                table->primary_key.end()) {
                out << (table->primary_key.size() == 1 ? " PRIMARY KEY" : " PART OF PRIMARY KEY");
            }
            for (const auto& fk : table->foreign_keys) {
                if (fk.column == column.name) {
                    out << " REFERENCES " << fk.ref_table << '(' << fk.ref_column << ')';
                }
            }
            if (column.description) {
                out << " -- " << *column.description;
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace ctxsql
