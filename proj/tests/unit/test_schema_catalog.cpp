#include <doctest.h>

#include "ctxsql/schema_catalog.hpp"
#include "test_support.hpp"

#include <algorithm>

using namespace ctxsql;

namespace {

const char* kTwoTables = R"js({
  "name": "excerpt",
  "tables": [
    {"name": "PRODUCT_FAMILY",
     "columns": [{"name": "FAMILY_ID", "type": "NUMBER", "nullable": false},
                 {"name": "NAME", "type": "VARCHAR2(200)"},
                 {"name": "DELETED", "type": "DATE"},
                 {"name": "PRODUCT_GROUP_ID", "type": "NUMBER"}],
     "primary_key": ["FAMILY_ID"],
     "foreign_keys": [{"column": "PRODUCT_GROUP_ID", "ref_table": "PRODUCT_GROUP", "ref_column": "PRODUCT_GROUP_ID"}]},
    {"name": "product_group",
     "columns": [{"name": "product_group_id", "type": "NUMBER", "nullable": false}],
     "primary_key": ["PRODUCT_GROUP_ID"]}
  ]
})js";

std::size_t occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("two-table excerpt loads with one foreign key edge") {
    const SchemaCatalog c = load_catalog(kTwoTables);
    CHECK(c.size() == 2);
    CHECK(c.foreign_key_count() == 1);
    REQUIRE(c.find_table("product_family") != nullptr);
    CHECK(c.find_table("Product_Group")->name == "PRODUCT_GROUP");
    CHECK(c.find_table("PRODUCT_GROUP")->columns.front().name == "PRODUCT_GROUP_ID");
    CHECK_FALSE(c.find_table("PRODUCT_FAMILY")->columns.front().nullable);
}

TEST_CASE("load errors") {
    SUBCASE("empty catalog") {
        try {
            load_catalog(R"js({"name": "x", "tables": []})js");
            FAIL("expected error");
        } catch (const SchemaError& e) {
            CHECK(e.kind() == SchemaError::Kind::empty_catalog);
            CHECK(std::string(e.what()).find("empty catalog") != std::string::npos);
        }
    }
    SUBCASE("dangling foreign key names the target") {
        try {
            load_catalog(R"js({"tables": [{"name": "A", "columns": [{"name": "B_ID", "type": "NUMBER"}],
                "foreign_keys": [{"column": "B_ID", "ref_table": "X", "ref_column": "ID"}]}]})js");
            FAIL("expected error");
        } catch (const SchemaError& e) {
            CHECK(e.kind() == SchemaError::Kind::dangling_reference);
            CHECK(std::string(e.what()).find("X") != std::string::npos);
        }
    }
    SUBCASE("duplicate table names compare case-insensitively") {
        try {
            load_catalog(R"js({"tables": [{"name": "A", "columns": [{"name": "I", "type": "N"}]},
                                        {"name": "a", "columns": [{"name": "I", "type": "N"}]}]})js");
            FAIL("expected error");
        } catch (const SchemaError& e) {
            CHECK(e.kind() == SchemaError::Kind::duplicate_name);
        }
    }
    SUBCASE("duplicate column names") {
        CHECK_THROWS_AS(load_catalog(R"js({"tables": [{"name": "A", "columns": [{"name": "I", "type": "N"},
                                                                             {"name": "i", "type": "N"}]}]})js"),
                        SchemaError);
    }
    SUBCASE("primary key column must exist") {
        CHECK_THROWS_AS(load_catalog(R"js({"tables": [{"name": "A", "columns": [{"name": "I", "type": "N"}],
                                                    "primary_key": ["J"]}]})js"),
                        SchemaError);
    }
    SUBCASE("syntax error carries line and column") {
        try {
            load_catalog("{\n  \"tables\": [\n    {\"name\": \"A\",, }\n  ]\n}");
            FAIL("expected error");
        } catch (const SchemaError& e) {
            CHECK(e.kind() == SchemaError::Kind::parse);
            CHECK(e.line() == 3);
            CHECK(e.column() > 0);
        }
    }
    SUBCASE("structural error carries a path") {
        try {
            load_catalog(R"js({"tables": [{"name": "A", "columns": [{"name": "I"}]}]})js");
            FAIL("expected error");
        } catch (const SchemaError& e) {
            CHECK(e.kind() == SchemaError::Kind::structure);
            CHECK(e.path().find("columns[0]") != std::string::npos);
        }
    }
}

TEST_CASE("narrow") {
    const SchemaCatalog c = load_catalog(kTwoTables);

    SUBCASE("keep one table drops and reports the edge") {
        const NarrowResult r = narrow(c, {"PRODUCT_FAMILY"});
        CHECK(r.catalog.size() == 1);
        CHECK(r.catalog.foreign_key_count() == 0);
        REQUIRE(r.dropped.size() == 1);
        CHECK(r.dropped[0].table == "PRODUCT_FAMILY");
        CHECK(r.dropped[0].key.ref_table == "PRODUCT_GROUP");
    }
    SUBCASE("keep all is identity") {
        const NarrowResult r = narrow(c, {"PRODUCT_GROUP", "product_family"});
        CHECK(r.catalog == c);
        CHECK(r.dropped.empty());
    }
    SUBCASE("idempotent") {
        const std::vector<std::string> keep{"PRODUCT_FAMILY"};
        const auto once = narrow(c, keep).catalog;
        CHECK(narrow(once, keep).catalog == once);
    }
    SUBCASE("unknown table throws") {
        CHECK_THROWS_AS(narrow(c, {"NOPE"}), SchemaError);
    }
}

TEST_CASE("sample catalog narrowing used by phase 3") {
    const SchemaCatalog c = load_catalog_file(testing::data_path("sample_schema.json").string());
    CHECK(c.size() == 11);
    const NarrowResult r = narrow(c, {"PRODUCT_FAMILY", "PRODUCT", "CASE_STATE", "CASE_MASTER", "CASE_PRODUCT",
                                      "CASE_EVENT", "CASE_ATTACHMENT", "CASE_ASSIGNMENT"});
    CHECK(r.catalog.size() == 8);
    std::vector<std::string> dropped;
    for (const auto& d : r.dropped) {
        dropped.push_back(d.table + "." + d.key.column);
    }
    std::sort(dropped.begin(), dropped.end());
    CHECK(dropped ==
          std::vector<std::string>{"CASE_ASSIGNMENT.USER_ID", "CASE_MASTER.COUNTRY_ID", "PRODUCT_FAMILY.PRODUCT_GROUP_ID"});
}

TEST_CASE("render is deterministic and lists every table and column once") {
    const SchemaCatalog c = load_catalog(kTwoTables);
    const std::string text = render_schema_text(c);
    CHECK(text == render_schema_text(load_catalog(kTwoTables)));
    CHECK(occurrences(text, "TABLE PRODUCT_FAMILY\n") == 1);
    CHECK(occurrences(text, "TABLE PRODUCT_GROUP\n") == 1);
    CHECK(text.find("TABLE PRODUCT_FAMILY") < text.find("TABLE PRODUCT_GROUP"));
    for (const char* column : {"  FAMILY_ID ", "  NAME ", "  DELETED "}) {
        CHECK(occurrences(text, column) == 1);
    }
    // PRODUCT_GROUP_ID is declared once in each table.
    CHECK(occurrences(text, "  PRODUCT_GROUP_ID ") == 2);
    CHECK(text.find("REFERENCES PRODUCT_GROUP(PRODUCT_GROUP_ID)") != std::string::npos);
}

TEST_CASE("source round trip") {
    const SchemaCatalog c = load_catalog_file(testing::data_path("sample_schema.json").string());
    CHECK(load_catalog(to_schema_source(c)) == c);
}
