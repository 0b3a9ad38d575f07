#include <doctest.h>

#include "ctxsql/sql_features.hpp"
#include "ctxsql/sql_structure.hpp"
#include "ctxsql/util.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <random>
#include <regex>

using namespace ctxsql;
using nlohmann::json;

namespace {

SqlFeatures expected_features(const json& e) {
    SqlFeatures f;
    f.number_of_tables = e.at("number_of_tables").get<std::uint32_t>();
    f.number_of_joins = e.at("number_of_joins").get<std::uint32_t>();
    f.number_of_where_clauses = e.at("number_of_where_clauses").get<std::uint32_t>();
    f.has_group_by = e.at("has_group_by").get<bool>();
    f.has_order = e.at("has_order").get<bool>();
    f.has_aggregation = e.at("has_aggregation").get<bool>();
    return f;
}

// Plain sum written out independently of complexity_score.
std::uint32_t hand_sum(const SqlFeatures& f, std::uint32_t minutes) {
    return minutes + f.number_of_tables + f.number_of_joins + f.number_of_where_clauses +
           static_cast<std::uint32_t>(f.has_group_by) + static_cast<std::uint32_t>(f.has_order) +
           static_cast<std::uint32_t>(f.has_aggregation);
}

json corpus() { return json::parse(read_file(testing::data_path("sql_corpus.json"))); }

}  // namespace

TEST_CASE("hand-counted corpus") {
    const json c = corpus();
    REQUIRE(c.size() >= 25);
    for (const auto& entry : c) {
        const std::string label = entry.at("label").get<std::string>();
        CAPTURE(label);
        const SqlFeatures want = expected_features(entry.at("expected"));
        const SqlFeatures got = extract_features(entry.at("sql").get<std::string>());
        CHECK(got.number_of_tables == want.number_of_tables);
        CHECK(got.number_of_joins == want.number_of_joins);
        CHECK(got.number_of_where_clauses == want.number_of_where_clauses);
        CHECK(got.has_group_by == want.has_group_by);
        CHECK(got.has_order == want.has_order);
        CHECK(got.has_aggregation == want.has_aggregation);
        const auto minutes = entry.at("time_to_create").get<std::uint32_t>();
        CHECK(complexity_score({got, minutes}).value == entry.at("score").get<std::uint32_t>());
        CHECK(hand_sum(want, minutes) == entry.at("score").get<std::uint32_t>());
    }
}

TEST_CASE("score examples") {
    CHECK(complexity_score({SqlFeatures{2, 1, 1, true, true, true}, 0}).value == 7);
    CHECK(complexity_score({SqlFeatures{}, 0}).value == 0);
    CHECK(complexity_score({SqlFeatures{3, 2, 2, true, true, false}, 5}).value == 14);
    static_assert(complexity_score({SqlFeatures{1, 0, 0, false, false, false}, 2}).value == 3);
}

TEST_CASE("score is monotone and linear in every operand") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::uint32_t> small(0, 20);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 500; ++trial) {
        SqlFeatures f{small(rng), small(rng), small(rng), coin(rng), coin(rng), coin(rng)};
        const std::uint32_t minutes = small(rng);
        const auto base = complexity_score({f, minutes}).value;
        CHECK(base == hand_sum(f, minutes));

        SqlFeatures g = f;
        ++g.number_of_tables;
        CHECK(complexity_score({g, minutes}).value == base + 1);
        g = f;
        ++g.number_of_joins;
        CHECK(complexity_score({g, minutes}).value == base + 1);
        g = f;
        ++g.number_of_where_clauses;
        CHECK(complexity_score({g, minutes}).value == base + 1);
        CHECK(complexity_score({f, minutes + 1}).value == base + 1);
        g = f;
        g.has_group_by = true;
        g.has_order = true;
        g.has_aggregation = true;
        CHECK(complexity_score({g, minutes}).value >= base);
    }
}

TEST_CASE("keyword case and whitespace do not change features") {
    for (const auto& entry : corpus()) {
        const std::string sql = entry.at("sql").get<std::string>();
        CAPTURE(sql);
        const SqlFeatures f = extract_features(sql);
        // Lower-case outside string literals; the corpus only uses single quotes.
        std::string lowered;
        bool in_literal = false;
        for (char ch : sql) {
            if (ch == '\'') {
                in_literal = !in_literal;
            }
            lowered.push_back(in_literal ? ch : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
        CHECK(extract_features(lowered) == f);
        // Newlines would end a line comment early, so only add them when there is none.
        const bool line_comment = sql.find("--") != std::string::npos;
        const std::string spaced = std::regex_replace(sql, std::regex(" "), line_comment ? " \t  " : " \n\t ");
        CHECK(extract_features(spaced) == f);
    }
}

TEST_CASE("keywords inside literals and comments are inert") {
    const std::vector<std::string> noise{"'JOIN B ON 1=1 WHERE X = 1 GROUP BY Z ORDER BY Y'",
                                         "'COUNT(*)'", "' AND C = 2 OR D = 3'"};
    for (const auto& entry : corpus()) {
        const std::string sql = entry.at("sql").get<std::string>();
        const SqlFeatures f = extract_features(sql);
        CAPTURE(sql);
        CHECK(extract_features(sql + " -- JOIN X WHERE A = 1 AND B = 2 GROUP BY C ORDER BY D") == f);
        CHECK(extract_features(sql + " /* SELECT COUNT(*) FROM A JOIN B ON 1 = 1 */") == f);
        // A literal as an extra select-list item.
        const auto pos = to_upper(sql).find("SELECT ");
        REQUIRE(pos != std::string::npos);
        for (const auto& literal : noise) {
            std::string wrapped = sql;
            wrapped.insert(pos + 7, literal + " AS NOISE_COL, ");
            CHECK(extract_features(wrapped) == f);
        }
    }
}

TEST_CASE("counting rules") {
    SUBCASE("BETWEEN is one predicate") {
        CHECK(extract_features("SELECT A FROM T WHERE A BETWEEN 1 AND 5 AND B = 2").number_of_where_clauses == 2);
    }
    SUBCASE("ON and HAVING predicates are not counted") {
        const auto f = extract_features(
            "SELECT A.X, COUNT(*) FROM A JOIN B ON A.ID = B.ID AND B.K = 1 GROUP BY A.X HAVING COUNT(*) > 1 AND MAX(B.K) < 5");
        CHECK(f.number_of_where_clauses == 0);
        CHECK(f.number_of_joins == 1);
    }
    SUBCASE("window ORDER BY does not count as order") {
        CHECK_FALSE(extract_features("SELECT ROW_NUMBER() OVER (ORDER BY A) FROM T").has_order);
    }
    SUBCASE("comma list of three adds two joins") {
        CHECK(extract_features("SELECT 1 FROM A, B, C").number_of_joins == 2);
    }
    SUBCASE("subquery in FROM counts once plus its inner tables") {
        const auto f = extract_features("SELECT S.N FROM (SELECT COUNT(*) N FROM A JOIN B ON A.I = B.I) S");
        CHECK(f.number_of_tables == 3);
        CHECK(f.number_of_joins == 1);
        CHECK(f.has_aggregation);
    }
    SUBCASE("NOT and parenthesized groups recurse") {
        CHECK(extract_features("SELECT 1 FROM T WHERE NOT (A = 1 OR B = 2) AND (C = 3)").number_of_where_clauses == 3);
    }
}

TEST_CASE("non-select and malformed input") {
    CHECK_THROWS_AS(extract_features("DELETE FROM T"), NotSelectError);
    CHECK_THROWS_AS(extract_features("SELECT (1 FROM T"), SqlSyntaxError);
    CHECK_THROWS_AS(extract_features("SELECT 'x FROM T"), SqlSyntaxError);
}
