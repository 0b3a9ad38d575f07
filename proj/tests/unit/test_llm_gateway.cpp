#include <doctest.h>

#include "ctxsql/sql_extraction.hpp"

#include <algorithm>
#include <random>

using namespace ctxsql;

namespace {

ScoredChunk scored(const std::string& doc, std::size_t seq, const std::string& text, double sim) {
    return ScoredChunk{Chunk{doc, seq, 0, text.size(), text}, sim};
}

CompletionRequest request_for(Phase phase, const std::string& id, const std::string& nlq) {
    return CompletionRequest{assemble_prompt(nlq, {}, kDefaultPersona), phase, id};
}

}  // namespace

TEST_CASE("prompt assembly") {
    const std::string persona = "P";
    const std::vector<ScoredChunk> chunks{scored("schema", 3, "TABLE A", 0.9), scored("business_context", 0, "notes", 0.5)};
    const PromptBundle b = assemble_prompt("count new cases", chunks, persona);
    CHECK(b.system_text == "P");
    CHECK(b.user_nlq == "count new cases");
    REQUIRE(b.context_blocks.size() == 2);
    CHECK(b.context_blocks[0] == "[schema#3]\nTABLE A");
    CHECK(b.context_blocks[1] == "[business_context#0]\nnotes");
    CHECK(b == assemble_prompt("count new cases", chunks, persona));
    const std::string user = b.render_user_message();
    CHECK(user.find("[schema#3]") < user.find("[business_context#0]"));
    CHECK(user.find("count new cases") > user.find("notes"));

    const PromptBundle empty = assemble_prompt("q", {}, persona);
    CHECK(empty.context_blocks.empty());
    CHECK(empty.render_user_message().find("q") != std::string::npos);

    CHECK_THROWS_AS(assemble_prompt("", chunks, persona), Error);
    CHECK_THROWS_AS(assemble_prompt("q", chunks, ""), Error);
}

TEST_CASE("default persona is passed through byte for byte") {
    const PromptBundle b = assemble_prompt("q", {}, kDefaultPersona);
    CHECK(b.system_text == kDefaultPersona);
    CHECK(b.system_text.rfind("You are an Oracle SQL expert.", 0) == 0);
}

TEST_CASE("block order follows input order for any permutation") {
    std::vector<ScoredChunk> chunks;
    for (std::size_t i = 0; i < 6; ++i) {
        chunks.push_back(scored("d", i, "text " + std::to_string(i), 1.0 / static_cast<double>(i + 1)));
    }
    std::mt19937 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::shuffle(chunks.begin(), chunks.end(), rng);
        const auto b = assemble_prompt("q", chunks, "P");
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            CHECK(b.context_blocks[i] == "[" + chunks[i].chunk.id() + "]\n" + chunks[i].chunk.text);
        }
    }
}

TEST_CASE("extraction precedence") {
    SUBCASE("fenced sql") {
        const auto r = extract_sql("Here you go:\n```sql\nSELECT 1 FROM DUAL\n```\n");
        CHECK(r.kind == ExtractionKind::sql);
        CHECK(r.sql_text == "SELECT 1 FROM DUAL");
        CHECK_FALSE(r.refusal_text);
    }
    SUBCASE("unlabeled fence") {
        CHECK(extract_sql("```\nSELECT 1 FROM DUAL\n```").sql_text == "SELECT 1 FROM DUAL");
    }
    SUBCASE("fence wins over refusal phrasing") {
        const auto r = extract_sql(
            "I cannot create the query without additional information, but a guess:\n```sql\nSELECT X FROM T\n```");
        CHECK(r.kind == ExtractionKind::sql);
    }
    SUBCASE("refusal") {
        const auto r = extract_sql("I cannot create the query without additional information or context.");
        CHECK(r.kind == ExtractionKind::refusal);
        CHECK(r.refusal_text);
        CHECK_FALSE(r.sql_text);
    }
    SUBCASE("refusal wins over bare sql") {
        CHECK(extract_sql("I cannot generate the SQL. SELECT A FROM T").kind == ExtractionKind::refusal);
    }
    SUBCASE("bare statement ends at semicolon") {
        const auto r = extract_sql("The query is select count(*) from CASE_MASTER; it counts cases.");
        CHECK(r.kind == ExtractionKind::sql);
        CHECK(r.sql_text == "select count(*) from CASE_MASTER");
    }
    SUBCASE("bare WITH statement") {
        const auto r = extract_sql("WITH t AS (SELECT 1 X FROM DUAL) SELECT X FROM t");
        CHECK(r.kind == ExtractionKind::sql);
    }
    SUBCASE("prose is unparseable") {
        const auto r = extract_sql("Here is a poem about databases, with no query at all.");
        CHECK(r.kind == ExtractionKind::unparseable);
        CHECK_FALSE(r.sql_text);
        CHECK_FALSE(r.refusal_text);
        CHECK(extract_sql("We select the best rows with care").kind == ExtractionKind::unparseable);
    }
    SUBCASE("kind names") {
        CHECK(extraction_kind_name(ExtractionKind::sql) == "sql");
        CHECK(extraction_kind_name(ExtractionKind::refusal) == "refusal");
        CHECK(extraction_kind_name(ExtractionKind::unparseable) == "unparseable");
    }
}

TEST_CASE("refusal detection") {
    CHECK(detect_refusal("I cannot create the query without more context"));
    CHECK(detect_refusal("I CANNOT GENERATE THE SQL for that"));
    CHECK_FALSE(detect_refusal("SELECT 1 FROM DUAL"));
    CHECK_FALSE(detect_refusal(""));
    const auto custom = RefusalPatterns::from_text("# comment\n\nno idea\n");
    CHECK(custom.patterns() == std::vector<std::string>{"no idea"});
    CHECK(detect_refusal("I have No Idea.", custom));
    CHECK_FALSE(detect_refusal("I cannot create the query", custom));
}

TEST_CASE("replay provider") {
    const ReplayProvider replay = ReplayProvider::from_json(R"js({"format": "ctxsql-replay/1", "records": [
        {"phase": "phase2", "nlq_id": "q17", "nlq": "how many?", "response": "```sql\nSELECT 1 FROM DUAL\n```"},
        {"phase": "phase1", "nlq_id": "q17", "response": "I cannot create the query."}]})js");
    CHECK(replay.size() == 2);
    CHECK(replay.deterministic());

    const auto hit = complete(request_for(Phase::schema_plus_context, "q17", "anything"), replay);
    CHECK(hit.raw_text == "```sql\nSELECT 1 FROM DUAL\n```");
    CHECK(hit.provider_id == "replay");
    CHECK(complete(request_for(Phase::schema_only, "q17", "x"), replay).raw_text == "I cannot create the query.");
    // Text fallback for ad-hoc questions.
    CHECK(complete(request_for(Phase::schema_plus_context, "", "how many?"), replay).raw_text == hit.raw_text);

    try {
        complete(request_for(Phase::narrowed_schema, "q17", "x"), replay);
        FAIL("expected replay miss");
    } catch (const ProviderError& e) {
        CHECK(e.kind() == ProviderError::Kind::replay_miss);
        CHECK(std::string(e.what()).find("phase3") != std::string::npos);
        CHECK(std::string(e.what()).find("q17") != std::string::npos);
        CHECK_FALSE(e.retryable());
    }

    CHECK_THROWS_AS(ReplayProvider::from_json(R"js([{"phase": "phase9", "nlq_id": "a", "response": "x"}])js"), Error);
    CHECK_THROWS_AS(ReplayProvider::from_json(R"js([{"phase": "phase1", "nlq_id": "a", "response": "x"},
                                                  {"phase": "phase1", "nlq_id": "a", "response": "y"}])js"),
                    Error);
}

TEST_CASE("phase names") {
    for (Phase p : kAllPhases) {
        CHECK(parse_phase(phase_name(p)) == p);
        CHECK(parse_phase(phase_short_name(p)) == p);
    }
    CHECK(parse_phase("2") == Phase::schema_plus_context);
    CHECK_FALSE(parse_phase("phase4"));
}
