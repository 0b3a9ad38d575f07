#include <doctest.h>

#include "ctxsql/json_io.hpp"
#include "ctxsql/workbench.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

using namespace ctxsql;

namespace {

const Workbench& bench() {
    static const Workbench wb = Workbench::open(WorkbenchConfig::from_file(testing::data_path("workbench.json")));
    return wb;
}

const ReplayProvider& shipped_replay() {
    static const ReplayProvider r = ReplayProvider::from_file(testing::data_path("replay.json").string());
    return r;
}

QueryResult ask(const CompletionProvider& llm, Phase phase, const std::string& nlq, const std::string& id = {}) {
    const PipelineOptions options = bench().pipeline_options(fixed_clock_ms(0));
    const PipelineEnvironment env{bench().corpus(phase), bench().embedder(), llm, options};
    return answer_nlq(QueryRequest{nlq, phase, std::nullopt, id}, env);
}

std::string dump(const QueryResult& r) { return nlohmann::json(r).dump(); }

}  // namespace

TEST_CASE("valid sql over the sample catalog") {
    const ReplayProvider llm({{Phase::schema_plus_context, "pf", "How many product families are not deleted?",
                               "```sql\nSELECT COUNT(*) FROM PRODUCT_FAMILY pf WHERE pf.DELETED IS NULL\n```"}});
    const QueryResult r = ask(llm, Phase::schema_plus_context, "How many product families are not deleted?");
    CHECK(r.extraction.kind == ExtractionKind::sql);
    REQUIRE(r.validation);
    CHECK(r.validation->ok);
    REQUIRE(r.features);
    REQUIRE(r.score);
    // one table, one predicate, aggregation
    CHECK(r.score->value == 3);
    CHECK_FALSE(r.analysis_error);
    CHECK(r.run_metadata.provider_id == "replay");
    CHECK(r.run_metadata.embedding_provider_id == bench().embedder().id());
    CHECK(r.run_metadata.phase == Phase::schema_plus_context);
    CHECK(r.retrieved.size() == std::min<std::size_t>(8, bench().corpus(Phase::schema_plus_context).index.size()));
}

TEST_CASE("refusal carries no analysis fields") {
    const QueryResult r = ask(shipped_replay(), Phase::schema_only, "Count the new cases.", "q02");
    CHECK(r.extraction.kind == ExtractionKind::refusal);
    CHECK_FALSE(r.validation);
    CHECK_FALSE(r.features);
    CHECK_FALSE(r.score);
}

TEST_CASE("hallucinated table is reported") {
    const ReplayProvider llm({{Phase::schema_only, "x", "", "SELECT X FROM NO_SUCH_TABLE"}});
    const QueryResult r = ask(llm, Phase::schema_only, "anything", "x");
    REQUIRE(r.validation);
    CHECK_FALSE(r.validation->ok);
    CHECK(r.validation->unknown_tables == std::vector<std::string>{"NO_SUCH_TABLE"});
    CHECK(r.score);
}

TEST_CASE("unanalyzable sql is downgraded") {
    const ReplayProvider llm({{Phase::schema_only, "x", "", "```sql\nSELECT (A FROM T\n```"}});
    const QueryResult r = ask(llm, Phase::schema_only, "anything", "x");
    CHECK(r.extraction.kind == ExtractionKind::unparseable);
    CHECK(r.analysis_error);
    CHECK_FALSE(r.validation);
    CHECK_FALSE(r.score);
}

TEST_CASE("provider failure keeps provenance") {
    const ReplayProvider empty(std::vector<ReplayProvider::Record>{});
    try {
        ask(empty, Phase::schema_plus_context, "How many cases?", "zz");
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.cause().kind() == ProviderError::Kind::replay_miss);
        CHECK_FALSE(e.retrieved().empty());
        CHECK(e.metadata().phase == Phase::schema_plus_context);
    }
}

TEST_CASE("phase mismatch is rejected") {
    const PipelineOptions options = bench().pipeline_options(fixed_clock_ms(0));
    const PipelineEnvironment env{bench().corpus(Phase::schema_only), bench().embedder(), shipped_replay(), options};
    CHECK_THROWS_AS(answer_nlq(QueryRequest{"q", Phase::narrowed_schema, std::nullopt, "q01"}, env), Error);
}

TEST_CASE("results do not depend on call order") {
    const auto dataset = nlohmann::json::parse(read_file(testing::data_path("sample_dataset.json")));
    for (Phase phase : kAllPhases) {
        std::vector<std::string> forward;
        for (const auto& c : dataset) {
            forward.push_back(dump(ask(shipped_replay(), phase, c.at("nlq"), c.at("id"))));
        }
        std::vector<std::string> backward(dataset.size());
        for (std::size_t i = dataset.size(); i-- > 0;) {
            backward[i] = dump(ask(shipped_replay(), phase, dataset[i].at("nlq"), dataset[i].at("id")));
        }
        CHECK(forward == backward);
    }
}

TEST_CASE("retrieved chunks stay inside their phase corpus") {
    const auto dataset = nlohmann::json::parse(read_file(testing::data_path("sample_dataset.json")));
    std::set<std::string> phase2_docs;
    for (const auto& c : dataset) {
        for (const auto& ref : ask(shipped_replay(), Phase::schema_only, c.at("nlq"), c.at("id")).retrieved) {
            CHECK(ref.doc_id == "schema");
        }
        for (const auto& ref : ask(shipped_replay(), Phase::narrowed_schema, c.at("nlq"), c.at("id")).retrieved) {
            CHECK(ref.doc_id == "schema_narrowed");
        }
        for (const auto& ref : ask(shipped_replay(), Phase::schema_plus_context, c.at("nlq"), c.at("id")).retrieved) {
            CHECK((ref.doc_id == "schema" || ref.doc_id == "business_context"));
            phase2_docs.insert(ref.doc_id);
        }
    }
    CHECK(phase2_docs.count("business_context") == 1);
}

TEST_CASE("phase corpora") {
    CHECK(bench().corpus(Phase::schema_only).catalog.size() == 11);
    CHECK(bench().corpus(Phase::narrowed_schema).catalog.size() == 8);
    CHECK(bench().narrowing_drops().size() == 3);
    std::set<std::string> hashes;
    for (Phase p : kAllPhases) {
        hashes.insert(bench().corpus(p).corpus_hash);
        CHECK(bench().corpus(p).corpus_hash == corpus_hash(bench().documents(p)));
    }
    CHECK(hashes.size() == 3);
}

TEST_CASE("saved indexes reload with matching hashes") {
    const auto dir = testing::scratch_dir("pipeline_indexes");
    bench().save_indexes(dir);
    const Workbench reloaded = Workbench::open(bench().config(), dir);
    for (Phase p : kAllPhases) {
        CHECK(reloaded.corpus(p).index.chunks() == bench().corpus(p).index.chunks());
        CHECK(reloaded.corpus(p).corpus_hash == bench().corpus(p).corpus_hash);
    }
}
