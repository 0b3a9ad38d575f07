#include <doctest.h>

#include "ctxsql/eval/harness.hpp"
#include "ctxsql/eval/report.hpp"
#include "ctxsql/workbench.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

using namespace ctxsql;
using namespace ctxsql::eval;

namespace {

const Workbench& bench() {
    static const Workbench wb = Workbench::open(WorkbenchConfig::from_file(testing::data_path("workbench.json")));
    return wb;
}

const ReplayProvider& replay() {
    static const ReplayProvider r = ReplayProvider::from_file(testing::data_path("replay.json").string());
    return r;
}

Dataset sample_dataset() { return Dataset::from_file(testing::data_path("sample_dataset.json")); }

std::vector<PhaseRun> run_all(const Dataset& ds, std::uint64_t seed) {
    const PipelineOptions options = bench().pipeline_options(fixed_clock_ms(0));
    std::vector<PhaseRun> runs;
    for (Phase p : kAllPhases) {
        const PipelineEnvironment env{bench().corpus(p), bench().embedder(), replay(), options};
        runs.push_back(run_phase(ds, p, env, seed));
    }
    return runs;
}

CaseResult case_with(ExtractionKind kind, bool valid) {
    CaseResult c;
    c.case_id = "c";
    QueryResult r;
    r.extraction.kind = kind;
    if (kind == ExtractionKind::sql) {
        r.extraction.sql_text = "SELECT 1 FROM T";
        r.validation = ValidationReport{valid, {}, {}, {}};
    }
    c.result = r;
    return c;
}

// Tenths of a percent, rounded half up, by plain integer arithmetic.
std::uint64_t tenths(std::uint64_t count, std::uint64_t total) { return (2000 * count + total) / (2 * total); }

}  // namespace

TEST_CASE("dataset validation") {
    CHECK(sample_dataset().size() == 12);
    CHECK(sample_dataset().find("q07") != nullptr);
    CHECK_THROWS_AS(Dataset(std::vector<NlqCase>{}), Error);
    CHECK_THROWS_AS(Dataset({NlqCase{"a", "x"}, NlqCase{"a", "y"}}), Error);
    CHECK_THROWS_AS(Dataset({NlqCase{"", "x"}}), Error);
    CHECK_THROWS_AS(Dataset({NlqCase{"a", ""}}), Error);
    const Dataset wrapped = Dataset::from_json(R"js({"cases": [{"id": "a", "nlq": "n", "time_to_create": 3}]})js");
    CHECK(wrapped.cases()[0].time_to_create == 3);
    CHECK_FALSE(reference_score(wrapped.cases()[0]));
    CHECK(reference_score(NlqCase{"a", "n", 2, "SELECT X FROM T WHERE A = 1"})->value == 4);
}

TEST_CASE("labels") {
    const LabelStore store(load_labels(testing::data_path("sample_labels.json")));
    REQUIRE(store.find("q11", Phase::schema_plus_context) != nullptr);
    CHECK(store.find("q11", Phase::schema_plus_context)->outcome == Outcome::partial_pass);
    CHECK(store.find("q11", Phase::schema_only) == nullptr);
    CHECK(store.size() == 3);

    const auto jsonl = parse_labels(
        "{\"id\": \"a\", \"phase\": \"phase1\", \"outcome\": \"pass\", \"labeler\": \"x\"}\n"
        "\n"
        "{\"id\": \"a\", \"phase\": \"phase1\", \"outcome\": \"fail\", \"labeler\": \"y\"}\n");
    REQUIRE(jsonl.size() == 2);
    CHECK(LabelStore(jsonl).find("a", Phase::schema_only)->outcome == Outcome::fail);
    CHECK_THROWS_AS(parse_labels(R"js([{"id": "a", "phase": "phase1", "outcome": "maybe", "labeler": "x"}])js"), Error);

    const LabelRecord rec{"a", Phase::narrowed_schema, Outcome::partial_pass, "why", "x", 5};
    const auto back = parse_labels(label_to_json_line(rec));
    REQUIRE(back.size() == 1);
    CHECK(back[0].phase == Phase::narrowed_schema);
    CHECK(back[0].outcome == Outcome::partial_pass);
    CHECK(back[0].rationale == "why");
    CHECK(back[0].timestamp_ms == 5);
}

TEST_CASE("feedback log appends with sequence numbers") {
    const auto dir = testing::scratch_dir("feedback_log");
    const auto path = dir / "nested" / "log.jsonl";
    {
        FeedbackLog log(path);
        CHECK(log.append({"a", Phase::schema_only, Outcome::pass, std::nullopt, "x", 1}) == 1);
        CHECK(log.append({"a", Phase::schema_only, Outcome::fail, std::nullopt, "x", 2}) == 2);
    }
    FeedbackLog reopened(path);
    CHECK(reopened.append({"b", Phase::schema_only, Outcome::pass, std::nullopt, "x", 3}) == 3);
    const LabelStore store(load_labels(path));
    CHECK(store.find("a", Phase::schema_only)->outcome == Outcome::fail);
    CHECK(store.size() == 2);
}

TEST_CASE("auto-label rules") {
    CHECK(suggest_outcome(case_with(ExtractionKind::sql, true)) == Outcome::pass);
    CHECK(suggest_outcome(case_with(ExtractionKind::sql, false)) == Outcome::partial_pass);
    CHECK(suggest_outcome(case_with(ExtractionKind::refusal, false)) == Outcome::fail);
    CHECK(suggest_outcome(case_with(ExtractionKind::unparseable, false)) == Outcome::fail);
    CaseResult errored;
    errored.case_id = "e";
    errored.error = "boom";
    CHECK(suggest_outcome(errored) == Outcome::fail);
}

TEST_CASE("apply_labels prefers human labels and reports gaps") {
    PhaseRun run;
    run.phase = Phase::schema_plus_context;
    run.cases = {case_with(ExtractionKind::sql, true), case_with(ExtractionKind::refusal, false)};
    run.cases[0].case_id = "q01";
    run.cases[1].case_id = "q11";
    const LabelStore store(load_labels(testing::data_path("sample_labels.json")));
    const auto labeled = apply_labels(run, store, true);
    REQUIRE(labeled.size() == 2);
    CHECK(labeled[1].outcome == Outcome::partial_pass);
    CHECK_FALSE(labeled[1].machine_suggested);
    CHECK(labeled[1].labeler == "expert1");

    run.cases.push_back(case_with(ExtractionKind::refusal, false));
    run.cases[2].case_id = "q99";
    const auto with_auto = apply_labels(run, store, true);
    CHECK(with_auto[2].machine_suggested);
    CHECK(with_auto[2].labeler == kAutoLabeler);
    CHECK(with_auto[2].outcome == Outcome::fail);
    try {
        apply_labels(run, store, false);
        FAIL("expected missing labels");
    } catch (const MissingLabelsError& e) {
        CHECK(e.ids() == std::vector<std::string>{"q99"});
    }
}

TEST_CASE("percent formatting") {
    CHECK(format_percent(5, 60) == "8.3%");
    CHECK(format_percent(47, 60) == "78.3%");
    CHECK(format_percent(8, 60) == "13.3%");
    CHECK(format_percent(41, 48) == "85.4%");
    CHECK(format_percent(6, 60) == "10.0%");
    CHECK(format_percent(30, 60) == "50.0%");
    CHECK(format_percent(24, 60) == "40.0%");
    CHECK(format_percent(1, 8) == "12.5%");
    CHECK(format_percent(0, 7) == "0.0%");
    CHECK(format_percent(7, 7) == "100.0%");
}

TEST_CASE("percentages of a partition sum to 100 within rounding") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint64_t a = rng() % 80, b = rng() % 80, c = 1 + rng() % 80;
        const std::uint64_t n = a + b + c;
        const std::uint64_t sum = tenths(a, n) + tenths(b, n) + tenths(c, n);
        CHECK(sum + 1 >= 1000);
        CHECK(sum <= 1001);
        // string form agrees with the integer oracle
        const std::uint64_t t = tenths(a, n);
        CHECK(format_percent(a, n) == std::to_string(t / 10) + "." + std::to_string(t % 10) + "%");
    }
}

TEST_CASE("summarize counts outcome by band") {
    std::vector<LabeledCase> labeled;
    std::vector<CaseBand> bands;
    const std::array<ComplexityBand, 3> cycle{ComplexityBand::low, ComplexityBand::medium, ComplexityBand::high};
    const std::vector<std::pair<Outcome, int>> counts{{Outcome::pass, 5}, {Outcome::fail, 47}, {Outcome::partial_pass, 8}};
    int k = 0;
    for (const auto& [outcome, n] : counts) {
        for (int i = 0; i < n; ++i, ++k) {
            const std::string id = "c" + std::to_string(k);
            labeled.push_back({id, outcome, false, "x", std::nullopt});
            bands.push_back({id, 0.0, cycle[static_cast<std::size_t>(k) % 3]});
        }
    }
    const OutcomeBandTable t = summarize(labeled, bands);
    CHECK(t.total() == 60);
    CHECK(t.outcome_total(Outcome::pass) == 5);
    CHECK(t.outcome_total(Outcome::fail) == 47);
    CHECK(t.outcome_total(Outcome::partial_pass) == 8);
    CHECK(t.band_total(ComplexityBand::low) + t.band_total(ComplexityBand::medium) +
              t.band_total(ComplexityBand::high) ==
          60);
    CHECK(format_percent(t.outcome_total(Outcome::fail), t.total()) == "78.3%");
    CHECK(t.as_cells().size() == 3);

    labeled.push_back({"orphan", Outcome::pass, false, "x", std::nullopt});
    CHECK_THROWS(summarize(labeled, bands));
}

TEST_CASE("seeded permutation") {
    const auto p = seeded_permutation(12, 7);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(12);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    CHECK(seeded_permutation(12, 7) == p);
    CHECK(seeded_permutation(12, 8) != p);
    CHECK(seeded_permutation(1, 99) == std::vector<std::size_t>{0});
}

TEST_CASE("replay runs are reproducible and order independent") {
    const Dataset ds = sample_dataset();
    const auto a = run_all(ds, 7);
    const auto b = run_all(ds, 7);
    const auto c = run_all(ds, 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(run_to_json(a[i]).dump() == run_to_json(b[i]).dump());
        CHECK(a[i].presentation_order != c[i].presentation_order);
        auto ja = run_to_json(a[i]);
        auto jc = run_to_json(c[i]);
        CHECK(ja.at("cases") == jc.at("cases"));
        REQUIRE(a[i].cases.size() == ds.size());
        for (std::size_t k = 0; k < ds.size(); ++k) {
            CHECK(a[i].cases[k].case_id == ds.cases()[k].id);
        }
    }

    const auto report = build_report(ds, a, LabelStore{});
    CHECK(render_text(report) == render_text(build_report(ds, b, LabelStore{})));
    CHECK(report.banding_source == "reference_sql");
    for (const auto& section : report.phases) {
        CHECK(section.table.total() == ds.size());
    }
    CHECK(report.comparisons.size() == 3);
}

TEST_CASE("run files round trip") {
    const Dataset ds = sample_dataset();
    const auto runs = run_all(ds, 3);
    const auto dir = testing::scratch_dir("run_files");
    for (const auto& r : runs) {
        save_run(r, dir / run_file_name(r.phase));
    }
    const auto loaded = load_runs(dir);
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        CHECK(run_to_json(loaded[i]).dump() == run_to_json(runs[i]).dump());
    }
    CHECK_THROWS(load_runs(testing::scratch_dir("run_files_empty")));
}

TEST_CASE("a dataset of one case") {
    const Dataset ds({NlqCase{"q01", "How many cases are currently closed?", 2, std::nullopt}});
    const auto runs = run_all(ds, 1);
    const auto report = build_report(ds, runs, LabelStore{});
    CHECK(report.dataset_size == 1);
    REQUIRE(report.cases.size() == 1);
    CHECK(report.cases[0].band == ComplexityBand::medium);
    CHECK(report.summary.min == report.summary.max);
    CHECK(report.banding_source.rfind("generated:", 0) == 0);
    CHECK_FALSE(render_text(report).empty());
}

TEST_CASE("report renders every construction") {
    const Dataset ds = sample_dataset();
    const auto report =
        build_report(ds, run_all(ds, 7), LabelStore(load_labels(testing::data_path("sample_labels.json"))));
    const std::string text = render_text(report);
    for (const char* needle : {"pass_vs_nonpass", "fail_vs_nonfail", "full_outcomes", "Low", "Medium", "High",
                               "Total", "Percent"}) {
        CHECK(text.find(needle) != std::string::npos);
    }
    const auto j = report_to_json(report);
    CHECK(j.at("format") == "ctxsql-report/1");
    CHECK(render_csv(report).find("phase") != std::string::npos);
    CHECK(render_boxplot_csv(report).find("q01") != std::string::npos);
}
