#include "ctxsql/eval/report.hpp"

#include "ctxsql/json_io.hpp"

#include <cstdio>
#include <map>

namespace ctxsql::eval {

using nlohmann::json;

std::string format_percent(std::uint64_t count, std::uint64_t total) {
    if (total == 0) {
        return "n/a";
    }
    const std::uint64_t tenths = (2000 * count + total) / (2 * total);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

std::uint64_t OutcomeBandTable::outcome_total(Outcome o) const noexcept {
    const auto& row = cells[static_cast<std::size_t>(o)];
    return row[0] + row[1] + row[2];
}

std::uint64_t OutcomeBandTable::band_total(ComplexityBand b) const noexcept {
    const auto j = static_cast<std::size_t>(b);
    return cells[0][j] + cells[1][j] + cells[2][j];
}

std::uint64_t OutcomeBandTable::total() const noexcept {
    return outcome_total(Outcome::pass) + outcome_total(Outcome::fail) + outcome_total(Outcome::partial_pass);
}

Cells OutcomeBandTable::as_cells() const {
    Cells out;
    for (const auto& row : cells) {
        out.emplace_back(row.begin(), row.end());
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_p(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string outcome_title(Outcome o) {
    switch (o) {
        case Outcome::pass:
            return "Pass";
        case Outcome::fail:
            return "Fail";
        case Outcome::partial_pass:
            return "Partial Pass";
    }
    return "";
}

std::optional<double> generated_score(const CaseResult& c) {
    if (c.result && c.result->score) {
        return static_cast<double>(c.result->score->value);
    }
    return std::nullopt;
}

const PhaseRun* richest_run(const std::vector<PhaseRun>& runs) {
    for (Phase p : {Phase::schema_plus_context, Phase::schema_only, Phase::narrowed_schema}) {
        for (const auto& r : runs) {
            if (r.phase == p) {
                return &r;
            }
        }
    }
    return nullptr;
}

}  // namespace

OutcomeBandTable summarize(const std::vector<LabeledCase>& labeled, const std::vector<CaseBand>& bands) {
    std::map<std::string, ComplexityBand, std::less<>> by_id;
    for (const auto& b : bands) {
        by_id.emplace(b.case_id, b.band);
    }
    OutcomeBandTable t;
    for (const auto& l : labeled) {
        const auto it = by_id.find(l.case_id);
        if (it == by_id.end()) {
            throw Error("no complexity band for case " + l.case_id);
        }
        ++t.cells[static_cast<std::size_t>(l.outcome)][static_cast<std::size_t>(it->second)];
    }
    return t;
}

std::vector<CaseBand> band_cases(const Dataset& dataset, const std::vector<PhaseRun>& runs, std::string& source,
                                 std::size_t& fallbacks, BandThresholds& thresholds) {
    bool all_reference = true;
    for (const auto& c : dataset.cases()) {
        all_reference = all_reference && c.reference_sql.has_value();
    }
    const PhaseRun* run = all_reference ? nullptr : richest_run(runs);
    if (!all_reference && run == nullptr) {
        throw Error("banding needs reference SQL for every case or at least one phase run");
    }
    source = all_reference ? "reference_sql" : "generated:" + std::string(phase_short_name(run->phase));
    fallbacks = 0;

    std::vector<CaseBand> out;
    std::vector<double> scores;
    for (const auto& c : dataset.cases()) {
        std::optional<double> score;
        if (all_reference) {
            score = static_cast<double>(reference_score(c)->value);
        } else if (const CaseResult* r = run->find(c.id)) {
            score = generated_score(*r);
        }
        if (!score) {
            score = static_cast<double>(c.time_to_create);
            ++fallbacks;
        }
        out.push_back(CaseBand{c.id, *score, ComplexityBand::medium});
        scores.push_back(*score);
    }
    const Banding banding = categorize_values(scores);
    thresholds = banding.thresholds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].band = banding.bands[i];
    }
    return out;
}

EvalReport build_report(const Dataset& dataset, const std::vector<PhaseRun>& runs, const LabelStore& labels,
                        bool auto_label, const FisherOptions& fisher) {
    EvalReport report;
    report.dataset_size = dataset.size();
    report.cases = band_cases(dataset, runs, report.banding_source, report.banding_fallbacks, report.thresholds);
    std::vector<double> scores;
    for (const auto& c : report.cases) {
        scores.push_back(c.score);
    }
    report.summary = five_number_summary(scores);

    std::map<Phase, std::vector<LabeledCase>> labeled_by_phase;
    for (const auto& run : runs) {
        for (const auto& c : dataset.cases()) {
            if (run.find(c.id) == nullptr) {
                throw Error(std::string(phase_name(run.phase)) + " run has no result for case " + c.id);
            }
        }
        if (run.cases.size() != dataset.size()) {
            throw Error(std::string(phase_name(run.phase)) + " run does not match the dataset");
        }
        PhaseSection s;
        s.phase = run.phase;
        s.seed = run.seed;
        s.provider_id = run.provider_id;
        s.embedding_provider_id = run.embedding_provider_id;
        s.corpus_hash = run.corpus_hash;
        const auto labeled = apply_labels(run, labels, auto_label);
        s.table = summarize(labeled, report.cases);
        for (const auto& l : labeled) {
            s.machine_suggested += l.machine_suggested ? 1 : 0;
        }
        for (const auto& c : run.cases) {
            s.errored += c.error ? 1 : 0;
            if (const auto g = generated_score(c)) {
                s.generated_scores.push_back(*g);
            }
        }
        const auto pass = static_cast<std::size_t>(Outcome::pass);
        s.pass_excluding_high = s.table.cells[pass][0] + s.table.cells[pass][1];
        s.cases_excluding_high = s.table.band_total(ComplexityBand::low) + s.table.band_total(ComplexityBand::medium);
        s.outcome_by_band = fisher_exact_rxc(s.table.as_cells(), fisher);
        labeled_by_phase[run.phase] = labeled;
        report.phases.push_back(std::move(s));
    }

    for (std::size_t i = 0; i < report.phases.size(); ++i) {
        for (std::size_t k = i + 1; k < report.phases.size(); ++k) {
            const auto& a = report.phases[i].table;
            const auto& b = report.phases[k].table;
            const auto row = [](const OutcomeBandTable& t, Outcome o) { return t.outcome_total(o); };
            PhaseComparison cmp;
            cmp.first = report.phases[i].phase;
            cmp.second = report.phases[k].phase;
            const Cells pass_cells{{row(a, Outcome::pass), a.total() - row(a, Outcome::pass)},
                                   {row(b, Outcome::pass), b.total() - row(b, Outcome::pass)}};
            const Cells fail_cells{{row(a, Outcome::fail), a.total() - row(a, Outcome::fail)},
                                   {row(b, Outcome::fail), b.total() - row(b, Outcome::fail)}};
            const Cells full_cells{
                {row(a, Outcome::pass), row(a, Outcome::fail), row(a, Outcome::partial_pass)},
                {row(b, Outcome::pass), row(b, Outcome::fail), row(b, Outcome::partial_pass)}};
            cmp.tests.push_back(PairTest{"pass_vs_nonpass", pass_cells, fisher_exact_rxc(pass_cells, fisher)});
            cmp.tests.push_back(PairTest{"fail_vs_nonfail", fail_cells, fisher_exact_rxc(fail_cells, fisher)});
            cmp.tests.push_back(PairTest{"full_outcomes", full_cells, fisher_exact_rxc(full_cells, fisher)});
            report.comparisons.push_back(std::move(cmp));
        }
    }
    return report;
}

namespace {

std::string describe(const FisherResult& r) {
    std::string s = "p=" + fmt_p(r.p_value) + " (" + std::string(fisher_method_name(r.method));
    if (r.method == FisherMethod::monte_carlo) {
        s += ", " + std::to_string(r.tables_visited) + " draws, se=" + fmt_p(*r.std_error) +
             ", seed=" + std::to_string(*r.seed);
    } else if (r.method == FisherMethod::enumeration) {
        s += ", " + std::to_string(r.rows) + "x" + std::to_string(r.columns) + ", " +
             std::to_string(r.tables_visited) + " tables";
    }
    return s + ")";
}

std::string phase_title(Phase p) {
    return "Phase " + std::string(phase_short_name(p)).substr(5) + ": " + std::string(phase_name(p));
}

}  // namespace

std::string render_text(const EvalReport& r) {
    std::string out;
    out += "ctxsql evaluation report\n";
    out += "cases: " + std::to_string(r.dataset_size) + "\n";
    out += "banding: " + r.banding_source + ", nearest-rank p25=" + fmt_double(r.thresholds.p25) +
           " p75=" + fmt_double(r.thresholds.p75);
    if (r.banding_fallbacks > 0) {
        out += ", " + std::to_string(r.banding_fallbacks) + " case(s) scored from time_to_create only";
    }
    out += "\n";
    out += "score summary: min=" + fmt_double(r.summary.min) + " p25=" + fmt_double(r.summary.p25) +
           " median=" + fmt_double(r.summary.median) + " p75=" + fmt_double(r.summary.p75) +
           " max=" + fmt_double(r.summary.max) + "\n";

    for (const auto& s : r.phases) {
        out += "\n" + phase_title(s.phase) + "\n";
        out += "  seed=" + std::to_string(s.seed) + " provider=" + s.provider_id +
               " embedding=" + s.embedding_provider_id + "\n";
        out += "  corpus=" + s.corpus_hash + "\n";
        out += "  " + pad("Result", 14) + pad("Low", 7) + pad("Medium", 8) + pad("High", 6) + pad("Total", 7) +
               "Percent\n";
        for (Outcome o : kAllOutcomes) {
            const auto& row = s.table.cells[static_cast<std::size_t>(o)];
            out += "  " + pad(outcome_title(o), 14) + pad(std::to_string(row[0]), 7) + pad(std::to_string(row[1]), 8) +
                   pad(std::to_string(row[2]), 6) + pad(std::to_string(s.table.outcome_total(o)), 7) + "(" +
                   format_percent(s.table.outcome_total(o), s.table.total()) + ")\n";
        }
        out += "  " + pad("Total", 14) + pad(std::to_string(s.table.band_total(ComplexityBand::low)), 7) +
               pad(std::to_string(s.table.band_total(ComplexityBand::medium)), 8) +
               pad(std::to_string(s.table.band_total(ComplexityBand::high)), 6) + std::to_string(s.table.total()) +
               "\n";
        out += "  pass rate excluding high: " + std::to_string(s.pass_excluding_high) + "/" +
               std::to_string(s.cases_excluding_high) + " (" +
               format_percent(s.pass_excluding_high, s.cases_excluding_high) + ")\n";
        out += "  machine-suggested labels: " + std::to_string(s.machine_suggested) +
               ", errored cases: " + std::to_string(s.errored) + "\n";
        out += "  outcome x band exact test: " + describe(s.outcome_by_band) + "\n";
        if (!s.generated_scores.empty()) {
            const auto g = five_number_summary(s.generated_scores);
            out += "  generated SQL scores (n=" + std::to_string(s.generated_scores.size()) +
                   "): min=" + fmt_double(g.min) + " p25=" + fmt_double(g.p25) + " median=" + fmt_double(g.median) +
                   " p75=" + fmt_double(g.p75) + " max=" + fmt_double(g.max) + "\n";
        }
    }

    if (!r.comparisons.empty()) {
        out += "\nPhase comparisons\n";
        for (const auto& c : r.comparisons) {
            out += "  " + std::string(phase_short_name(c.first)) + " vs " + std::string(phase_short_name(c.second)) +
                   "\n";
            for (const auto& t : c.tests) {
                out += "    " + pad(t.construction, 16) + describe(t.result) + "\n";
            }
        }
    }
    return out;
}

std::string render_csv(const EvalReport& r) {
    std::string out = "phase,result,low,medium,high,total,percent\n";
    for (const auto& s : r.phases) {
        const std::string phase(phase_short_name(s.phase));
        for (Outcome o : kAllOutcomes) {
            const auto& row = s.table.cells[static_cast<std::size_t>(o)];
            out += phase + "," + std::string(outcome_name(o)) + "," + std::to_string(row[0]) + "," +
                   std::to_string(row[1]) + "," + std::to_string(row[2]) + "," +
                   std::to_string(s.table.outcome_total(o)) + "," +
                   format_percent(s.table.outcome_total(o), s.table.total()) + "\n";
        }
        out += phase + ",total," + std::to_string(s.table.band_total(ComplexityBand::low)) + "," +
               std::to_string(s.table.band_total(ComplexityBand::medium)) + "," +
               std::to_string(s.table.band_total(ComplexityBand::high)) + "," + std::to_string(s.table.total()) +
               ",\n";
    }
    return out;
}

std::string render_boxplot_csv(const EvalReport& r) {
    std::string out = "case_id,score,band\n";
    for (const auto& c : r.cases) {
        out += c.case_id + "," + fmt_double(c.score) + "," + std::string(band_name(c.band)) + "\n";
    }
    out += "\nstatistic,value\n";
    out += "min," + fmt_double(r.summary.min) + "\n";
    out += "p25," + fmt_double(r.summary.p25) + "\n";
    out += "median," + fmt_double(r.summary.median) + "\n";
    out += "p75," + fmt_double(r.summary.p75) + "\n";
    out += "max," + fmt_double(r.summary.max) + "\n";
    return out;
}

namespace {

json fisher_json(const FisherResult& f) {
    json j{{"p_value", f.p_value},
           {"method", fisher_method_name(f.method)},
           {"degenerate", f.degenerate},
           {"tables_visited", f.tables_visited},
           {"rows", f.rows},
           {"columns", f.columns}};
    if (f.std_error) {
        j["std_error"] = *f.std_error;
    }
    if (f.seed) {
        j["seed"] = *f.seed;
    }
    return j;
}

}  // namespace

json report_to_json(const EvalReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases) {
        cases.push_back({{"id", c.case_id}, {"score", c.score}, {"band", band_name(c.band)}});
    }
    json phases = json::array();
    for (const auto& s : r.phases) {
        json counts = json::object();
        json percents = json::object();
        for (Outcome o : kAllOutcomes) {
            const auto& row = s.table.cells[static_cast<std::size_t>(o)];
            counts[std::string(outcome_name(o))] = {{"low", row[0]}, {"medium", row[1]}, {"high", row[2]},
                                                    {"total", s.table.outcome_total(o)}};
            percents[std::string(outcome_name(o))] = format_percent(s.table.outcome_total(o), s.table.total());
        }
        json p{{"phase", phase_short_name(s.phase)},
               {"phase_name", phase_name(s.phase)},
               {"seed", s.seed},
               {"provider", s.provider_id},
               {"embedding_provider", s.embedding_provider_id},
               {"corpus_hash", s.corpus_hash},
               {"counts", counts},
               {"percentages", percents},
               {"band_totals",
                {{"low", s.table.band_total(ComplexityBand::low)},
                 {"medium", s.table.band_total(ComplexityBand::medium)},
                 {"high", s.table.band_total(ComplexityBand::high)}}},
               {"total", s.table.total()},
               {"pass_excluding_high",
                {{"pass", s.pass_excluding_high},
                 {"cases", s.cases_excluding_high},
                 {"percent", format_percent(s.pass_excluding_high, s.cases_excluding_high)}}},
               {"machine_suggested", s.machine_suggested},
               {"errored", s.errored},
               {"outcome_by_band", fisher_json(s.outcome_by_band)},
               {"generated_scores", s.generated_scores}};
        if (!s.generated_scores.empty()) {
            p["generated_summary"] = five_number_summary(s.generated_scores);
        }
        phases.push_back(std::move(p));
    }
    json comparisons = json::array();
    for (const auto& c : r.comparisons) {
        json tests = json::array();
        for (const auto& t : c.tests) {
            tests.push_back({{"construction", t.construction}, {"cells", t.cells}, {"result", fisher_json(t.result)}});
        }
        comparisons.push_back(
            {{"first", phase_short_name(c.first)}, {"second", phase_short_name(c.second)}, {"tests", tests}});
    }
    return json{{"format", "ctxsql-report/1"},
                {"dataset_size", r.dataset_size},
                {"banding",
                 {{"source", r.banding_source},
                  {"fallbacks", r.banding_fallbacks},
                  {"percentile_method", "nearest-rank"},
                  {"p25", r.thresholds.p25},
                  {"p75", r.thresholds.p75}}},
                {"boxplot", {{"summary", r.summary}, {"points", cases}}},
                {"phases", phases},
                {"comparisons", comparisons}};
}

}  // namespace ctxsql::eval
