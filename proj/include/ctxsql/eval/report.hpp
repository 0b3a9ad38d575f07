#pragma once

// Outcome x complexity-band tables, exact tests and boxplot data for a set
// of phase runs.

#include "ctxsql/banding.hpp"
#include "ctxsql/eval/fisher.hpp"
#include "ctxsql/eval/harness.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ctxsql::eval {

/// Percentage with one decimal, rounded half up: "8.3%".
std::string format_percent(std::uint64_t count, std::uint64_t total);

/// cells[outcome][band], outcomes in pass/fail/partial_pass order.
struct OutcomeBandTable {
    std::array<std::array<std::uint64_t, 3>, 3> cells{};

    std::uint64_t outcome_total(Outcome o) const noexcept;
    std::uint64_t band_total(ComplexityBand b) const noexcept;
    std::uint64_t total() const noexcept;
    Cells as_cells() const;
};

struct CaseBand {
    std::string case_id;
    double score = 0.0;
    ComplexityBand band = ComplexityBand::medium;
};

struct PhaseSection {
    Phase phase = Phase::schema_only;
    std::uint64_t seed = 0;
    std::string provider_id;
    std::string embedding_provider_id;
    std::string corpus_hash;
    OutcomeBandTable table;
    std::size_t machine_suggested = 0;
    std::size_t errored = 0;
    /// Pass count and case count over the low and medium bands.
    std::uint64_t pass_excluding_high = 0;
    std::uint64_t cases_excluding_high = 0;
    /// Outcome x band test within this phase.
    FisherResult outcome_by_band;
    /// Scores of the SQL generated in this phase.
    std::vector<double> generated_scores;
};

struct PairTest {
    std::string construction;  // pass_vs_nonpass, fail_vs_nonfail, full_outcomes
    Cells cells;
    FisherResult result;
};

struct PhaseComparison {
    Phase first = Phase::schema_only;
    Phase second = Phase::schema_plus_context;
    std::vector<PairTest> tests;
};

struct EvalReport {
    std::size_t dataset_size = 0;
    /// "reference_sql" or "generated:<phase>"
    std::string banding_source;
    /// Cases scored from time_to_create alone because no SQL was available.
    std::size_t banding_fallbacks = 0;
    BandThresholds thresholds;
    FiveNumberSummary summary;
    std::vector<CaseBand> cases;  // dataset order
    std::vector<PhaseSection> phases;
    std::vector<PhaseComparison> comparisons;
};

/// Outcome x band counts for labeled cases; every case must have a band.
OutcomeBandTable summarize(const std::vector<LabeledCase>& labeled, const std::vector<CaseBand>& bands);

/// Bands once for all phases: reference SQL scores when every case has
/// reference SQL, otherwise the generated scores of the richest phase run.
std::vector<CaseBand> band_cases(const Dataset& dataset, const std::vector<PhaseRun>& runs, std::string& source,
                                 std::size_t& fallbacks, BandThresholds& thresholds);

EvalReport build_report(const Dataset& dataset, const std::vector<PhaseRun>& runs, const LabelStore& labels,
                        bool auto_label = true, const FisherOptions& fisher = {});

std::string render_text(const EvalReport& report);
std::string render_csv(const EvalReport& report);
/// case_id,score,band rows followed by the five-number summary.
std::string render_boxplot_csv(const EvalReport& report);
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace ctxsql::eval
