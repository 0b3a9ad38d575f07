#pragma once

#include "ctxsql/eval/dataset.hpp"
#include "ctxsql/eval/labels.hpp"
#include "ctxsql/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ctxsql::eval {

struct CaseResult {
    std::string case_id;
    /// Absent when the pipeline failed for this case.
    std::optional<QueryResult> result;
    std::optional<std::string> error;
    std::optional<std::string> error_kind;  // provider error kind when known
};

/// One phase over a dataset. `cases` follows dataset order regardless of
/// the presentation order used while running.
struct PhaseRun {
    Phase phase = Phase::schema_only;
    std::uint64_t seed = 0;
    std::string provider_id;
    std::string embedding_provider_id;
    std::string corpus_hash;
    std::vector<std::string> presentation_order;
    std::vector<CaseResult> cases;

    const CaseResult* find(std::string_view case_id) const;
};

/// Fisher-Yates permutation of 0..n-1 driven by mt19937_64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Presents cases in a seeded random order, each as an independent
/// single-turn request. Provider failures are recorded per case.
PhaseRun run_phase(const Dataset& dataset, Phase phase, const PipelineEnvironment& env, std::uint64_t seed,
                   std::size_t max_in_flight = 4);

nlohmann::json run_to_json(const PhaseRun& run);
PhaseRun run_from_json(const nlohmann::json& j);
void save_run(const PhaseRun& run, const std::filesystem::path& path);
PhaseRun load_run(const std::filesystem::path& path);

/// Runs found in `dir` (files named run_*.json), sorted by phase.
std::vector<PhaseRun> load_runs(const std::filesystem::path& dir);
std::string run_file_name(Phase phase);

struct LabeledCase {
    std::string case_id;
    Outcome outcome = Outcome::fail;
    bool machine_suggested = false;
    std::string labeler;
    std::optional<std::string> rationale;
};

/// Machine-suggested outcome: refusal, unparseable or errored -> fail;
/// SQL that validates -> pass; SQL that does not -> partial_pass.
Outcome suggest_outcome(const CaseResult& c);

inline constexpr std::string_view kAutoLabeler = "auto";

class MissingLabelsError : public Error {
public:
    MissingLabelsError(Phase phase, std::vector<std::string> ids);
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

/// Human labels win; uncovered cases are auto-labeled when `auto_label` is
/// set and reported as MissingLabelsError otherwise.
std::vector<LabeledCase> apply_labels(const PhaseRun& run, const LabelStore& labels, bool auto_label);

}  // namespace ctxsql::eval
