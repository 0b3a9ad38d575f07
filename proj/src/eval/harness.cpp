#include "ctxsql/eval/harness.hpp"

#include "ctxsql/eval/fisher.hpp"
#include "ctxsql/json_io.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ctxsql::eval {

using nlohmann::json;

const CaseResult* PhaseRun::find(std::string_view case_id) const {
    for (const auto& c : cases) {
        if (c.case_id == case_id) {
            return &c;
        }
    }
    return nullptr;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 engine(seed);
    for (std::size_t k = n; k > 1; --k) {
        std::swap(order[k - 1], order[uniform_below(engine, k)]);
    }
    return order;
}

PhaseRun run_phase(const Dataset& dataset, Phase phase, const PipelineEnvironment& env, std::uint64_t seed,
                   std::size_t max_in_flight) {
    if (dataset.size() == 0) {
        throw Error("run_phase: dataset is empty");
    }
    if (env.corpus.phase != phase) {
        throw Error("run_phase: environment is built for " + std::string(phase_name(env.corpus.phase)));
    }
    PhaseRun run;
    run.phase = phase;
    run.seed = seed;
    run.provider_id = env.llm.id();
    run.embedding_provider_id = env.embedder.id();
    run.corpus_hash = env.corpus.corpus_hash;

    const auto& cases = dataset.cases();
    const std::vector<std::size_t> order = seeded_permutation(cases.size(), seed);
    for (std::size_t i : order) {
        run.presentation_order.push_back(cases[i].id);
    }
    run.cases.resize(cases.size());
    parallel_for(order.size(), max_in_flight, [&](std::size_t k) {
        const NlqCase& c = cases[order[k]];
        CaseResult& out = run.cases[order[k]];
        out.case_id = c.id;
        try {
            out.result = answer_nlq(QueryRequest{c.nlq, phase, c.time_to_create, c.id}, env);
        } catch (const PipelineError& e) {
            out.error = e.what();
            out.error_kind = std::string(provider_error_kind_name(e.cause().kind()));
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });
    return run;
}

json run_to_json(const PhaseRun& run) {
    json cases = json::array();
    for (const auto& c : run.cases) {
        json item{{"id", c.case_id}};
        if (c.result) {
            item["result"] = *c.result;
        }
        if (c.error) {
            item["error"] = *c.error;
        }
        if (c.error_kind) {
            item["error_kind"] = *c.error_kind;
        }
        cases.push_back(std::move(item));
    }
    return json{{"format", "ctxsql-run/1"},
                {"phase", phase_short_name(run.phase)},
                {"seed", run.seed},
                {"provider", run.provider_id},
                {"embedding_provider", run.embedding_provider_id},
                {"corpus_hash", run.corpus_hash},
                {"presentation_order", run.presentation_order},
                {"cases", std::move(cases)}};
}

PhaseRun run_from_json(const json& j) {
    if (j.value("format", std::string()) != "ctxsql-run/1") {
        throw Error("not a ctxsql-run/1 record");
    }
    PhaseRun run;
    run.phase = phase_from_json(j.at("phase"));
    run.seed = j.at("seed").get<std::uint64_t>();
    run.provider_id = j.at("provider").get<std::string>();
    run.embedding_provider_id = j.value("embedding_provider", std::string());
    run.corpus_hash = j.at("corpus_hash").get<std::string>();
    run.presentation_order = j.at("presentation_order").get<std::vector<std::string>>();
    for (const auto& item : j.at("cases")) {
        CaseResult c;
        c.case_id = item.at("id").get<std::string>();
        if (item.contains("result")) {
            c.result = item.at("result").get<QueryResult>();
        }
        if (item.contains("error")) {
            c.error = item.at("error").get<std::string>();
        }
        if (item.contains("error_kind")) {
            c.error_kind = item.at("error_kind").get<std::string>();
        }
        run.cases.push_back(std::move(c));
    }
    return run;
}

void save_run(const PhaseRun& run, const std::filesystem::path& path) {
    write_file(path, run_to_json(run).dump(2) + "\n");
}

PhaseRun load_run(const std::filesystem::path& path) {
    try {
        return run_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw Error("run file " + path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error("run file " + path.string() + ": " + e.what());
    }
}

std::string run_file_name(Phase phase) {
    return "run_" + std::string(phase_short_name(phase)) + ".json";
}

std::vector<PhaseRun> load_runs(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error("runs directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("run_") && name.ends_with(".json")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<PhaseRun> runs;
    for (const auto& f : files) {
        runs.push_back(load_run(f));
    }
    std::stable_sort(runs.begin(), runs.end(),
                     [](const PhaseRun& a, const PhaseRun& b) { return a.phase < b.phase; });
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].phase == runs[i - 1].phase) {
            throw Error("runs directory " + dir.string() + " holds two runs for " +
                        std::string(phase_name(runs[i].phase)));
        }
    }
    if (runs.empty()) {
        throw Error("no run_*.json files in " + dir.string());
    }
    return runs;
}

Outcome suggest_outcome(const CaseResult& c) {
    if (!c.result || c.result->extraction.kind != ExtractionKind::sql) {
        return Outcome::fail;
    }
    const auto& validation = c.result->validation;
    return validation && validation->ok ? Outcome::pass : Outcome::partial_pass;
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) {
        s += s.empty() ? id : ", " + id;
    }
    return s;
}

}  // namespace

MissingLabelsError::MissingLabelsError(Phase phase, std::vector<std::string> ids)
    : Error("no labels for " + std::string(phase_name(phase)) + " cases: " + join_ids(ids)), ids_(std::move(ids)) {}

std::vector<LabeledCase> apply_labels(const PhaseRun& run, const LabelStore& labels, bool auto_label) {
    std::vector<LabeledCase> out;
    std::vector<std::string> missing;
    for (const auto& c : run.cases) {
        LabeledCase l;
        l.case_id = c.case_id;
        if (const LabelRecord* human = labels.find(c.case_id, run.phase)) {
            l.outcome = human->outcome;
            l.labeler = human->labeler;
            l.rationale = human->rationale;
        } else if (auto_label) {
            l.outcome = suggest_outcome(c);
            l.machine_suggested = true;
            l.labeler = std::string(kAutoLabeler);
        } else {
            missing.push_back(c.case_id);
            continue;
        }
        out.push_back(std::move(l));
    }
    if (!missing.empty()) {
        throw MissingLabelsError(run.phase, std::move(missing));
    }
    return out;
}

}  // namespace ctxsql::eval
