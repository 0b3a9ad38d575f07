#include "ctxsql/banding.hpp"
#include "ctxsql/eval/fisher.hpp"
#include "ctxsql/eval/harness.hpp"
#include "ctxsql/eval/report.hpp"
#include "ctxsql/json_io.hpp"
#include "ctxsql/service.hpp"
#include "ctxsql/sql_tokenizer.hpp"
#include "ctxsql/sql_structure.hpp"
#include "ctxsql/workbench.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace ctxsql;
using nlohmann::json;

namespace {

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    }
    return read_file(path);
}

std::vector<Phase> phases_from(const std::string& text) {
    if (text == "all") {
        return {kAllPhases.begin(), kAllPhases.end()};
    }
    std::vector<Phase> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto p = parse_phase(trim(item));
        if (!p) {
            throw Error("unknown phase '" + item + "' (expected phase1, phase2, phase3 or all)");
        }
        out.push_back(*p);
    }
    return out;
}

std::unique_ptr<CompletionProvider> completion_provider(const std::string& replay) {
    if (!replay.empty()) {
        return std::make_unique<ReplayProvider>(ReplayProvider::from_file(replay));
    }
    return std::make_unique<RemoteChatProvider>(RemoteEndpoint::from_environment("CTXSQL_MODEL", "gpt-4"));
}

Workbench open_workbench(const std::string& config, const std::string& index_dir) {
    const auto wb = WorkbenchConfig::from_file(config);
    return Workbench::open(wb, index_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(index_dir));
}

int cmd_score(const std::string& file, std::uint32_t time_to_create, const std::string& schema) {
    const std::string sql = read_input(file);
    const SqlFeatures features = extract_features(sql);
    json out{{"features", features},
             {"time_to_create", time_to_create},
             {"score", complexity_score(ComplexityInput{features, time_to_create}).value}};
    if (!schema.empty()) {
        out["validation"] = validate_against_schema(sql, load_catalog_file(schema));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_band(const std::string& file) {
    std::stringstream in(read_input(file));
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        for (char& ch : token) {
            ch = ch == ',' ? ' ' : ch;
        }
        std::stringstream parts(token);
        double v = 0;
        while (parts >> v) {
            values.push_back(v);
        }
        if (!parts.eof()) {
            throw Error("not a number: '" + token + "'");
        }
    }
    const Banding banding = categorize_values(values);
    json bands = json::array();
    for (auto b : banding.bands) {
        bands.push_back(band_name(b));
    }
    json out{{"percentile_method", banding.percentile_method},
             {"thresholds", {{"p25", banding.thresholds.p25}, {"p75", banding.thresholds.p75}}},
             {"counts",
              {{"low", banding.count(ComplexityBand::low)},
               {"medium", banding.count(ComplexityBand::medium)},
               {"high", banding.count(ComplexityBand::high)}}},
             {"bands", bands},
             {"summary", five_number_summary(values)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_ingest(const std::string& config, const std::string& out_dir) {
    const Workbench wb = open_workbench(config, "");
    wb.save_indexes(out_dir);
    for (Phase p : kAllPhases) {
        const auto& c = wb.corpus(p);
        std::cout << phase_short_name(p) << " " << c.index.size() << " chunks " << c.corpus_hash << "\n";
    }
    for (const auto& d : wb.narrowing_drops()) {
        std::cout << "narrowing dropped " << d.table << "." << d.key.column << " -> " << d.key.ref_table << "\n";
    }
    return 0;
}

int cmd_query(const std::string& config, const std::string& index_dir, const std::string& phase_text,
              const std::string& nlq, const std::string& nlq_id, const std::string& replay) {
    const auto phase = parse_phase(phase_text);
    if (!phase) {
        throw Error("unknown phase '" + phase_text + "'");
    }
    const Workbench wb = open_workbench(config, index_dir);
    const auto llm = completion_provider(replay);
    const PipelineOptions options = wb.pipeline_options(replay.empty() ? system_clock_ms() : fixed_clock_ms());
    const PipelineEnvironment env{wb.corpus(*phase), wb.embedder(), *llm, options};
    try {
        const json out = answer_nlq(QueryRequest{nlq, *phase, std::nullopt, nlq_id}, env);
        std::cout << out.dump(2) << "\n";
    } catch (const PipelineError& e) {
        json err{{"error", {{"kind", provider_error_kind_name(e.cause().kind())}, {"message", e.what()}}},
                 {"retrieved", e.retrieved()},
                 {"run_metadata", e.metadata()}};
        std::cout << err.dump(2) << "\n";
        return 3;
    }
    return 0;
}

void write_reports(const eval::EvalReport& report, const std::filesystem::path& dir) {
    write_file(dir / "report.txt", eval::render_text(report));
    write_file(dir / "report.csv", eval::render_csv(report));
    write_file(dir / "boxplot.csv", eval::render_boxplot_csv(report));
    write_file(dir / "report.json", eval::report_to_json(report).dump(2) + "\n");
}

eval::LabelStore labels_from(const std::string& path) {
    return path.empty() ? eval::LabelStore{} : eval::LabelStore(eval::load_labels(path));
}

int cmd_evaluate(const std::string& config, const std::string& index_dir, const std::string& dataset_path,
                 const std::string& phase_text, std::uint64_t seed, const std::string& replay,
                 const std::string& out_dir, const std::string& labels_path, bool auto_label) {
    const eval::Dataset dataset = eval::Dataset::from_file(dataset_path);
    const Workbench wb = open_workbench(config, index_dir);
    const auto llm = completion_provider(replay);
    const PipelineOptions options = wb.pipeline_options(replay.empty() ? system_clock_ms() : fixed_clock_ms());
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    write_file(out / "dataset.json", read_file(dataset_path));

    std::vector<eval::PhaseRun> runs;
    for (Phase phase : phases_from(phase_text)) {
        const PipelineEnvironment env{wb.corpus(phase), wb.embedder(), *llm, options};
        runs.push_back(eval::run_phase(dataset, phase, env, seed, wb.config().max_in_flight));
        eval::save_run(runs.back(), out / eval::run_file_name(phase));
        std::size_t errored = 0;
        for (const auto& c : runs.back().cases) {
            errored += c.error ? 1 : 0;
        }
        std::cerr << phase_short_name(phase) << ": " << runs.back().cases.size() << " cases, " << errored
                  << " errored\n";
    }
    const auto report = eval::build_report(dataset, runs, labels_from(labels_path), auto_label);
    write_reports(report, out);
    std::cout << eval::render_text(report);
    return 0;
}

int cmd_report(const std::string& runs_dir, const std::string& dataset_path, const std::string& labels_path,
               const std::string& format, bool auto_label) {
    const std::filesystem::path dir(runs_dir);
    const eval::Dataset dataset =
        eval::Dataset::from_file(dataset_path.empty() ? dir / "dataset.json" : std::filesystem::path(dataset_path));
    const auto report = eval::build_report(dataset, eval::load_runs(dir), labels_from(labels_path), auto_label);
    if (format == "text") {
        std::cout << eval::render_text(report);
    } else if (format == "csv") {
        std::cout << eval::render_csv(report);
    } else if (format == "boxplot") {
        std::cout << eval::render_boxplot_csv(report);
    } else {
        std::cout << eval::report_to_json(report).dump(2) << "\n";
    }
    return 0;
}

int cmd_stats(const std::string& table, std::uint64_t seed, std::uint64_t draws) {
    const eval::Cells cells = eval::parse_cells(table);
    eval::FisherOptions options;
    options.seed = seed;
    options.monte_carlo_draws = draws;
    const auto print = [](const char* label, const eval::FisherResult& r) {
        std::printf("%-22s p=%.10g method=%s", label, r.p_value, std::string(eval::fisher_method_name(r.method)).c_str());
        if (r.std_error) {
            std::printf(" se=%.3g draws=%llu seed=%llu", *r.std_error, static_cast<unsigned long long>(r.tables_visited),
                        static_cast<unsigned long long>(*r.seed));
        } else if (r.method == eval::FisherMethod::enumeration) {
            std::printf(" tables=%llu", static_cast<unsigned long long>(r.tables_visited));
        }
        if (r.degenerate) {
            std::printf(" degenerate");
        }
        std::printf("\n");
    };
    std::printf("table %zux%zu, same-margin bound %.6g\n", cells.size(), cells.front().size(),
                eval::same_margin_table_bound(cells));
    if (cells.size() == 2 && cells.front().size() == 2) {
        print("fisher_exact_2x2", eval::fisher_exact_2x2(cells));
    }
    print("freeman_halton_rxc", eval::fisher_exact_rxc(cells, options));
    return 0;
}

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service != nullptr) {
        g_service->stop();
    }
}

int cmd_serve(const std::string& config_path) {
    const ServiceConfig config = ServiceConfig::from_file(config_path);
    Service service(config);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << config.host << ":" << config.port << " (" << config.provider << ")\n";
    if (!service.listen(config.host, config.port)) {
        std::cerr << "cannot listen on " << config.host << ":" << config.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctxsql: text-to-SQL workbench"};
    app.require_subcommand(1);

    std::string file;
    std::uint32_t time_to_create = 0;
    std::string schema;
    auto* score = app.add_subcommand("score", "Complexity features and score of one SQL statement");
    score->add_option("file", file, "SQL file (stdin when omitted)");
    score->add_option("--time-to-create", time_to_create, "Analyst minutes");
    score->add_option("--schema", schema, "Also validate against this schema file");

    auto* band = app.add_subcommand("band", "Percentile bands for a list of scores");
    band->add_option("file", file, "Whitespace- or comma-separated scores (stdin when omitted)");

    std::string config = "data/workbench.json";
    std::string index_dir;
    std::string out_dir;
    auto* ingest = app.add_subcommand("ingest", "Build and save the three phase indexes");
    ingest->add_option("--config", config, "Workbench config")->capture_default_str();
    ingest->add_option("--out", out_dir, "Index directory")->required();

    std::string phase;
    std::string nlq;
    std::string nlq_id;
    std::string replay;
    auto* query = app.add_subcommand("query", "Answer one question");
    query->add_option("--config", config, "Workbench config")->capture_default_str();
    query->add_option("--index", index_dir, "Saved index directory");
    query->add_option("--phase", phase, "phase1, phase2 or phase3")->required();
    query->add_option("--nlq", nlq, "Question")->required();
    query->add_option("--nlq-id", nlq_id, "Question id (replay key)");
    query->add_option("--replay", replay, "Replay file (remote provider when omitted)");

    std::string dataset;
    std::uint64_t seed = 1;
    std::string labels;
    bool no_auto = false;
    auto* evaluate = app.add_subcommand("evaluate", "Run phases over a dataset and write runs and reports");
    evaluate->add_option("--config", config, "Workbench config")->capture_default_str();
    evaluate->add_option("--index", index_dir, "Saved index directory");
    evaluate->add_option("--dataset", dataset, "Dataset file")->required();
    evaluate->add_option("--phase", phase, "phase1..3, comma list or all")->required();
    evaluate->add_option("--seed", seed, "Presentation-order seed")->required();
    evaluate->add_option("--replay", replay, "Replay file (remote provider when omitted)");
    evaluate->add_option("--out", out_dir, "Output directory")->required();
    evaluate->add_option("--labels", labels, "Labels file or feedback log");
    evaluate->add_flag("--no-auto-label", no_auto, "Fail on unlabeled cases instead of suggesting labels");

    std::string runs_dir;
    std::string format = "text";
    auto* report = app.add_subcommand("report", "Tables and exact tests from saved runs");
    report->add_option("--runs", runs_dir, "Directory written by evaluate")->required();
    report->add_option("--dataset", dataset, "Dataset file (default: DIR/dataset.json)");
    report->add_option("--labels", labels, "Labels file or feedback log");
    report->add_option("--format", format, "text, csv, json or boxplot")
        ->check(CLI::IsMember({"text", "csv", "json", "boxplot"}))
        ->capture_default_str();
    report->add_flag("--no-auto-label", no_auto, "Fail on unlabeled cases instead of suggesting labels");

    std::string table;
    std::uint64_t draws = 100000;
    std::uint64_t stats_seed = eval::FisherOptions{}.seed;
    auto* stats = app.add_subcommand("stats", "Fisher / Freeman-Halton exact test on a table");
    stats->add_option("--table", table, "Rows separated by ';', cells by ','")->required();
    stats->add_option("--seed", stats_seed, "Monte Carlo seed")->capture_default_str();
    stats->add_option("--draws", draws, "Monte Carlo draws")->capture_default_str()->check(CLI::Range(100000ULL, 1000000000ULL));

    std::string service_config;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--config", service_config, "Service config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*score) {
            return cmd_score(file, time_to_create, schema);
        }
        if (*band) {
            return cmd_band(file);
        }
        if (*ingest) {
            return cmd_ingest(config, out_dir);
        }
        if (*query) {
            return cmd_query(config, index_dir, phase, nlq, nlq_id, replay);
        }
        if (*evaluate) {
            return cmd_evaluate(config, index_dir, dataset, phase, seed, replay, out_dir, labels, !no_auto);
        }
        if (*report) {
            return cmd_report(runs_dir, dataset, labels, format, !no_auto);
        }
        if (*stats) {
            return cmd_stats(table, stats_seed, draws);
        }
        if (*serve) {
            return cmd_serve(service_config);
        }
    } catch (const SqlSyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
