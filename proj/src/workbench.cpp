#include "ctxsql/workbench.hpp"

#include <json.hpp>

namespace ctxsql {

using nlohmann::json;

namespace {

std::size_t slot(Phase phase) {
    return static_cast<std::size_t>(phase);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

std::shared_ptr<EmbeddingProvider> make_embedder(const WorkbenchConfig& config) {
    if (config.embedding == "local") {
        return std::make_shared<LocalHashEmbedder>();
    }
    if (config.embedding == "remote") {
        RemoteEndpoint endpoint = RemoteEndpoint::from_environment("CTXSQL_EMBED_MODEL", "text-embedding-ada-002");
        endpoint.max_in_flight = config.max_in_flight;
        return std::make_shared<RemoteEmbedder>(std::move(endpoint));
    }
    throw Error("unknown embedding provider '" + config.embedding + "' (expected local or remote)");
}

std::vector<Chunk> chunk_documents(const std::vector<CorpusDocument>& docs, const WorkbenchConfig& config) {
    std::vector<Chunk> chunks;
    for (const auto& doc : docs) {
        auto split = split_text(doc.doc_id, doc.text, config.chunk_size, config.chunk_overlap);
        chunks.insert(chunks.end(), std::make_move_iterator(split.begin()), std::make_move_iterator(split.end()));
    }
    return chunks;
}

}  // namespace

WorkbenchConfig WorkbenchConfig::from_file(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error("workbench config " + path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    WorkbenchConfig config;
    try {
        config.schema_path = resolve(base, doc.at("schema").get<std::string>());
        config.narrowed_tables = doc.value("narrowed_tables", std::vector<std::string>{});
        for (const auto& d : doc.value("context_documents", std::vector<std::string>{})) {
            config.context_documents.push_back(resolve(base, d));
        }
        config.chunk_size = doc.value("chunk_size", kDefaultChunkSize);
        config.chunk_overlap = doc.value("chunk_overlap", kDefaultChunkOverlap);
        config.top_k = doc.value("top_k", kDefaultTopK);
        config.embedding = doc.value("embedding", std::string("local"));
        config.max_in_flight = doc.value("max_in_flight", std::size_t{4});
        if (doc.contains("persona_file")) {
            config.persona_path = resolve(base, doc.at("persona_file").get<std::string>());
        }
        if (doc.contains("refusal_patterns_file")) {
            config.refusal_patterns_path = resolve(base, doc.at("refusal_patterns_file").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw Error("workbench config " + path.string() + ": " + e.what());
    }
    if (config.narrowed_tables.empty()) {
        throw Error("workbench config " + path.string() + ": narrowed_tables must list at least one table");
    }
    return config;
}

Workbench Workbench::open(const WorkbenchConfig& config, const std::optional<std::filesystem::path>& index_dir) {
    Workbench wb;
    wb.config_ = config;
    wb.full_catalog_ = load_catalog_file(config.schema_path.string());
    NarrowResult narrowed = narrow(wb.full_catalog_, config.narrowed_tables);
    wb.narrowing_drops_ = std::move(narrowed.dropped);
    wb.embedder_ = make_embedder(config);
    wb.persona_ = config.persona_path ? trim(read_file(*config.persona_path)) : std::string(kDefaultPersona);
    wb.refusals_ = config.refusal_patterns_path ? RefusalPatterns::from_file(config.refusal_patterns_path->string())
                                                : RefusalPatterns{};

    const CorpusDocument schema_doc{"schema", render_schema_text(wb.full_catalog_)};
    const CorpusDocument narrowed_doc{"schema_narrowed", render_schema_text(narrowed.catalog)};
    std::vector<CorpusDocument> context_docs;
    for (const auto& path : config.context_documents) {
        context_docs.push_back(CorpusDocument{path.stem().string(), read_file(path)});
    }

    wb.documents_[slot(Phase::schema_only)] = {schema_doc};
    wb.documents_[slot(Phase::schema_plus_context)] = {schema_doc};
    for (const auto& d : context_docs) {
        wb.documents_[slot(Phase::schema_plus_context)].push_back(d);
    }
    wb.documents_[slot(Phase::narrowed_schema)] = {narrowed_doc};

    for (Phase phase : kAllPhases) {
        auto corpus = std::make_shared<PhaseCorpus>();
        corpus->phase = phase;
        corpus->catalog = phase == Phase::narrowed_schema ? narrowed.catalog : wb.full_catalog_;
        const auto& docs = wb.documents_[slot(phase)];
        corpus->corpus_hash = corpus_hash(docs);
        for (const auto& d : docs) {
            corpus->doc_ids.push_back(d.doc_id);
        }
        if (index_dir) {
            corpus->index = VectorIndex::load(*index_dir / index_file_name(phase));
            if (corpus->index.corpus_hash() != corpus->corpus_hash) {
                throw Error("index " + (*index_dir / index_file_name(phase)).string() +
                            " was built from a different corpus; re-run ingest");
            }
            if (corpus->index.provider_id() != wb.embedder_->id()) {
                throw Error("index " + (*index_dir / index_file_name(phase)).string() + " was embedded with " +
                            corpus->index.provider_id() + ", configured provider is " + wb.embedder_->id());
            }
        } else {
            corpus->index = build_index(chunk_documents(docs, config), *wb.embedder_, corpus->corpus_hash);
        }
        wb.corpora_[slot(phase)] = std::move(corpus);
    }
    return wb;
}

const PhaseCorpus& Workbench::corpus(Phase phase) const {
    return *corpora_[slot(phase)];
}

const std::vector<CorpusDocument>& Workbench::documents(Phase phase) const {
    return documents_[slot(phase)];
}

void Workbench::save_indexes(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    json manifest{{"format", "ctxsql-index-manifest/1"}, {"embedding_provider", embedder_->id()}};
    json phases = json::object();
    for (Phase phase : kAllPhases) {
        const PhaseCorpus& c = corpus(phase);
        c.index.save(dir / index_file_name(phase));
        phases[std::string(phase_name(phase))] = {{"file", index_file_name(phase)},
                                                  {"corpus_hash", c.corpus_hash},
                                                  {"chunks", c.index.size()},
                                                  {"documents", c.doc_ids}};
    }
    manifest["phases"] = std::move(phases);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

PipelineOptions Workbench::pipeline_options(Clock clock) const {
    PipelineOptions options;
    options.persona = persona_;
    options.refusal_patterns = refusals_;
    options.top_k = config_.top_k;
    options.clock = std::move(clock);
    return options;
}

std::string index_file_name(Phase phase) {
    return std::string(phase_short_name(phase)) + ".idx";
}

std::string corpus_hash(const std::vector<CorpusDocument>& documents) {
    std::string material;
    for (const auto& d : documents) {
        material += d.doc_id;
        material.push_back('\0');
        material += d.text;
        material.push_back('\0');
    }
    return sha256_hex(material);
}

}  // namespace ctxsql
