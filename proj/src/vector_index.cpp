#include "ctxsql/vector_index.hpp"

#include "ctxsql/simd/vector_kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

namespace ctxsql {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'X', 'S', 'Q', 'L', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "index files are written in host order; little-endian only");

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename T>
    void pod(T value) {
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }
    void str(const std::string& s) {
        pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    template <typename T>
    T pod() {
        T value{};
        in_.read(reinterpret_cast<char*>(&value), sizeof(T));
        check();
        return value;
    }
    std::string str() {
        const auto size = pod<std::uint32_t>();
        std::string s(size, '\0');
        in_.read(s.data(), size);
        check();
        return s;
    }

private:
    void check() const {
        if (!in_) {
            throw Error("truncated index file: " + path_);
        }
    }

    std::istream& in_;
    std::string path_;
};

}  // namespace

VectorIndex::VectorIndex(std::vector<Chunk> chunks, const std::vector<EmbeddingVector>& vectors,
                         std::string provider_id, std::string corpus_hash)
    : chunks_(std::move(chunks)), provider_id_(std::move(provider_id)), corpus_hash_(std::move(corpus_hash)) {
    if (chunks_.size() != vectors.size()) {
        throw Error("index build: " + std::to_string(chunks_.size()) + " chunks but " +
                    std::to_string(vectors.size()) + " vectors");
    }
    if (chunks_.empty()) {
        return;
    }
    dim_ = vectors.front().dim();
    if (dim_ == 0) {
        throw Error("index build: zero-dimensional vectors");
    }
    std::set<std::string> ids;
    rows_.reserve(chunks_.size() * dim_);
    norms_.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        if (vectors[i].dim() != dim_) {
            throw ProviderError(ProviderError::Kind::dimension_mismatch,
                                "index build: vector " + std::to_string(i) + " has dimension " +
                                    std::to_string(vectors[i].dim()) + ", expected " + std::to_string(dim_));
        }
        if (!ids.insert(chunks_[i].id()).second) {
            throw Error("index build: duplicate chunk id " + chunks_[i].id());
        }
        rows_.insert(rows_.end(), vectors[i].values.begin(), vectors[i].values.end());
        norms_.push_back(vectors[i].norm());
    }
}

EmbeddingVector VectorIndex::vector_at(std::size_t i) const {
    const auto first = rows_.begin() + static_cast<std::ptrdiff_t>(i * dim_);
    return EmbeddingVector{std::vector<double>(first, first + static_cast<std::ptrdiff_t>(dim_))};
}

std::vector<ScoredChunk> VectorIndex::retrieve_top_k(const EmbeddingVector& query, std::size_t k) const {
    if (k == 0) {
        throw Error("retrieve_top_k requires k >= 1");
    }
    if (chunks_.empty()) {
        return {};
    }
    if (query.dim() != dim_) {
        throw ProviderError(ProviderError::Kind::dimension_mismatch,
                            "query dimension " + std::to_string(query.dim()) + " does not match index dimension " +
                                std::to_string(dim_));
    }

    std::vector<double> dots(chunks_.size());
    simd::dot_rows(rows_, dim_, query.values, dots);
    const double query_norm = query.norm();
    std::vector<double> sims(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        const double denom = query_norm * norms_[i];
        sims[i] = denom == 0.0 ? 0.0 : std::clamp(dots[i] / denom, -1.0, 1.0);
    }

    std::vector<std::size_t> order(chunks_.size());
    std::iota(order.begin(), order.end(), 0);
    const auto better = [&](std::size_t a, std::size_t b) {
        if (sims[a] != sims[b]) {
            return sims[a] > sims[b];
        }
        if (chunks_[a].doc_id != chunks_[b].doc_id) {
            return chunks_[a].doc_id < chunks_[b].doc_id;
        }
        return chunks_[a].seq < chunks_[b].seq;
    };
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);

    std::vector<ScoredChunk> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(ScoredChunk{chunks_[order[i]], sims[order[i]]});
    }
    return out;
}

void VectorIndex::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write index file: " + path.string());
    }
    Writer w(out);
    out.write(kMagic, sizeof(kMagic));
    w.pod<std::uint32_t>(kFormatVersion);
    w.str(provider_id_);
    w.str(corpus_hash_);
    w.pod<std::uint64_t>(dim_);
    w.pod<std::uint64_t>(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        const Chunk& c = chunks_[i];
        w.str(c.doc_id);
        w.pod<std::uint64_t>(c.seq);
        w.pod<std::uint64_t>(c.start_char);
        w.pod<std::uint64_t>(c.end_char);
        w.str(c.text);
        out.write(reinterpret_cast<const char*>(rows_.data() + i * dim_),
                  static_cast<std::streamsize>(dim_ * sizeof(double)));
    }
    if (!out) {
        throw Error("failed writing index file: " + path.string());
    }
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open index file: " + path.string());
    }
    char magic[sizeof(kMagic)] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not an index file: " + path.string());
    }
    Reader r(in, path.string());
    const auto version = r.pod<std::uint32_t>();
    if (version != kFormatVersion) {
        throw Error("unsupported index format version " + std::to_string(version) + " in " + path.string());
    }
    std::string provider = r.str();
    std::string corpus_hash = r.str();
    const auto dim = r.pod<std::uint64_t>();
    const auto count = r.pod<std::uint64_t>();

    std::vector<Chunk> chunks;
    std::vector<EmbeddingVector> vectors;
    chunks.reserve(count);
    vectors.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Chunk c;
        c.doc_id = r.str();
        c.seq = r.pod<std::uint64_t>();
        c.start_char = r.pod<std::uint64_t>();
        c.end_char = r.pod<std::uint64_t>();
        c.text = r.str();
        EmbeddingVector v;
        v.values.resize(dim);
        in.read(reinterpret_cast<char*>(v.values.data()), static_cast<std::streamsize>(dim * sizeof(double)));
        if (!in) {
            throw Error("truncated index file: " + path.string());
        }
        chunks.push_back(std::move(c));
        vectors.push_back(std::move(v));
    }
    return VectorIndex(std::move(chunks), vectors, std::move(provider), std::move(corpus_hash));
}

VectorIndex build_index(std::vector<Chunk> chunks, const EmbeddingProvider& provider, std::string corpus_hash) {
    if (chunks.empty()) {
        return VectorIndex({}, {}, provider.id(), std::move(corpus_hash));
    }
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) {
        texts.push_back(c.text);
    }
    const auto vectors = embed(texts, provider);
    return VectorIndex(std::move(chunks), vectors, provider.id(), std::move(corpus_hash));
}

std::vector<ScoredChunk> retrieve_top_k(const VectorIndex& index, const EmbeddingVector& query, std::size_t k) {
    return index.retrieve_top_k(query, k);
}

}  // namespace ctxsql
