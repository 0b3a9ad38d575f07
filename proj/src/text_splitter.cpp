#include "ctxsql/text_splitter.hpp"

namespace ctxsql {

namespace {

std::size_t sequence_length(unsigned char lead) noexcept {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

// Byte offset of each code point, plus a final entry at text.size().
std::vector<std::size_t> code_point_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    offsets.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        offsets.push_back(i);
        std::size_t len = sequence_length(static_cast<unsigned char>(text[i]));
        if (i + len > text.size()) {
            len = 1;
        }
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
                len = 1;
                break;
            }
        }
        i += len;
    }
    offsets.push_back(text.size());
    return offsets;
}

}  // namespace

std::string Chunk::id() const {
    return doc_id + "#" + std::to_string(seq);
}

std::size_t utf8_length(std::string_view text) noexcept {
    return code_point_offsets(text).size() - 1;
}

std::vector<Chunk> split_text(std::string_view doc_id, std::string_view text, std::size_t chunk_size,
                              std::size_t overlap) {
    if (chunk_size == 0 || overlap >= chunk_size) {
        throw Error("invalid splitter parameters: chunk_size must exceed overlap (got " +
                    std::to_string(chunk_size) + "/" + std::to_string(overlap) + ")");
    }
    if (text.empty()) {
        throw Error("cannot split empty document " + std::string(doc_id));
    }

    const auto offsets = code_point_offsets(text);
    const std::size_t length = offsets.size() - 1;
    const std::size_t stride = chunk_size - overlap;

    std::vector<Chunk> chunks;
    for (std::size_t start = 0;; start += stride) {
        const std::size_t end = std::min(start + chunk_size, length);
        chunks.push_back(Chunk{std::string(doc_id), chunks.size(), start, end,
                               std::string(text.substr(offsets[start], offsets[end] - offsets[start]))});
        if (end == length) {
            break;
        }
    }
    return chunks;
}

}  // namespace ctxsql
