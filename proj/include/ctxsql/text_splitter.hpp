#pragma once

#include "ctxsql/util.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql {

inline constexpr std::size_t kDefaultChunkSize = 1000;
inline constexpr std::size_t kDefaultChunkOverlap = 200;

/// A window of a context document. Offsets count Unicode code points.
struct Chunk {
    std::string doc_id;
    std::size_t seq = 0;
    std::size_t start_char = 0;
    std::size_t end_char = 0;
    std::string text;

    /// "doc_id#seq"
    std::string id() const;
    bool operator==(const Chunk&) const = default;
};

/// Fixed-stride character windows: chunk i covers
/// [i * (chunk_size - overlap), min(that + chunk_size, length)); the last
/// chunk ends at the text length. Throws unless chunk_size > overlap and the
/// text is non-empty.
std::vector<Chunk> split_text(std::string_view doc_id, std::string_view text,
                              std::size_t chunk_size = kDefaultChunkSize,
                              std::size_t overlap = kDefaultChunkOverlap);

/// Number of code points in UTF-8 text (invalid bytes count as one each).
std::size_t utf8_length(std::string_view text) noexcept;

}  // namespace ctxsql
