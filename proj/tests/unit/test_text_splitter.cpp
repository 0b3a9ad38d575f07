#include <doctest.h>

#include "ctxsql/text_splitter.hpp"

#include <random>

using namespace ctxsql;

namespace {

std::string ascii_text(std::size_t n) {
    std::string s(n, ' ');
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<char>('a' + i % 26);
    }
    return s;
}

}  // namespace

TEST_CASE("three windows over 2200 characters") {
    const auto chunks = split_text("doc", ascii_text(2200), 1000, 200);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].start_char == 0);
    CHECK(chunks[0].end_char == 1000);
    CHECK(chunks[1].start_char == 800);
    CHECK(chunks[1].end_char == 1800);
    CHECK(chunks[2].start_char == 1600);
    CHECK(chunks[2].end_char == 2200);
    CHECK(chunks[1].id() == "doc#1");
    CHECK(chunks[2].text == ascii_text(2200).substr(1600));
}

TEST_CASE("short and exact texts give one chunk") {
    auto c = split_text("d", ascii_text(500));
    REQUIRE(c.size() == 1);
    CHECK(c[0].end_char == 500);
    c = split_text("d", ascii_text(1000));
    REQUIRE(c.size() == 1);
    CHECK(c[0].end_char == 1000);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(split_text("d", "abc", 10, 10), Error);
    CHECK_THROWS_AS(split_text("d", "abc", 5, 9), Error);
    CHECK_THROWS_AS(split_text("d", "", 10, 2), Error);
}

TEST_CASE("random triples cover every character with a fixed stride") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t len = 1 + rng() % 5000;
        const std::size_t size = 1 + rng() % 1500;
        const std::size_t overlap = rng() % size;
        const std::string text = ascii_text(len);
        const auto chunks = split_text("r", text, size, overlap);
        CAPTURE(len);
        CAPTURE(size);
        CAPTURE(overlap);
        REQUIRE_FALSE(chunks.empty());
        std::vector<int> hits(len, 0);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            const auto& ch = chunks[i];
            REQUIRE(ch.seq == i);
            REQUIRE(ch.start_char == i * (size - overlap));
            REQUIRE(ch.start_char < ch.end_char);
            REQUIRE(ch.end_char - ch.start_char <= size);
            REQUIRE(ch.text == text.substr(ch.start_char, ch.end_char - ch.start_char));
            if (i + 1 < chunks.size()) {
                REQUIRE(ch.end_char - ch.start_char == size);
                REQUIRE(ch.end_char - chunks[i + 1].start_char == overlap);
            }
            for (std::size_t k = ch.start_char; k < ch.end_char; ++k) {
                ++hits[k];
            }
        }
        REQUIRE(chunks.back().end_char == len);
        // No trailing chunk fully contained in its predecessor.
        if (chunks.size() > 1) {
            REQUIRE(chunks[chunks.size() - 2].end_char < len);
        }
        for (int h : hits) {
            REQUIRE(h >= 1);
        }
        REQUIRE(split_text("r", text, size, overlap) == chunks);
    }
}

TEST_CASE("offsets count code points, not bytes") {
    // "é" is two bytes, "€" three.
    std::string text;
    for (int i = 0; i < 10; ++i) {
        text += "\xC3\xA9\xE2\x82\xAC";
    }
    CHECK(utf8_length(text) == 20);
    const auto chunks = split_text("u", text, 6, 2);
    CHECK(chunks.back().end_char == 20);
    CHECK(chunks[0].text == "\xC3\xA9\xE2\x82\xAC\xC3\xA9\xE2\x82\xAC\xC3\xA9\xE2\x82\xAC");
    CHECK(chunks[1].start_char == 4);
    CHECK(chunks[1].text.substr(0, 2) == "\xC3\xA9");
}
