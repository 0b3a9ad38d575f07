#include "ctxsql/sql_extraction.hpp"

#include "ctxsql/sql_tokenizer.hpp"

#include <cctype>

namespace ctxsql {

namespace {

const std::vector<std::string>& default_patterns() {
    static const std::vector<std::string> patterns = {
        "cannot create the query",
        "cannot generate the sql",
        "can't create the query",
        "can't generate the sql",
        "unable to generate the sql",
        "unable to create the query",
        "without additional information",
    };
    return patterns;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_sql_fence_label(std::string_view label) {
    return label.empty() || iequals(label, "sql") || iequals(label, "plsql") || iequals(label, "oracle") ||
           iequals(label, "sqlplus");
}

std::optional<std::string> fenced_sql(std::string_view text) {
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = text.find("```", pos);
        if (open == std::string_view::npos) {
            return std::nullopt;
        }
        const std::size_t close = text.find("```", open + 3);
        if (close == std::string_view::npos) {
            return std::nullopt;
        }
        std::string_view body = text.substr(open + 3, close - open - 3);
        std::size_t label_end = 0;
        while (label_end < body.size() && (is_word_char(body[label_end]) || body[label_end] == '+' ||
                                           body[label_end] == '-')) {
            ++label_end;
        }
        const std::string_view label = body.substr(0, label_end);
        std::optional<std::string> candidate;
        if (is_sql_fence_label(label)) {
            candidate = trim(body.substr(label_end));
        } else if (iequals(label, "SELECT") || iequals(label, "WITH")) {
            candidate = trim(body);  // unlabeled fence starting on the same line
        }
        if (candidate && !candidate->empty()) {
            return candidate;
        }
        pos = close + 3;
    }
}

bool plausible_statement(std::string_view candidate) {
    std::vector<Token> tokens;
    try {
        tokens = tokenize_sql_code(candidate);
    } catch (const SqlSyntaxError&) {
        return false;
    }
    if (tokens.empty()) {
        return false;
    }
    if (tokens[0].is_keyword("WITH")) {
        return tokens.size() >= 4 && tokens[1].is_name() && tokens[2].is_keyword("AS") && tokens[3].is_punct('(');
    }
    for (const auto& t : tokens) {
        if (t.is_keyword("FROM")) {
            return true;
        }
    }
    return false;
}

std::optional<std::string> bare_statement(std::string_view text) {
    const std::string upper = to_upper(text);
    for (std::size_t i = 0; i < upper.size(); ++i) {
        const bool boundary = i == 0 || !is_word_char(upper[i - 1]);
        if (!boundary) {
            continue;
        }
        std::size_t keyword_length = 0;
        if (upper.compare(i, 6, "SELECT") == 0) {
            keyword_length = 6;
        } else if (upper.compare(i, 4, "WITH") == 0) {
            keyword_length = 4;
        } else {
            continue;
        }
        if (i + keyword_length < upper.size() && is_word_char(upper[i + keyword_length])) {
            continue;
        }
        std::size_t end = text.size();
        if (const std::size_t semi = text.find(';', i); semi != std::string_view::npos) {
            end = semi;
        }
        if (const std::size_t blank = text.find("\n\n", i); blank != std::string_view::npos && blank < end) {
            end = blank;
        }
        std::string candidate = trim(text.substr(i, end - i));
        if (plausible_statement(candidate)) {
            return candidate;
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view extraction_kind_name(ExtractionKind kind) noexcept {
    switch (kind) {
    case ExtractionKind::sql: return "sql";
    case ExtractionKind::refusal: return "refusal";
    case ExtractionKind::unparseable: return "unparseable";
    }
    return "unparseable";
}

RefusalPatterns::RefusalPatterns() : patterns_(default_patterns()) {}

RefusalPatterns::RefusalPatterns(std::vector<std::string> patterns) {
    for (auto& p : patterns) {
        std::string lowered = to_lower(trim(p));
        if (!lowered.empty()) {
            patterns_.push_back(std::move(lowered));
        }
    }
}

RefusalPatterns RefusalPatterns::from_text(std::string_view text) {
    std::vector<std::string> patterns;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string line = trim(text.substr(pos, eol - pos));
        if (!line.empty() && line[0] != '#') {
            patterns.push_back(std::move(line));
        }
        pos = eol + 1;
    }
    return RefusalPatterns(std::move(patterns));
}

RefusalPatterns RefusalPatterns::from_file(const std::string& path) {
    return from_text(read_file(path));
}

bool RefusalPatterns::matches(std::string_view text) const {
    if (text.empty()) {
        return false;
    }
    const std::string lowered = to_lower(text);
    for (const auto& p : patterns_) {
        if (lowered.find(p) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool detect_refusal(std::string_view text, const RefusalPatterns& patterns) {
    return patterns.matches(text);
}

ExtractionResult extract_sql(std::string_view response_text, const RefusalPatterns& patterns) {
    if (auto sql = fenced_sql(response_text)) {
        return ExtractionResult{ExtractionKind::sql, std::move(sql), std::nullopt};
    }
    if (detect_refusal(response_text, patterns)) {
        return ExtractionResult{ExtractionKind::refusal, std::nullopt, trim(response_text)};
    }
    if (auto sql = bare_statement(response_text)) {
        return ExtractionResult{ExtractionKind::sql, std::move(sql), std::nullopt};
    }
    return ExtractionResult{};
}

ExtractionResult extract_sql(const LlmResponse& response, const RefusalPatterns& patterns) {
    return extract_sql(response.raw_text, patterns);
}

}  // namespace ctxsql
