#include "ctxsql/sql_tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ctxsql {

namespace {

// Sorted; searched with binary_search.
constexpr std::array<std::string_view, 63> kKeywords = {
    "ALL",     "ALTER",  "AND",       "ANY",    "AS",       "ASC",     "BETWEEN", "BY",     "CASE",
    "CONNECT", "CREATE", "CROSS",     "DELETE", "DESC",     "DISTINCT", "DROP",   "ELSE",   "END",
    "ESCAPE",  "EXCEPT", "EXISTS",    "FETCH",  "FOR",      "FROM",    "FULL",    "GRANT",  "GROUP",
    "HAVING",  "IN",     "INNER",     "INSERT", "INTERSECT", "INTO",   "IS",      "JOIN",   "LEFT",
    "LIKE",    "LIMIT",  "MERGE",     "MINUS",  "NATURAL",  "NOT",     "NULL",    "OFFSET", "ON",
    "OR",      "ORDER",  "OUTER",     "OVER",   "PARTITION", "RIGHT",  "SELECT",  "SET",    "START",
    "THEN",    "TRUNCATE", "UNION",   "UPDATE", "USING",    "VALUES",  "WHEN",    "WHERE",  "WITH",
};

bool is_ident_start(unsigned char c) noexcept {
    return std::isalpha(c) != 0 || c == '_' || c >= 0x80;
}

bool is_ident_part(unsigned char c) noexcept {
    return std::isalnum(c) != 0 || c == '_' || c == '$' || c == '#' || c >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view sql) : sql_(sql) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (pos_ < sql_.size()) {
            const unsigned char c = static_cast<unsigned char>(sql_[pos_]);
            if (std::isspace(c) != 0) {
                advance(1);
                continue;
            }
            const std::size_t start = pos_;
            const std::size_t line = line_;
            const std::size_t column = column_;
            Token token = next_token(c);
            token.offset = start;
            token.line = line;
            token.column = column;
            tokens.push_back(std::move(token));
        }
        return tokens;
    }

private:
    Token next_token(unsigned char c) {
        if (c == '-' && peek(1) == '-') {
            const std::size_t end = sql_.find('\n', pos_);
            return take(TokenKind::comment, (end == std::string_view::npos ? sql_.size() : end) - pos_);
        }
        if (c == '/' && peek(1) == '*') {
            const std::size_t end = sql_.find("*/", pos_ + 2);
            if (end == std::string_view::npos) {
                fail("unterminated block comment");
            }
            return take(TokenKind::comment, end + 2 - pos_);
        }
        if (c == '\'') {
            return string_literal();
        }
        if (c == '"') {
            return quoted_identifier();
        }
        if (std::isdigit(c) != 0 || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))) != 0)) {
            return number();
        }
        if (is_ident_start(c)) {
            return word();
        }
        if (c == '(' || c == ')' || c == ',' || c == ';' || c == '.') {
            return take(TokenKind::punct, 1);
        }
        static constexpr std::array<std::string_view, 8> kTwoCharOps = {"<=", ">=", "<>", "!=", "||", "=>", ":=", "^="};
        for (auto op : kTwoCharOps) {
            if (sql_.substr(pos_, 2) == op) {
                return take(TokenKind::op, 2);
            }
        }
        return take(TokenKind::op, 1);
    }

    Token string_literal() {
        const std::size_t start = pos_;
        std::string body;
        std::size_t i = pos_ + 1;
        while (true) {
            if (i >= sql_.size()) {
                fail_at(start, "unterminated string literal");
            }
            if (sql_[i] == '\'') {
                if (i + 1 < sql_.size() && sql_[i + 1] == '\'') {
                    body.push_back('\'');
                    i += 2;
                    continue;
                }
                break;
            }
            body.push_back(sql_[i]);
            ++i;
        }
        advance(i + 1 - pos_);
        return Token{TokenKind::string, std::move(body)};
    }

    Token quoted_identifier() {
        const std::size_t start = pos_;
        const std::size_t end = sql_.find('"', pos_ + 1);
        if (end == std::string_view::npos) {
            fail_at(start, "unterminated quoted identifier");
        }
        std::string body = to_upper(sql_.substr(pos_ + 1, end - pos_ - 1));
        advance(end + 1 - pos_);
        return Token{TokenKind::quoted_identifier, std::move(body)};
    }

    Token number() {
        std::size_t i = pos_;
        while (i < sql_.size() && (std::isdigit(static_cast<unsigned char>(sql_[i])) != 0 || sql_[i] == '.')) {
            ++i;
        }
        if (i < sql_.size() && (sql_[i] == 'e' || sql_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < sql_.size() && (sql_[j] == '+' || sql_[j] == '-')) {
                ++j;
            }
            if (j < sql_.size() && std::isdigit(static_cast<unsigned char>(sql_[j])) != 0) {
                i = j;
                while (i < sql_.size() && std::isdigit(static_cast<unsigned char>(sql_[i])) != 0) {
                    ++i;
                }
            }
        }
        return take(TokenKind::number, i - pos_);
    }

    Token word() {
        std::size_t i = pos_;
        while (i < sql_.size() && is_ident_part(static_cast<unsigned char>(sql_[i]))) {
            ++i;
        }
        std::string upper = to_upper(sql_.substr(pos_, i - pos_));
        advance(i - pos_);
        const TokenKind kind = is_sql_keyword(upper) ? TokenKind::keyword : TokenKind::identifier;
        return Token{kind, std::move(upper)};
    }

    Token take(TokenKind kind, std::size_t length) {
        Token token{kind, std::string(sql_.substr(pos_, length))};
        advance(length);
        return token;
    }

    char peek(std::size_t ahead) const noexcept {
        return pos_ + ahead < sql_.size() ? sql_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t count) noexcept {
        for (std::size_t i = 0; i < count && pos_ < sql_.size(); ++i, ++pos_) {
            if (sql_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) { fail_at(pos_, what); }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& what) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset && i < sql_.size(); ++i) {
            if (sql_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw SqlSyntaxError(what + " at line " + std::to_string(line) + ", column " + std::to_string(column),
                             offset, line, column);
    }

    std::string_view sql_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) noexcept {
    switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::quoted_identifier: return "quoted_identifier";
    case TokenKind::string: return "string";
    case TokenKind::number: return "number";
    case TokenKind::op: return "operator";
    case TokenKind::punct: return "punctuation";
    case TokenKind::comment: return "comment";
    }
    return "unknown";
}

SqlSyntaxError::SqlSyntaxError(std::string message, std::size_t offset, std::size_t line, std::size_t column)
    : Error(std::move(message)), offset_(offset), line_(line), column_(column) {}

bool is_sql_keyword(std::string_view upper_word) noexcept {
    return std::binary_search(kKeywords.begin(), kKeywords.end(), upper_word);
}

std::vector<Token> tokenize_sql(std::string_view sql) {
    if (trim(sql).empty()) {
        throw SqlSyntaxError("empty SQL text", 0, 1, 1);
    }
    return Lexer(sql).run();
}

std::vector<Token> tokenize_sql_code(std::string_view sql) {
    auto tokens = tokenize_sql(sql);
    std::erase_if(tokens, [](const Token& t) { return t.kind == TokenKind::comment; });
    return tokens;
}

}  // namespace ctxsql
