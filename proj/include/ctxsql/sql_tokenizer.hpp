#pragma once

#include "ctxsql/util.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql {

enum class TokenKind { keyword, identifier, quoted_identifier, string, number, op, punct, comment };

std::string_view token_kind_name(TokenKind kind) noexcept;

struct Token {
    TokenKind kind;
    /// Keywords and identifiers: upper-cased. Quoted identifiers: the
    /// unquoted body, upper-cased. Strings: the body with '' unescaped.
    /// Everything else: the source text.
    std::string text;
    std::size_t offset = 0;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is_keyword(std::string_view word) const noexcept { return kind == TokenKind::keyword && text == word; }
    bool is_punct(char c) const noexcept { return kind == TokenKind::punct && text.size() == 1 && text[0] == c; }
    bool is_name() const noexcept { return kind == TokenKind::identifier || kind == TokenKind::quoted_identifier; }
};

class SqlSyntaxError : public Error {
public:
    SqlSyntaxError(std::string message, std::size_t offset, std::size_t line, std::size_t column);

    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t offset_;
    std::size_t line_;
    std::size_t column_;
};

bool is_sql_keyword(std::string_view upper_word) noexcept;

/// Splits SQL text into classified tokens, comments included. Keywords are
/// matched case-insensitively; literals and comments never yield keywords.
std::vector<Token> tokenize_sql(std::string_view sql);

/// tokenize_sql without comment tokens.
std::vector<Token> tokenize_sql_code(std::string_view sql);

}  // namespace ctxsql
