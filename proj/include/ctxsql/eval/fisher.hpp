#pragma once

// Fisher's exact test for 2x2 tables and the Freeman-Halton extension to
// r x c tables.

#include "ctxsql/util.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsql::eval {

using Cells = std::vector<std::vector<std::uint64_t>>;

struct ContingencyTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    Cells cells;

    /// Throws unless the table is at least 2x2, rectangular, and the label
    /// counts match.
    void validate() const;
};

enum class FisherMethod { enumeration, monte_carlo, degenerate };

std::string_view fisher_method_name(FisherMethod method) noexcept;

struct FisherResult {
    double p_value = 1.0;
    FisherMethod method = FisherMethod::enumeration;
    bool degenerate = false;
    /// Same-margin tables visited (enumeration) or sampled (Monte Carlo).
    std::uint64_t tables_visited = 0;
    /// Total probability over all enumerated tables; 1 up to rounding.
    std::optional<double> probability_mass;
    std::optional<double> std_error;
    std::optional<std::uint64_t> seed;
    /// Shape after zero rows and columns were removed.
    std::size_t rows = 0;
    std::size_t columns = 0;
};

struct FisherOptions {
    /// Enumerate when the margin-bounded table count is at most this.
    double enumeration_limit = 1e7;
    std::uint64_t monte_carlo_draws = 100000;
    std::uint64_t seed = 20240917;
};

/// Relative tolerance applied when comparing a table's point probability
/// with the observed one.
inline constexpr double kFisherRelativeTolerance = 1e-7;

/// Two-sided p: total probability of same-margin tables no more likely than
/// the observed one. A zero margin gives p = 1 flagged degenerate.
FisherResult fisher_exact_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);
FisherResult fisher_exact_2x2(const Cells& cells);

/// Freeman-Halton. Zero rows and columns are dropped first; fewer than two
/// remaining rows or columns gives p = 1 flagged degenerate.
FisherResult fisher_exact_rxc(const Cells& cells, const FisherOptions& options = {});

/// Upper bound on the number of same-margin tables: the product over the
/// (r-1)(c-1) free cells of min(row sum, column sum) + 1.
double same_margin_table_bound(const Cells& cells);

/// Parses "a,b;c,d" (rows separated by ';', cells by ',').
Cells parse_cells(std::string_view text);

/// Uniform integer in [0, bound) from a 64-bit generator, by rejection so
/// every value is equally likely. Stable across standard libraries.
template <class Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = engine();
    } while (x >= limit);
    return x % bound;
}

}  // namespace ctxsql::eval
