#include "ctxsql/eval/fisher.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

namespace ctxsql::eval {

std::string_view fisher_method_name(FisherMethod method) noexcept {
    switch (method) {
        case FisherMethod::enumeration:
            return "enumeration";
        case FisherMethod::monte_carlo:
            return "monte_carlo";
        case FisherMethod::degenerate:
            return "degenerate";
    }
    return "enumeration";
}

void ContingencyTable::validate() const {
    if (cells.size() < 2) {
        throw Error("contingency table needs at least 2 rows");
    }
    for (const auto& row : cells) {
        if (row.size() != cells.front().size()) {
            throw Error("contingency table rows differ in length");
        }
    }
    if (cells.front().size() < 2) {
        throw Error("contingency table needs at least 2 columns");
    }
    if (!row_labels.empty() && row_labels.size() != cells.size()) {
        throw Error("contingency table row label count mismatch");
    }
    if (!column_labels.empty() && column_labels.size() != cells.front().size()) {
        throw Error("contingency table column label count mismatch");
    }
}

namespace {

void check_shape(const Cells& cells) {
    if (cells.empty() || cells.front().empty()) {
        throw Error("contingency table is empty");
    }
    for (const auto& row : cells) {
        if (row.size() != cells.front().size()) {
            throw Error("contingency table rows differ in length");
        }
    }
}

Cells drop_zero_margins(const Cells& cells) {
    std::vector<std::uint64_t> col_sums(cells.front().size(), 0);
    Cells rows;
    for (const auto& row : cells) {
        if (std::accumulate(row.begin(), row.end(), std::uint64_t{0}) > 0) {
            rows.push_back(row);
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            col_sums[j] += row[j];
        }
    }
    Cells out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < col_sums.size(); ++j) {
            if (col_sums[j] > 0) {
                out[i].push_back(rows[i][j]);
            }
        }
    }
    return out;
}

std::vector<double> log_factorials(std::uint64_t n) {
    std::vector<double> lf(n + 1, 0.0);
    for (std::uint64_t k = 2; k <= n; ++k) {
        lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
    }
    return lf;
}

FisherResult degenerate_result(std::size_t rows, std::size_t cols) {
    FisherResult r;
    r.p_value = 1.0;
    r.method = FisherMethod::degenerate;
    r.degenerate = true;
    r.rows = rows;
    r.columns = cols;
    return r;
}

struct Margins {
    std::vector<std::uint64_t> rows;
    std::vector<std::uint64_t> cols;
    std::uint64_t total = 0;
};

Margins margins_of(const Cells& cells) {
    Margins m;
    m.rows.assign(cells.size(), 0);
    m.cols.assign(cells.front().size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = 0; j < cells[i].size(); ++j) {
            m.rows[i] += cells[i][j];
            m.cols[j] += cells[i][j];
            m.total += cells[i][j];
        }
    }
    return m;
}

// log P(table | margins) = sum log r_i! + sum log c_j! - log N! - sum log n_ij!
double log_constant(const Margins& m, const std::vector<double>& lf) {
    double k = -lf[m.total];
    for (auto r : m.rows) {
        k += lf[r];
    }
    for (auto c : m.cols) {
        k += lf[c];
    }
    return k;
}

// Enumerates column by column; within a column the last row is determined,
// and the last column is determined by the remaining row capacity.
class Enumerator {
public:
    Enumerator(const Margins& m, const std::vector<double>& lf, double log_k, double observed_log_p)
        : m_(m), lf_(lf), log_k_(log_k), threshold_(observed_log_p + std::log1p(kFisherRelativeTolerance)),
          remaining_(m.rows) {}

    void run() { column(0, 0.0); }

    double p = 0.0;
    double mass = 0.0;
    std::uint64_t visited = 0;

private:
    void column(std::size_t j, double acc) {
        const std::size_t c = m_.cols.size();
        if (j + 1 == c) {
            double s = acc;
            for (auto r : remaining_) {
                s -= lf_[r];
            }
            finish(s);
            return;
        }
        cell(j, 0, m_.cols[j], acc);
    }

    void cell(std::size_t j, std::size_t i, std::uint64_t left, double acc) {
        const std::size_t r = m_.rows.size();
        if (i + 1 == r) {
            if (left > remaining_[i]) {
                return;
            }
            remaining_[i] -= left;
            column(j + 1, acc - lf_[left]);
            remaining_[i] += left;
            return;
        }
        // Capacity of the rows below bounds how little this cell may take.
        std::uint64_t below = 0;
        for (std::size_t k = i + 1; k < r; ++k) {
            below += remaining_[k];
        }
        const std::uint64_t lo = left > below ? left - below : 0;
        const std::uint64_t hi = std::min(left, remaining_[i]);
        for (std::uint64_t x = lo; x <= hi; ++x) {
            remaining_[i] -= x;
            cell(j, i + 1, left - x, acc - lf_[x]);
            remaining_[i] += x;
        }
    }

    void finish(double log_terms) {
        ++visited;
        const double log_p = log_k_ + log_terms;
        const double prob = std::exp(log_p);
        mass += prob;
        if (log_p <= threshold_) {
            p += prob;
        }
    }

    const Margins& m_;
    const std::vector<double>& lf_;
    double log_k_;
    double threshold_;
    std::vector<std::uint64_t> remaining_;
};

double observed_log_p(const Cells& cells, double log_k, const std::vector<double>& lf) {
    double s = log_k;
    for (const auto& row : cells) {
        for (auto x : row) {
            s -= lf[x];
        }
    }
    return s;
}

FisherResult monte_carlo(const Cells& cells, const Margins& m, const std::vector<double>& lf, double log_k,
                         const FisherOptions& options) {
    const double threshold = observed_log_p(cells, log_k, lf) + std::log1p(kFisherRelativeTolerance);
    // One entry per observation holding its row; a shuffle followed by
    // cutting into column-sized runs samples the hypergeometric null.
    std::vector<std::uint32_t> labels;
    labels.reserve(m.total);
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        labels.insert(labels.end(), m.rows[i], static_cast<std::uint32_t>(i));
    }
    std::mt19937_64 engine(options.seed);
    std::vector<std::uint64_t> counts(m.rows.size() * m.cols.size());
    std::uint64_t hits = 0;
    const std::uint64_t draws = std::max<std::uint64_t>(options.monte_carlo_draws, 1);
    for (std::uint64_t d = 0; d < draws; ++d) {
        for (std::size_t k = labels.size(); k > 1; --k) {
            std::swap(labels[k - 1], labels[uniform_below(engine, k)]);
        }
        std::fill(counts.begin(), counts.end(), 0);
        std::size_t pos = 0;
        for (std::size_t j = 0; j < m.cols.size(); ++j) {
            for (std::uint64_t n = 0; n < m.cols[j]; ++n) {
                ++counts[labels[pos++] * m.cols.size() + j];
            }
        }
        double s = log_k;
        for (auto x : counts) {
            s -= lf[x];
        }
        if (s <= threshold) {
            ++hits;
        }
    }
    FisherResult r;
    r.method = FisherMethod::monte_carlo;
    // Counting the observed table as one draw keeps the estimate in (0, 1].
    r.p_value = static_cast<double>(hits + 1) / static_cast<double>(draws + 1);
    r.std_error = std::sqrt(r.p_value * (1.0 - r.p_value) / static_cast<double>(draws));
    r.tables_visited = draws;
    r.seed = options.seed;
    r.rows = m.rows.size();
    r.columns = m.cols.size();
    return r;
}

}  // namespace

double same_margin_table_bound(const Cells& cells) {
    check_shape(cells);
    const Margins m = margins_of(cells);
    double bound = 1.0;
    for (std::size_t i = 0; i + 1 < m.rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < m.cols.size(); ++j) {
            bound *= static_cast<double>(std::min(m.rows[i], m.cols[j]) + 1);
        }
    }
    return bound;
}

FisherResult fisher_exact_rxc(const Cells& input, const FisherOptions& options) {
    check_shape(input);
    const Cells cells = drop_zero_margins(input);
    if (cells.size() < 2 || cells.front().size() < 2) {
        return degenerate_result(cells.size(), cells.empty() ? 0 : cells.front().size());
    }
    const Margins m = margins_of(cells);
    const std::vector<double> lf = log_factorials(m.total);
    const double log_k = log_constant(m, lf);

    if (same_margin_table_bound(cells) > options.enumeration_limit) {
        return monte_carlo(cells, m, lf, log_k, options);
    }
    Enumerator e(m, lf, log_k, observed_log_p(cells, log_k, lf));
    e.run();
    FisherResult r;
    r.method = FisherMethod::enumeration;
    r.p_value = std::min(1.0, e.p);
    r.tables_visited = e.visited;
    r.probability_mass = e.mass;
    r.rows = m.rows.size();
    r.columns = m.cols.size();
    return r;
}

FisherResult fisher_exact_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const std::uint64_t r1 = a + b;
    const std::uint64_t r2 = c + d;
    const std::uint64_t c1 = a + c;
    const std::uint64_t c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
        return degenerate_result(2, 2);
    }
    const std::uint64_t n = r1 + r2;
    const std::vector<double> lf = log_factorials(n);
    // P(x) = C(r1, x) C(r2, c1 - x) / C(n, c1) for the top-left cell x.
    const auto log_p = [&](std::uint64_t x) {
        return lf[r1] - lf[x] - lf[r1 - x] + lf[r2] - lf[c1 - x] - lf[r2 - c1 + x] - lf[n] + lf[c1] + lf[n - c1];
    };
    const double threshold = log_p(a) + std::log1p(kFisherRelativeTolerance);
    const std::uint64_t lo = c1 > r2 ? c1 - r2 : 0;
    const std::uint64_t hi = std::min(r1, c1);
    FisherResult r;
    r.method = FisherMethod::enumeration;
    r.rows = 2;
    r.columns = 2;
    double p = 0.0;
    double mass = 0.0;
    for (std::uint64_t x = lo; x <= hi; ++x) {
        const double lp = log_p(x);
        const double prob = std::exp(lp);
        mass += prob;
        if (lp <= threshold) {
            p += prob;
        }
        ++r.tables_visited;
    }
    r.p_value = std::min(1.0, p);
    r.probability_mass = mass;
    return r;
}

FisherResult fisher_exact_2x2(const Cells& cells) {
    if (cells.size() != 2 || cells[0].size() != 2 || cells[1].size() != 2) {
        throw Error("fisher_exact_2x2 needs a 2x2 table");
    }
    return fisher_exact_2x2(cells[0][0], cells[0][1], cells[1][0], cells[1][1]);
}

Cells parse_cells(std::string_view text) {
    Cells cells;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::vector<std::uint64_t> row;
        std::string_view row_text = text.substr(pos, end - pos);
        std::size_t p = 0;
        while (p <= row_text.size()) {
            std::size_t e = row_text.find(',', p);
            if (e == std::string_view::npos) {
                e = row_text.size();
            }
            const std::string cell = trim(row_text.substr(p, e - p));
            std::uint64_t value = 0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw Error("bad table cell '" + cell + "' (expected a nonnegative integer)");
            }
            row.push_back(value);
            p = e + 1;
        }
        cells.push_back(std::move(row));
        pos = end + 1;
    }
    ContingencyTable{{}, {}, cells}.validate();
    return cells;
}

}  // namespace ctxsql::eval
