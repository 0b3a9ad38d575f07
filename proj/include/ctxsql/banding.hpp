#pragma once

#include "ctxsql/sql_features.hpp"
#include "ctxsql/util.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace ctxsql {

enum class ComplexityBand { low, medium, high };

std::string_view band_name(ComplexityBand band) noexcept;

struct BandThresholds {
    double p25 = 0.0;
    double p75 = 0.0;
};

struct Banding {
    std::vector<ComplexityBand> bands;  // parallel to the input scores
    BandThresholds thresholds;
    std::string_view percentile_method = "nearest-rank";

    std::size_t count(ComplexityBand band) const noexcept;
};

struct FiveNumberSummary {
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

/// Nearest-rank percentile: the value at 1-based rank ceil(percent/100 * n)
/// of the sorted input (rank at least 1). `percent` in (0, 100].
double nearest_rank_percentile(std::span<const double> values, unsigned percent);

ComplexityBand band_for(double score, const BandThresholds& thresholds) noexcept;

/// score < p25 -> low, score > p75 -> high, otherwise medium. Throws on
/// empty input.
Banding categorize_scores(std::span<const ComplexityScore> scores);
Banding categorize_values(std::span<const double> values);

/// min, nearest-rank quartiles, conventional median (mean of the middle
/// pair for even n), max.
FiveNumberSummary five_number_summary(std::span<const double> values);

}  // namespace ctxsql
