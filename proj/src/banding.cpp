#include "ctxsql/banding.hpp"

#include <algorithm>

namespace ctxsql {

std::string_view band_name(ComplexityBand band) noexcept {
    switch (band) {
    case ComplexityBand::low: return "low";
    case ComplexityBand::medium: return "medium";
    case ComplexityBand::high: return "high";
    }
    return "medium";
}

std::size_t Banding::count(ComplexityBand band) const noexcept {
    return static_cast<std::size_t>(std::count(bands.begin(), bands.end(), band));
}

namespace {

double rank_value(const std::vector<double>& sorted, unsigned percent) {
    const std::size_t n = sorted.size();
    // ceil(percent * n / 100) in integers.
    std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

std::vector<double> sorted_copy(std::span<const double> values) {
    if (values.empty()) {
        throw Error("percentile of an empty score list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

}  // namespace

double nearest_rank_percentile(std::span<const double> values, unsigned percent) {
    if (percent == 0 || percent > 100) {
        throw Error("percentile must be in (0, 100]");
    }
    return rank_value(sorted_copy(values), percent);
}

ComplexityBand band_for(double score, const BandThresholds& thresholds) noexcept {
    if (score < thresholds.p25) {
        return ComplexityBand::low;
    }
    if (score > thresholds.p75) {
        return ComplexityBand::high;
    }
    return ComplexityBand::medium;
}

Banding categorize_values(std::span<const double> values) {
    if (values.empty()) {
        throw Error("cannot band an empty score list");
    }
    const auto sorted = sorted_copy(values);
    Banding banding;
    banding.thresholds = BandThresholds{rank_value(sorted, 25), rank_value(sorted, 75)};
    banding.bands.reserve(values.size());
    for (double v : values) {
        banding.bands.push_back(band_for(v, banding.thresholds));
    }
    return banding;
}

Banding categorize_scores(std::span<const ComplexityScore> scores) {
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& s : scores) {
        values.push_back(static_cast<double>(s.value));
    }
    return categorize_values(values);
}

FiveNumberSummary five_number_summary(std::span<const double> values) {
    if (values.empty()) {
        throw Error("cannot summarize an empty score list");
    }
    const auto sorted = sorted_copy(values);
    const std::size_t n = sorted.size();
    const double median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    return FiveNumberSummary{sorted.front(), rank_value(sorted, 25), median, rank_value(sorted, 75), sorted.back()};
}

}  // namespace ctxsql
