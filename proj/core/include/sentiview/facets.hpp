// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sentiview/corpus.hpp"
#include "sentiview/index.hpp"

namespace sentiview {

/// Closed axis-aligned rectangle in (positivity, negativity) space. All three
/// filter widgets compile down to one of these.
struct SentimentRect {
    double pos_min = kSentimentMin;
    double pos_max = kSentimentMax;
    double neg_min = kSentimentMin;
    double neg_max = kSentimentMax;

    /// Throws Error(invalid_argument) if a bound leaves [1, 5] or min > max.
    static SentimentRect make(double pos_min, double pos_max, double neg_min, double neg_max);
    static constexpr SentimentRect full() noexcept { return {}; }

    [[nodiscard]] bool is_full() const noexcept { return *this == full(); }

    [[nodiscard]] constexpr bool contains(double positivity, double negativity) const noexcept
    {
        return pos_min <= positivity && positivity <= pos_max && neg_min <= negativity && negativity <= neg_max;
    }

    friend constexpr bool operator==(const SentimentRect&, const SentimentRect&) = default;
};

enum class Axis { positivity, negativity };

/// Baseline widget buttons: equal terciles of [1, 5].
enum class Bucket { low, mid, high, any };

struct FacetedHit {
    RankedHit hit;
    double positivity = kSentimentMin;
    double negativity = kSentimentMin;
    std::string display_category;

    friend bool operator==(const FacetedHit&, const FacetedHit&) = default;
};

struct PartitionedResults {
    std::vector<FacetedHit> in_focus;
    std::vector<FacetedHit> out_of_focus;
};

/// Stable, order-preserving split on the closed-interval predicate.
[[nodiscard]] PartitionedResults partition_by_rect(std::span<const FacetedHit> ranked, const SentimentRect& rect);

/// Replaces one axis's bounds and leaves the other untouched.
[[nodiscard]] SentimentRect axis_brush_to_rect(Axis axis, double lo, double hi, const SentimentRect& current);

[[nodiscard]] SentimentRect bucket_rect(Bucket positivity, Bucket negativity) noexcept;

struct Histogram {
    std::vector<double> edges;  // bin_count + 1 entries, 1.0 .. 5.0
    std::vector<std::size_t> counts;
};

struct AttributeSummary {
    Histogram histogram;
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::size_t count = 0;
};

struct DistributionSummary {
    AttributeSummary positivity;
    AttributeSummary negativity;
};

/// Equal-width bins over [1, 5], right-open except the last.
[[nodiscard]] AttributeSummary summarize_attribute(std::span<const double> values, std::size_t bin_count);

[[nodiscard]] DistributionSummary distribution_summary(std::span<const FacetedHit> hits, std::size_t bin_count);
[[nodiscard]] DistributionSummary distribution_summary(const Corpus& corpus, std::size_t bin_count);

/// Constant per-mark alpha for scatter circles and parallel-coordinate lines.
inline constexpr double kMarkAlpha = 0.25;

/// Effective coverage of `overlap_count` stacked marks drawn at `base_alpha`
/// with source-over compositing: 1 - (1 - base_alpha)^k.
[[nodiscard]] double opacity_for_density(std::size_t overlap_count, double base_alpha = kMarkAlpha);

}  // namespace sentiview
