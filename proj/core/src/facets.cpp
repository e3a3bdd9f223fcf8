// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/facets.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sentiview/error.hpp"

namespace sentiview {

namespace {

bool in_range(double v) { return v >= kSentimentMin && v <= kSentimentMax; }

// Equal terciles of [1, 5].
constexpr double kTercileLow = 7.0 / 3.0;
constexpr double kTercileHigh = 11.0 / 3.0;

std::pair<double, double> bucket_bounds(Bucket bucket) noexcept
{
    switch (bucket) {
    case Bucket::low: return {kSentimentMin, kTercileLow};
    case Bucket::mid: return {kTercileLow, kTercileHigh};
    case Bucket::high: return {kTercileHigh, kSentimentMax};
    case Bucket::any: break;
    }
    return {kSentimentMin, kSentimentMax};
}

}  // namespace

SentimentRect SentimentRect::make(double pos_min, double pos_max, double neg_min, double neg_max)
{
    if (!in_range(pos_min) || !in_range(pos_max) || !in_range(neg_min) || !in_range(neg_max)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("rect bounds must lie in [1, 5]: [{}, {}] x [{}, {}]", pos_min, pos_max, neg_min,
                                neg_max));
    }
    if (pos_min > pos_max || neg_min > neg_max) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("rect min exceeds max: [{}, {}] x [{}, {}]", pos_min, pos_max, neg_min, neg_max));
    }
    return {pos_min, pos_max, neg_min, neg_max};
}

PartitionedResults partition_by_rect(std::span<const FacetedHit> ranked, const SentimentRect& rect)
{
    PartitionedResults out;
    for (const auto& item : ranked) {
        (rect.contains(item.positivity, item.negativity) ? out.in_focus : out.out_of_focus).push_back(item);
    }
    return out;
}

SentimentRect axis_brush_to_rect(Axis axis, double lo, double hi, const SentimentRect& current)
{
    if (lo > hi) {
        throw Error(ErrorCode::invalid_argument, fmt::format("brush range inverted: [{}, {}]", lo, hi));
    }
    if (axis == Axis::positivity) {
        return SentimentRect::make(lo, hi, current.neg_min, current.neg_max);
    }
    return SentimentRect::make(current.pos_min, current.pos_max, lo, hi);
}

SentimentRect bucket_rect(Bucket positivity, Bucket negativity) noexcept
{
    auto [pos_min, pos_max] = bucket_bounds(positivity);
    auto [neg_min, neg_max] = bucket_bounds(negativity);
    return {pos_min, pos_max, neg_min, neg_max};
}

AttributeSummary summarize_attribute(std::span<const double> values, std::size_t bin_count)
{
    if (values.empty()) {
        throw Error(ErrorCode::invalid_argument, "distribution summary of an empty set");
    }
    if (bin_count == 0) {
        throw Error(ErrorCode::invalid_argument, "bin_count must be >= 1");
    }
    AttributeSummary summary;
    auto& hist = summary.histogram;
    hist.edges.resize(bin_count + 1);
    const double span = kSentimentMax - kSentimentMin;
    for (std::size_t i = 0; i <= bin_count; ++i) {
        hist.edges[i] = kSentimentMin + span * static_cast<double>(i) / static_cast<double>(bin_count);
    }
    hist.edges.back() = kSentimentMax;
    hist.counts.assign(bin_count, 0);

    // Welford's update for mean and sum of squared deviations.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        if (!in_range(v)) {
            throw Error(ErrorCode::invalid_argument, fmt::format("sentiment value {} outside [1, 5]", v));
        }
        auto bin = static_cast<std::size_t>((v - kSentimentMin) / span * static_cast<double>(bin_count));
        bin = std::min(bin, bin_count - 1);
        // Snap to the materialized edges so membership agrees with them exactly.
        while (bin > 0 && v < hist.edges[bin]) {
            --bin;
        }
        while (bin + 1 < bin_count && v >= hist.edges[bin + 1]) {
            ++bin;
        }
        ++hist.counts[bin];

        ++n;
        double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    summary.count = n;
    summary.mean = mean;
    summary.stddev = std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));
    return summary;
}

DistributionSummary distribution_summary(std::span<const FacetedHit> hits, std::size_t bin_count)
{
    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(hits.size());
    neg.reserve(hits.size());
    for (const auto& h : hits) {
        pos.push_back(h.positivity);
        neg.push_back(h.negativity);
    }
    return {summarize_attribute(pos, bin_count), summarize_attribute(neg, bin_count)};
}

DistributionSummary distribution_summary(const Corpus& corpus, std::size_t bin_count)
{
    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(corpus.size());
    neg.reserve(corpus.size());
    for (const auto& doc : corpus.documents()) {
        pos.push_back(doc.positivity);
        neg.push_back(doc.negativity);
    }
    return {summarize_attribute(pos, bin_count), summarize_attribute(neg, bin_count)};
}

double opacity_for_density(std::size_t overlap_count, double base_alpha)
{
    if (overlap_count == 0) {
        throw Error(ErrorCode::invalid_argument, "overlap_count must be >= 1");
    }
    if (!(base_alpha > 0.0 && base_alpha <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("base_alpha must lie in (0, 1] (got {})", base_alpha));
    }
    return 1.0 - std::pow(1.0 - base_alpha, static_cast<double>(overlap_count));
}

}  // namespace sentiview
