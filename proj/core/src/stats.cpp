// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "sentiview/error.hpp"

namespace sentiview::stats {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    double denom = a;
    for (int i = 0; i < kMaxIterations; ++i) {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction, modified Lentz evaluation.
double gamma_q_continued_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = b + an / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x)
{
    if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("incomplete gamma needs a > 0 and x >= 0 (a={}, x={})", a, x));
    }
}

struct RankedPool {
    std::vector<double> ranks;
    double tie_term = 0.0;  // sum of t^3 - t over tied runs
};

RankedPool rank_pool(std::span<const double> values)
{
    RankedPool pool;
    pool.ranks.assign(values.size(), 0.0);
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // Positions i..j-1 hold ranks i+1..j; their average is (i + 1 + j) / 2.
        double rank = (static_cast<double>(i) + 1.0 + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            pool.ranks[order[k]] = rank;
        }
        double t = static_cast<double>(j - i);
        pool.tie_term += t * t * t - t;
        i = j;
    }
    return pool;
}

void check_finite(std::span<const double> values)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::invalid_argument, "observations must be finite");
        }
    }
}

}  // namespace

double regularized_gamma_p(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return std::clamp(gamma_p_series(a, x), 0.0, 1.0);
    }
    return std::clamp(1.0 - gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double regularized_gamma_q(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
    }
    return std::clamp(gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double chi_squared_sf(double x, double dof)
{
    if (!(dof > 0.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("chi-squared dof must be > 0 (got {})", dof));
    }
    if (x <= 0.0) {
        return 1.0;
    }
    return regularized_gamma_q(dof / 2.0, x / 2.0);
}

std::string_view to_string(PValueMethod method) noexcept
{
    switch (method) {
    case PValueMethod::exact: return "exact";
    case PValueMethod::normal_approximation: return "normal-approximation";
    case PValueMethod::chi_squared: return "chi-squared";
    }
    return "unknown";
}

std::vector<double> midranks(std::span<const double> values) { return rank_pool(values).ranks; }

StatTestResult kruskal_wallis(std::span<const std::vector<double>> groups)
{
    if (groups.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "Kruskal-Wallis needs at least two groups");
    }
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) {
            throw Error(ErrorCode::invalid_argument, "Kruskal-Wallis group is empty");
        }
        check_finite(g);
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const auto n = static_cast<double>(pooled.size());
    if (pooled.size() < 3) {
        throw Error(ErrorCode::invalid_argument, "Kruskal-Wallis needs at least three observations");
    }
    auto pool = rank_pool(pooled);
    double correction = 1.0 - pool.tie_term / (n * n * n - n);
    if (correction <= 0.0) {
        throw Error(ErrorCode::degenerate, "degenerate: all tied");
    }

    double weighted = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            rank_sum += pool.ranks[offset + i];
        }
        weighted += rank_sum * rank_sum / static_cast<double>(g.size());
        offset += g.size();
    }
    double h = (12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0)) / correction;
    h = std::max(h, 0.0);
    return {h, chi_squared_sf(h, static_cast<double>(groups.size() - 1)), PValueMethod::chi_squared};
}

std::vector<double> rank_sum_null_counts(std::size_t n_a, std::size_t n_b)
{
    // counts[m][n][u]: arrangements of m a's and n b's with U_a = u. The largest
    // element is either an a (beating all n b's) or a b (beating nothing).
    std::vector<std::vector<std::vector<double>>> counts(n_a + 1, std::vector<std::vector<double>>(n_b + 1));
    for (std::size_t m = 0; m <= n_a; ++m) {
        for (std::size_t n = 0; n <= n_b; ++n) {
            auto& cell = counts[m][n];
            cell.assign(m * n + 1, 0.0);
            if (m == 0 || n == 0) {
                cell[0] = 1.0;
                continue;
            }
            const auto& a_largest = counts[m - 1][n];
            const auto& b_largest = counts[m][n - 1];
            for (std::size_t u = 0; u < a_largest.size(); ++u) {
                cell[u + n] += a_largest[u];
            }
            for (std::size_t u = 0; u < b_largest.size(); ++u) {
                cell[u] += b_largest[u];
            }
        }
    }
    return counts[n_a][n_b];
}

StatTestResult rank_sum_test(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::invalid_argument, "rank-sum test needs two non-empty samples");
    }
    check_finite(a);
    check_finite(b);
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto pool = rank_pool(pooled);

    const auto n_a = static_cast<double>(a.size());
    const auto n_b = static_cast<double>(b.size());
    const double n = n_a + n_b;
    double rank_sum_a = std::accumulate(pool.ranks.begin(), pool.ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    double u = rank_sum_a - n_a * (n_a + 1.0) / 2.0;
    double mean_u = n_a * n_b / 2.0;

    if (pool.tie_term == n * n * n - n) {
        return {u, 1.0, PValueMethod::exact};
    }

    if (pool.tie_term == 0.0 && std::max(a.size(), b.size()) <= kExactRankSumLimit) {
        auto counts = rank_sum_null_counts(a.size(), b.size());
        auto observed = static_cast<std::size_t>(std::llround(u));
        double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        double lower = std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(observed) + 1, 0.0);
        double upper = std::accumulate(counts.begin() + static_cast<std::ptrdiff_t>(observed), counts.end(), 0.0);
        double p = std::min(1.0, 2.0 * std::min(lower, upper) / total);
        return {u, p, PValueMethod::exact};
    }

    double variance = n_a * n_b / 12.0 * ((n + 1.0) - pool.tie_term / (n * (n - 1.0)));
    double z = (std::fabs(u - mean_u) - 0.5) / std::sqrt(variance);
    z = std::max(z, 0.0);
    double p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return {u, p, PValueMethod::normal_approximation};
}

double bonferroni_threshold(double alpha, int comparisons)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("alpha must lie in (0, 1) (got {})", alpha));
    }
    if (comparisons < 1) {
        throw Error(ErrorCode::invalid_argument, fmt::format("comparisons must be >= 1 (got {})", comparisons));
    }
    return alpha / static_cast<double>(comparisons);
}

}  // namespace sentiview::stats
