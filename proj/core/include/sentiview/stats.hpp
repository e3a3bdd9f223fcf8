// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sentiview::stats {

/// Regularized lower incomplete gamma P(a, x). Series for x < a + 1,
/// continued fraction (modified Lentz) otherwise.
[[nodiscard]] double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
[[nodiscard]] double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-squared distribution.
[[nodiscard]] double chi_squared_sf(double x, double dof);

enum class PValueMethod { exact, normal_approximation, chi_squared };

[[nodiscard]] std::string_view to_string(PValueMethod method) noexcept;

struct StatTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    PValueMethod method = PValueMethod::exact;
};

/// 1-based ranks of `values` with tied runs sharing their average rank.
[[nodiscard]] std::vector<double> midranks(std::span<const double> values);

/// Kruskal-Wallis H with tie correction; p from chi-squared with k - 1 dof.
/// Throws Error(invalid_argument) for < 2 groups, an empty group or n < 3,
/// and Error(degenerate) when every observation is tied.
[[nodiscard]] StatTestResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Largest group size for which the exact rank-sum distribution is used.
inline constexpr std::size_t kExactRankSumLimit = 10;

/// Mann-Whitney rank-sum test; the statistic is U for `a`. Two-sided p.
/// Exact when both groups have <= 10 observations and there are no ties;
/// normal approximation with tie-corrected variance and continuity
/// correction otherwise. When every observation is tied the permutation
/// distribution is a single point and the exact p is 1.
[[nodiscard]] StatTestResult rank_sum_test(std::span<const double> a, std::span<const double> b);

/// Number of arrangements of sizes (n_a, n_b) yielding each U in 0..n_a*n_b.
[[nodiscard]] std::vector<double> rank_sum_null_counts(std::size_t n_a, std::size_t n_b);

/// alpha / comparisons. Throws Error(invalid_argument) outside 0 < alpha < 1
/// or for comparisons < 1.
[[nodiscard]] double bonferroni_threshold(double alpha, int comparisons);

}  // namespace sentiview::stats
