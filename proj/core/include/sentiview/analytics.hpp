// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentiview/session.hpp"
#include "sentiview/stats.hpp"

namespace sentiview {

/// Subjective duration assessment: actual minus perceived time. Positive
/// values mean the task felt shorter than it was.
[[nodiscard]] double cognitive_engagement(double task_time_s, double perceived_time_s);

/// Geometric mean of total task time and total queries issued.
[[nodiscard]] double exploration_score(double total_task_time_s, std::size_t total_queries);

enum class UserClass { achiever, explorer };

[[nodiscard]] std::string_view to_string(UserClass user_class) noexcept;

struct UserScore {
    std::string user_id;
    double score = 0.0;
};

struct UserClassification {
    std::string user_id;
    double exploration_score = 0.0;
    UserClass user_class = UserClass::achiever;

    friend bool operator==(const UserClassification&, const UserClassification&) = default;
};

/// Sorts ascending by score (ties by user_id); the first floor(N/2) users are
/// achievers. Throws Error(insufficient_users) for fewer than two users.
[[nodiscard]] std::vector<UserClassification> classify_users(std::span<const UserScore> scores);

struct ScoredUsers {
    std::vector<UserScore> scores;
    /// Users whose total time or query count is zero.
    std::vector<std::string> unscored;
};

[[nodiscard]] ScoredUsers score_users(std::span<const SessionMetrics> metrics);

struct PairwiseComparison {
    Treatment first = Treatment::BA;
    Treatment second = Treatment::SC;
    std::optional<stats::StatTestResult> test;
    std::string error;
    bool significant = false;
};

struct TreatmentRow {
    std::string metric;
    std::map<Treatment, double> means;
    std::map<Treatment, std::size_t> counts;
    std::optional<stats::StatTestResult> omnibus;
    std::string error;
    std::vector<PairwiseComparison> posthoc;
};

struct TreatmentReport {
    std::vector<Treatment> treatments;
    std::size_t users = 0;
    double alpha = 0.05;
    double bonferroni_threshold = 0.0;
    std::vector<TreatmentRow> rows;
};

struct TaxonomyRow {
    std::string label;
    std::optional<double> achiever_mean;
    std::optional<double> explorer_mean;
    std::size_t achievers = 0;
    std::size_t explorers = 0;
    std::optional<stats::StatTestResult> test;
    std::string error;
};

struct TaxonomyReport {
    std::vector<UserClassification> classifications;
    std::vector<std::string> unclassified;
    std::vector<TaxonomyRow> rows;
};

/// Row labels, in report order.
inline constexpr std::string_view kQueryCountRow = "Query Count";
inline constexpr std::string_view kTaskTimeRow = "Task Time (s)";
inline constexpr std::string_view kPerceivedTimeRow = "Perceived Time";
inline constexpr std::string_view kEngagementRow = "Cognitive Engagement";
inline constexpr std::string_view kAestheticsRow = "Aesthetics";
inline constexpr std::string_view kTotalQueriesRow = "Total Queries";
inline constexpr std::string_view kTotalTimeRow = "Total Time";

/// Per-metric treatment means, Kruskal-Wallis across treatments and every
/// pairwise rank-sum test against the Bonferroni threshold. A metric whose
/// test cannot run carries an error string; the other rows are unaffected.
/// Throws Error(no_data) without metrics and Error(insufficient_users) when
/// fewer than two treatments are present.
[[nodiscard]] TreatmentReport build_treatment_report(std::span<const SessionMetrics> metrics, double alpha = 0.05);

/// Achiever vs explorer means and rank-sum p for the 15 taxonomy rows.
/// Throws Error(insufficient_users) if either class is empty.
[[nodiscard]] TaxonomyReport build_taxonomy_report(std::span<const SessionMetrics> metrics,
                                                   std::span<const UserClassification> classifications);

/// Scores and classifies the users found in `metrics`, then builds the report.
[[nodiscard]] TaxonomyReport build_taxonomy_report(std::span<const SessionMetrics> metrics);

[[nodiscard]] nlohmann::ordered_json to_json(const TreatmentReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const TaxonomyReport& report);

enum class ReportKind { treatment, taxonomy };

/// Throws Error(invalid_argument) for anything but "treatment"/"taxonomy".
[[nodiscard]] ReportKind parse_report_kind(std::string_view text);

/// Serialized report document shared by the CLI and the HTTP service so both
/// emit identical bytes. Throws Error(no_data) when `metrics` is empty.
[[nodiscard]] std::string render_report(ReportKind kind, std::span<const SessionMetrics> metrics);

}  // namespace sentiview
