// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "sentiview/error.hpp"

namespace sentiview {

namespace {

using MetricValue = std::function<std::optional<double>(const SessionMetrics&)>;

struct MetricSpec {
    std::string_view label;
    MetricValue value;
};

const std::vector<MetricSpec>& treatment_metrics()
{
    static const std::vector<MetricSpec> specs{
        {kQueryCountRow, [](const SessionMetrics& m) { return std::optional<double>(m.query_count); }},
        {kTaskTimeRow, [](const SessionMetrics& m) { return std::optional<double>(m.task_time_s); }},
        {kPerceivedTimeRow, [](const SessionMetrics& m) { return m.perceived_time_s; }},
        {kEngagementRow,
         [](const SessionMetrics& m) -> std::optional<double> {
             if (!m.perceived_time_s) {
                 return std::nullopt;
             }
             return m.task_time_s - *m.perceived_time_s;
         }},
        {kAestheticsRow,
         [](const SessionMetrics& m) -> std::optional<double> {
             if (!m.aesthetics_total) {
                 return std::nullopt;
             }
             return static_cast<double>(*m.aesthetics_total);
         }},
    };
    return specs;
}

double mean_of(std::span<const double> values)
{
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

nlohmann::ordered_json test_json(const std::optional<stats::StatTestResult>& test, const std::string& error,
                                 const char* statistic_key)
{
    nlohmann::ordered_json out;
    if (test) {
        out[statistic_key] = test->statistic;
        out["p"] = test->p_value;
        out["method"] = stats::to_string(test->method);
    } else {
        out["error"] = error;
    }
    return out;
}

std::string pair_label(Treatment first, Treatment second)
{
    return fmt::format("{}-{}", to_string(first), to_string(second));
}

}  // namespace

double cognitive_engagement(double task_time_s, double perceived_time_s)
{
    if (!(task_time_s > 0.0) || !(perceived_time_s > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("task and perceived time must be positive (got {}, {})", task_time_s,
                                perceived_time_s));
    }
    return task_time_s - perceived_time_s;
}

double exploration_score(double total_task_time_s, std::size_t total_queries)
{
    if (!(total_task_time_s > 0.0) || total_queries == 0) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("exploration score undefined for time {} and {} queries", total_task_time_s,
                                total_queries));
    }
    return std::sqrt(total_task_time_s * static_cast<double>(total_queries));
}

std::string_view to_string(UserClass user_class) noexcept
{
    return user_class == UserClass::achiever ? "achiever" : "explorer";
}

std::vector<UserClassification> classify_users(std::span<const UserScore> scores)
{
    if (scores.size() < 2) {
        throw Error(ErrorCode::insufficient_users,
                    fmt::format("classification needs at least 2 users (got {})", scores.size()));
    }
    std::vector<UserScore> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), [](const UserScore& l, const UserScore& r) {
        if (l.score != r.score) {
            return l.score < r.score;
        }
        return l.user_id < r.user_id;
    });
    const std::size_t achievers = sorted.size() / 2;
    std::vector<UserClassification> out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.push_back({sorted[i].user_id, sorted[i].score, i < achievers ? UserClass::achiever : UserClass::explorer});
    }
    return out;
}

ScoredUsers score_users(std::span<const SessionMetrics> metrics)
{
    std::map<std::string, std::pair<double, std::size_t>> totals;
    for (const auto& m : metrics) {
        auto& [time, queries] = totals[m.user_id];
        time += m.task_time_s;
        queries += m.query_count;
    }
    ScoredUsers out;
    for (const auto& [user, total] : totals) {
        if (total.first > 0.0 && total.second > 0) {
            out.scores.push_back({user, exploration_score(total.first, total.second)});
        } else {
            out.unscored.push_back(user);
        }
    }
    return out;
}

TreatmentReport build_treatment_report(std::span<const SessionMetrics> metrics, double alpha)
{
    if (metrics.empty()) {
        throw Error(ErrorCode::no_data, "no complete sessions");
    }
    TreatmentReport report;
    report.alpha = alpha;
    std::set<std::string> users;
    std::set<Treatment> present;
    for (const auto& m : metrics) {
        users.insert(m.user_id);
        present.insert(m.treatment);
    }
    report.users = users.size();
    report.treatments.assign(present.begin(), present.end());
    if (report.treatments.size() < 2) {
        throw Error(ErrorCode::insufficient_users,
                    fmt::format("treatment comparison needs at least 2 treatments (got {})", report.treatments.size()));
    }
    std::vector<std::pair<Treatment, Treatment>> pairs;
    for (std::size_t i = 0; i < report.treatments.size(); ++i) {
        for (std::size_t j = i + 1; j < report.treatments.size(); ++j) {
            pairs.emplace_back(report.treatments[i], report.treatments[j]);
        }
    }
    report.bonferroni_threshold = stats::bonferroni_threshold(alpha, static_cast<int>(pairs.size()));

    for (const auto& spec : treatment_metrics()) {
        TreatmentRow row;
        row.metric = std::string(spec.label);
        std::map<Treatment, std::vector<double>> groups;
        for (auto t : report.treatments) {
            groups[t];
        }
        for (const auto& m : metrics) {
            if (auto v = spec.value(m)) {
                groups[m.treatment].push_back(*v);
            }
        }
        std::vector<std::vector<double>> samples;
        std::vector<Treatment> missing;
        for (const auto& [t, values] : groups) {
            row.counts[t] = values.size();
            if (values.empty()) {
                missing.push_back(t);
                continue;
            }
            row.means[t] = mean_of(values);
            samples.push_back(values);
        }
        if (!missing.empty()) {
            std::string names;
            for (auto t : missing) {
                names += (names.empty() ? "" : ", ") + std::string(to_string(t));
            }
            row.error = fmt::format("no users for {}", names);
        } else {
            try {
                row.omnibus = stats::kruskal_wallis(samples);
            } catch (const Error& e) {
                row.error = e.what();
            }
        }
        for (const auto& [first, second] : pairs) {
            PairwiseComparison cmp{first, second, std::nullopt, {}, false};
            const auto& a = groups[first];
            const auto& b = groups[second];
            if (a.empty() || b.empty()) {
                cmp.error = "no data";
            } else {
                cmp.test = stats::rank_sum_test(a, b);
                cmp.significant = cmp.test->p_value < report.bonferroni_threshold;
            }
            row.posthoc.push_back(std::move(cmp));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

TaxonomyReport build_taxonomy_report(std::span<const SessionMetrics> metrics,
                                     std::span<const UserClassification> classifications)
{
    TaxonomyReport report;
    report.classifications.assign(classifications.begin(), classifications.end());
    std::map<std::string, UserClass> class_of;
    std::size_t achiever_count = 0;
    for (const auto& c : classifications) {
        class_of[c.user_id] = c.user_class;
        achiever_count += c.user_class == UserClass::achiever ? 1 : 0;
    }
    if (achiever_count == 0 || achiever_count == classifications.size()) {
        throw Error(ErrorCode::insufficient_users, "taxonomy needs at least one achiever and one explorer");
    }

    struct UserTotals {
        double time = 0.0;
        double queries = 0.0;
    };
    std::map<std::string, UserTotals> totals;
    for (const auto& m : metrics) {
        if (!class_of.contains(m.user_id)) {
            continue;
        }
        totals[m.user_id].time += m.task_time_s;
        totals[m.user_id].queries += static_cast<double>(m.query_count);
    }

    auto make_row = [&](std::string label, const std::map<std::string, double>& per_user) {
        TaxonomyRow row;
        row.label = std::move(label);
        std::vector<double> achievers;
        std::vector<double> explorers;
        for (const auto& [user, value] : per_user) {
            (class_of.at(user) == UserClass::achiever ? achievers : explorers).push_back(value);
        }
        row.achievers = achievers.size();
        row.explorers = explorers.size();
        if (!achievers.empty()) {
            row.achiever_mean = mean_of(achievers);
        }
        if (!explorers.empty()) {
            row.explorer_mean = mean_of(explorers);
        }
        if (achievers.empty() || explorers.empty()) {
            row.error = achievers.empty() ? "no achievers with data" : "no explorers with data";
        } else {
            row.test = stats::rank_sum_test(achievers, explorers);
        }
        report.rows.push_back(std::move(row));
    };

    std::map<std::string, double> total_queries;
    std::map<std::string, double> total_time;
    for (const auto& [user, t] : totals) {
        total_queries[user] = t.queries;
        total_time[user] = t.time;
    }
    make_row(std::string(kTotalQueriesRow), total_queries);
    make_row(std::string(kTotalTimeRow), total_time);

    auto per_treatment = [&](std::string_view prefix, const MetricValue& value) {
        for (auto t : kTreatments) {
            std::map<std::string, double> per_user;
            for (const auto& m : metrics) {
                if (m.treatment != t || !class_of.contains(m.user_id)) {
                    continue;
                }
                if (auto v = value(m)) {
                    per_user[m.user_id] = *v;
                }
            }
            make_row(fmt::format("{} {}", prefix, to_string(t)), per_user);
        }
    };
    const auto& specs = treatment_metrics();
    per_treatment("Queries", specs[0].value);
    per_treatment("Task Time", specs[1].value);
    per_treatment("Perceived Time", specs[2].value);
    per_treatment("C. Engagement", specs[3].value);
    return report;
}

TaxonomyReport build_taxonomy_report(std::span<const SessionMetrics> metrics)
{
    if (metrics.empty()) {
        throw Error(ErrorCode::no_data, "no complete sessions");
    }
    auto scored = score_users(metrics);
    auto classes = classify_users(scored.scores);
    auto report = build_taxonomy_report(metrics, classes);
    report.unclassified = std::move(scored.unscored);
    return report;
}

nlohmann::ordered_json to_json(const TreatmentReport& report)
{
    nlohmann::ordered_json out;
    out["kind"] = "treatment";
    out["users"] = report.users;
    auto& treatments = out["treatments"] = nlohmann::ordered_json::array();
    for (auto t : report.treatments) {
        treatments.push_back(to_string(t));
    }
    out["alpha"] = report.alpha;
    out["bonferroni_threshold"] = report.bonferroni_threshold;
    auto& rows = out["rows"] = nlohmann::ordered_json::object();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        auto means = nlohmann::ordered_json::object();
        auto counts = nlohmann::ordered_json::object();
        for (auto t : report.treatments) {
            auto key = std::string(to_string(t));
            auto it = row.means.find(t);
            means[key] = it == row.means.end() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(it->second);
            counts[key] = row.counts.count(t) ? row.counts.at(t) : 0;
        }
        r["means"] = std::move(means);
        r["n"] = std::move(counts);
        r["kruskal_wallis"] = test_json(row.omnibus, row.error, "K");
        auto& posthoc = r["posthoc"] = nlohmann::ordered_json::object();
        for (const auto& cmp : row.posthoc) {
            auto entry = test_json(cmp.test, cmp.error, "U");
            entry["significant"] = cmp.significant;
            posthoc[pair_label(cmp.first, cmp.second)] = std::move(entry);
        }
        rows[row.metric] = std::move(r);
    }
    return out;
}

nlohmann::ordered_json to_json(const TaxonomyReport& report)
{
    nlohmann::ordered_json out;
    out["kind"] = "taxonomy";
    std::size_t achievers = 0;
    auto users = nlohmann::ordered_json::array();
    for (const auto& c : report.classifications) {
        achievers += c.user_class == UserClass::achiever ? 1 : 0;
        nlohmann::ordered_json u;
        u["user_id"] = c.user_id;
        u["exploration_score"] = c.exploration_score;
        u["class"] = to_string(c.user_class);
        users.push_back(std::move(u));
    }
    out["achievers"] = achievers;
    out["explorers"] = report.classifications.size() - achievers;
    out["users"] = std::move(users);
    out["unclassified"] = report.unclassified;
    auto& rows = out["rows"] = nlohmann::ordered_json::object();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["achiever_mean"] = row.achiever_mean ? nlohmann::ordered_json(*row.achiever_mean) : nlohmann::ordered_json(nullptr);
        r["explorer_mean"] = row.explorer_mean ? nlohmann::ordered_json(*row.explorer_mean) : nlohmann::ordered_json(nullptr);
        r["n_achievers"] = row.achievers;
        r["n_explorers"] = row.explorers;
        if (row.test) {
            r["U"] = row.test->statistic;
            r["p"] = row.test->p_value;
            r["method"] = stats::to_string(row.test->method);
        } else {
            r["error"] = row.error;
        }
        rows[row.label] = std::move(r);
    }
    return out;
}

ReportKind parse_report_kind(std::string_view text)
{
    if (text == "treatment") {
        return ReportKind::treatment;
    }
    if (text == "taxonomy") {
        return ReportKind::taxonomy;
    }
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown report kind \"{}\"", text));
}

std::string render_report(ReportKind kind, std::span<const SessionMetrics> metrics)
{
    if (metrics.empty()) {
        throw Error(ErrorCode::no_data, "no complete streams");
    }
    auto doc = kind == ReportKind::treatment ? to_json(build_treatment_report(metrics))
                                             : to_json(build_taxonomy_report(metrics));
    return doc.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace sentiview
