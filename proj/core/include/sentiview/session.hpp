// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentiview/facets.hpp"

namespace sentiview {

/// Study conditions: text-button baseline, scatter plot, parallel coordinates.
enum class Treatment { BA, SC, PC };

inline constexpr std::array<Treatment, 3> kTreatments{Treatment::BA, Treatment::SC, Treatment::PC};

[[nodiscard]] std::string_view to_string(Treatment treatment) noexcept;
/// Throws Error(bad_event) for anything but "BA", "SC" or "PC".
[[nodiscard]] Treatment parse_treatment(std::string_view text);

enum class EventKind { task_start, query, filter_change, result_select, questionnaire, task_end };

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;
/// Throws Error(unknown_kind).
[[nodiscard]] EventKind parse_event_kind(std::string_view text);

inline constexpr std::size_t kLikertItems = 5;

struct QueryPayload {
    std::string text;
    friend bool operator==(const QueryPayload&, const QueryPayload&) = default;
};

struct ResultSelectPayload {
    std::string doc_id;
    friend bool operator==(const ResultSelectPayload&, const ResultSelectPayload&) = default;
};

struct Questionnaire {
    std::array<int, kLikertItems> aesthetics{};
    double perceived_time_s = 0.0;
    std::string summary;

    friend bool operator==(const Questionnaire&, const Questionnaire&) = default;
};

using EventPayload = std::variant<std::monostate, QueryPayload, SentimentRect, ResultSelectPayload, Questionnaire>;

struct SessionEvent {
    std::int64_t ts_ms = 0;
    std::string user_id;
    Treatment treatment = Treatment::BA;
    std::string task_id;
    EventKind kind = EventKind::task_start;
    EventPayload payload;

    static SessionEvent task_start(std::int64_t ts_ms, std::string user_id, Treatment treatment, std::string task_id);
    static SessionEvent task_end(std::int64_t ts_ms, std::string user_id, Treatment treatment, std::string task_id);
    static SessionEvent query(std::int64_t ts_ms, std::string user_id, Treatment treatment, std::string task_id,
                              std::string text);
    static SessionEvent filter_change(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                      std::string task_id, SentimentRect rect);
    static SessionEvent result_select(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                      std::string task_id, std::string doc_id);
    static SessionEvent questionnaire(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                      std::string task_id, Questionnaire answers);

    friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

/// Throws Error(bad_event) if the kind and payload disagree or a payload
/// field is out of range (Likert answers outside 1..5, perceived time <= 0).
void validate_event(const SessionEvent& event);

/// Wire/log encoding: keys ts_ms, user_id, treatment, task_id, kind, payload.
[[nodiscard]] nlohmann::ordered_json to_json(const SessionEvent& event);
/// Throws Error(unknown_kind) or Error(bad_event).
[[nodiscard]] SessionEvent event_from_json(const nlohmann::json& record);
[[nodiscard]] std::string to_log_line(const SessionEvent& event);

struct StreamKey {
    std::string user_id;
    Treatment treatment = Treatment::BA;
    std::string task_id;

    friend auto operator<=>(const StreamKey&, const StreamKey&) = default;
};

[[nodiscard]] std::string describe(const StreamKey& key);

/// In-memory append-only event log that enforces per-stream sequencing:
/// one task_start first, at most one task_end last, timestamps non-decreasing.
class SessionLog {
  public:
    /// Throws Error(sequencing) naming the stream, or Error(bad_event).
    void record(const SessionEvent& event);
    /// Same checks as record() without appending.
    void check(const SessionEvent& event) const;

    [[nodiscard]] std::span<const SessionEvent> events() const noexcept { return m_events; }
    [[nodiscard]] std::size_t size() const noexcept { return m_events.size(); }

  private:
    struct StreamState {
        bool ended = false;
        std::int64_t last_ts = 0;
    };

    std::vector<SessionEvent> m_events;
    std::map<StreamKey, StreamState> m_streams;
};

void record_event(SessionLog& log, const SessionEvent& event);

/// Durable single-writer log file. Every append is validated against the
/// replayed history, written as one line and flushed to stable storage
/// before append() returns. Reopening an existing file restores sequencing
/// state; a torn final line (no trailing newline) is truncated away.
class EventLogFile {
  public:
    explicit EventLogFile(std::filesystem::path path);
    ~EventLogFile();

    EventLogFile(const EventLogFile&) = delete;
    EventLogFile& operator=(const EventLogFile&) = delete;

    void append(const SessionEvent& event);
    [[nodiscard]] SessionLog snapshot() const;
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return m_path; }

  private:
    std::filesystem::path m_path;
    int m_fd = -1;
    mutable std::mutex m_mutex;
    SessionLog m_log;
};

/// Per-(user, treatment) aggregates. Streams sharing a (user, treatment) pair
/// under different task ids are summed; the latest questionnaire wins.
struct SessionMetrics {
    std::string user_id;
    Treatment treatment = Treatment::BA;
    std::size_t query_count = 0;
    double task_time_s = 0.0;
    std::optional<double> perceived_time_s;
    std::optional<int> aesthetics_total;

    friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

/// Throws Error(incomplete_task) if any matching stream lacks task_end and
/// Error(no_data) if there is no stream for the pair.
[[nodiscard]] SessionMetrics compute_session_metrics(const SessionLog& log, std::string_view user_id,
                                                     Treatment treatment);

struct IncompleteStream {
    StreamKey key;
    std::string reason;
};

struct ReplayResult {
    std::vector<SessionMetrics> metrics;  // sorted by user_id, then treatment
    std::vector<IncompleteStream> incomplete;
    std::size_t event_count = 0;
};

[[nodiscard]] ReplayResult summarize_sessions(const SessionLog& log);

/// Reads and sequence-checks every event. Throws Error(data) with the line
/// number on the first unparseable line. A final unterminated line that
/// fails to parse is a torn write and is skipped.
[[nodiscard]] SessionLog read_log(const std::filesystem::path& path);

[[nodiscard]] ReplayResult replay_log(const std::filesystem::path& path);

}  // namespace sentiview
