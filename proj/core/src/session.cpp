// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/session.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fmt/format.h>

#include "sentiview/error.hpp"

namespace sentiview {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad_event(const std::string& message) { throw Error(ErrorCode::bad_event, message); }

const nlohmann::json& require(const nlohmann::json& object, const char* key)
{
    auto it = object.find(key);
    if (it == object.end()) {
        bad_event(fmt::format("missing key {}", key));
    }
    return *it;
}

std::string require_string(const nlohmann::json& object, const char* key)
{
    const auto& value = require(object, key);
    if (!value.is_string()) {
        bad_event(fmt::format("{} must be a string", key));
    }
    return value.get<std::string>();
}

double require_number(const nlohmann::json& object, const char* key)
{
    const auto& value = require(object, key);
    if (!value.is_number()) {
        bad_event(fmt::format("{} must be a number", key));
    }
    return value.get<double>();
}

EventPayload payload_from_json(EventKind kind, const nlohmann::json& payload)
{
    switch (kind) {
    case EventKind::task_start:
    case EventKind::task_end: return std::monostate{};
    case EventKind::query: return QueryPayload{require_string(payload, "text")};
    case EventKind::filter_change:
        return SentimentRect{require_number(payload, "pos_min"), require_number(payload, "pos_max"),
                             require_number(payload, "neg_min"), require_number(payload, "neg_max")};
    case EventKind::result_select: return ResultSelectPayload{require_string(payload, "doc_id")};
    case EventKind::questionnaire: {
        Questionnaire q;
        const auto& answers = require(payload, "aesthetics");
        if (!answers.is_array() || answers.size() != kLikertItems) {
            bad_event(fmt::format("aesthetics must hold exactly {} answers", kLikertItems));
        }
        for (std::size_t i = 0; i < kLikertItems; ++i) {
            if (!answers[i].is_number_integer()) {
                bad_event("aesthetics answers must be integers");
            }
            q.aesthetics[i] = answers[i].get<int>();
        }
        q.perceived_time_s = require_number(payload, "perceived_time_s");
        q.summary = require_string(payload, "summary");
        return q;
    }
    }
    bad_event("unhandled kind");
}

bool payload_matches(EventKind kind, const EventPayload& payload)
{
    switch (kind) {
    case EventKind::task_start:
    case EventKind::task_end: return std::holds_alternative<std::monostate>(payload);
    case EventKind::query: return std::holds_alternative<QueryPayload>(payload);
    case EventKind::filter_change: return std::holds_alternative<SentimentRect>(payload);
    case EventKind::result_select: return std::holds_alternative<ResultSelectPayload>(payload);
    case EventKind::questionnaire: return std::holds_alternative<Questionnaire>(payload);
    }
    return false;
}

StreamKey key_of(const SessionEvent& event) { return {event.user_id, event.treatment, event.task_id}; }

struct StreamTally {
    std::optional<std::int64_t> start_ts;
    std::optional<std::int64_t> end_ts;
    std::size_t queries = 0;
    std::optional<Questionnaire> questionnaire;
};

std::map<StreamKey, StreamTally> tally_streams(std::span<const SessionEvent> events)
{
    std::map<StreamKey, StreamTally> streams;
    for (const auto& event : events) {
        auto& tally = streams[key_of(event)];
        switch (event.kind) {
        case EventKind::task_start: tally.start_ts = event.ts_ms; break;
        case EventKind::task_end: tally.end_ts = event.ts_ms; break;
        case EventKind::query: ++tally.queries; break;
        case EventKind::questionnaire: tally.questionnaire = std::get<Questionnaire>(event.payload); break;
        case EventKind::filter_change:
        case EventKind::result_select: break;
        }
    }
    return streams;
}

// Folds the complete streams of one (user, treatment) pair into metrics.
SessionMetrics aggregate(const std::string& user_id, Treatment treatment,
                         std::span<const StreamTally* const> streams)
{
    SessionMetrics m;
    m.user_id = user_id;
    m.treatment = treatment;
    double perceived = 0.0;
    bool all_perceived = true;
    for (const auto* tally : streams) {
        m.query_count += tally->queries;
        m.task_time_s += static_cast<double>(*tally->end_ts - *tally->start_ts) / 1000.0;
        if (tally->questionnaire) {
            perceived += tally->questionnaire->perceived_time_s;
            const auto& answers = tally->questionnaire->aesthetics;
            m.aesthetics_total = std::accumulate(answers.begin(), answers.end(), 0);
        } else {
            all_perceived = false;
        }
    }
    if (all_perceived) {
        m.perceived_time_s = perceived;
    }
    return m;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, fmt::format("cannot open event log {}", path.string()));
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ParsedLog {
    SessionLog log;
    std::size_t valid_bytes = 0;  // prefix of complete lines
};

ParsedLog parse_log(std::string_view contents, const std::filesystem::path& path)
{
    ParsedLog parsed;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < contents.size()) {
        ++line_no;
        auto newline = contents.find('\n', pos);
        bool terminated = newline != std::string_view::npos;
        auto line = contents.substr(pos, terminated ? newline - pos : std::string_view::npos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            try {
                auto record = nlohmann::json::parse(line);
                parsed.log.record(event_from_json(record));
            } catch (const nlohmann::json::exception& e) {
                if (!terminated) {
                    break;  // torn final write
                }
                throw Error(ErrorCode::data, fmt::format("{}:{}: unparseable event: {}", path.string(), line_no,
                                                         e.what()));
            } catch (const Error& e) {
                if (!terminated) {
                    break;
                }
                throw Error(ErrorCode::data, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
            }
        }
        if (!terminated) {
            break;
        }
        pos = newline + 1;
        parsed.valid_bytes = pos;
    }
    return parsed;
}

}  // namespace

std::string_view to_string(Treatment treatment) noexcept
{
    switch (treatment) {
    case Treatment::BA: return "BA";
    case Treatment::SC: return "SC";
    case Treatment::PC: return "PC";
    }
    return "??";
}

Treatment parse_treatment(std::string_view text)
{
    for (auto t : kTreatments) {
        if (text == to_string(t)) {
            return t;
        }
    }
    bad_event(fmt::format("unknown treatment \"{}\"", text));
}

std::string_view to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::task_start: return "task_start";
    case EventKind::query: return "query";
    case EventKind::filter_change: return "filter_change";
    case EventKind::result_select: return "result_select";
    case EventKind::questionnaire: return "questionnaire";
    case EventKind::task_end: return "task_end";
    }
    return "unknown";
}

EventKind parse_event_kind(std::string_view text)
{
    for (auto kind : {EventKind::task_start, EventKind::query, EventKind::filter_change, EventKind::result_select,
                      EventKind::questionnaire, EventKind::task_end}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw Error(ErrorCode::unknown_kind, fmt::format("unknown event kind \"{}\"", text));
}

SessionEvent SessionEvent::task_start(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                      std::string task_id)
{
    return {ts_ms, std::move(user_id), treatment, std::move(task_id), EventKind::task_start, std::monostate{}};
}

SessionEvent SessionEvent::task_end(std::int64_t ts_ms, std::string user_id, Treatment treatment, std::string task_id)
{
    return {ts_ms, std::move(user_id), treatment, std::move(task_id), EventKind::task_end, std::monostate{}};
}

SessionEvent SessionEvent::query(std::int64_t ts_ms, std::string user_id, Treatment treatment, std::string task_id,
                                 std::string text)
{
    return {ts_ms, std::move(user_id), treatment, std::move(task_id), EventKind::query, QueryPayload{std::move(text)}};
}

SessionEvent SessionEvent::filter_change(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                         std::string task_id, SentimentRect rect)
{
    return {ts_ms, std::move(user_id), treatment, std::move(task_id), EventKind::filter_change, rect};
}

SessionEvent SessionEvent::result_select(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                         std::string task_id, std::string doc_id)
{
    return {ts_ms,     std::move(user_id), treatment, std::move(task_id), EventKind::result_select,
            ResultSelectPayload{std::move(doc_id)}};
}

SessionEvent SessionEvent::questionnaire(std::int64_t ts_ms, std::string user_id, Treatment treatment,
                                         std::string task_id, Questionnaire answers)
{
    return {ts_ms, std::move(user_id), treatment, std::move(task_id), EventKind::questionnaire, std::move(answers)};
}

void validate_event(const SessionEvent& event)
{
    if (event.user_id.empty()) {
        bad_event("user_id empty");
    }
    if (event.task_id.empty()) {
        bad_event("task_id empty");
    }
    if (event.ts_ms < 0) {
        bad_event("ts_ms negative");
    }
    if (!payload_matches(event.kind, event.payload)) {
        bad_event(fmt::format("payload does not match kind {}", to_string(event.kind)));
    }
    if (const auto* rect = std::get_if<SentimentRect>(&event.payload)) {
        try {
            (void)SentimentRect::make(rect->pos_min, rect->pos_max, rect->neg_min, rect->neg_max);
        } catch (const Error& e) {
            bad_event(e.what());
        }
    }
    if (const auto* q = std::get_if<Questionnaire>(&event.payload)) {
        for (int answer : q->aesthetics) {
            if (answer < 1 || answer > 5) {
                bad_event(fmt::format("Likert answer {} outside 1..5", answer));
            }
        }
        if (!(q->perceived_time_s > 0.0) || !std::isfinite(q->perceived_time_s)) {
            bad_event("perceived_time_s must be > 0");
        }
    }
}

nlohmann::ordered_json to_json(const SessionEvent& event)
{
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
    std::visit(overloaded{
                   [](std::monostate) {},
                   [&](const QueryPayload& p) { payload["text"] = p.text; },
                   [&](const SentimentRect& r) {
                       payload["pos_min"] = r.pos_min;
                       payload["pos_max"] = r.pos_max;
                       payload["neg_min"] = r.neg_min;
                       payload["neg_max"] = r.neg_max;
                   },
                   [&](const ResultSelectPayload& p) { payload["doc_id"] = p.doc_id; },
                   [&](const Questionnaire& q) {
                       payload["aesthetics"] = q.aesthetics;
                       payload["perceived_time_s"] = q.perceived_time_s;
                       payload["summary"] = q.summary;
                   },
               },
               event.payload);

    nlohmann::ordered_json record;
    record["ts_ms"] = event.ts_ms;
    record["user_id"] = event.user_id;
    record["treatment"] = to_string(event.treatment);
    record["task_id"] = event.task_id;
    record["kind"] = to_string(event.kind);
    record["payload"] = std::move(payload);
    return record;
}

SessionEvent event_from_json(const nlohmann::json& record)
{
    if (!record.is_object()) {
        bad_event("event must be an object");
    }
    SessionEvent event;
    event.kind = parse_event_kind(require_string(record, "kind"));
    const auto& ts = require(record, "ts_ms");
    if (!ts.is_number_integer()) {
        bad_event("ts_ms must be an integer");
    }
    event.ts_ms = ts.get<std::int64_t>();
    event.user_id = require_string(record, "user_id");
    event.treatment = parse_treatment(require_string(record, "treatment"));
    event.task_id = require_string(record, "task_id");
    const auto& payload = require(record, "payload");
    if (!payload.is_object()) {
        bad_event("payload must be an object");
    }
    event.payload = payload_from_json(event.kind, payload);
    validate_event(event);
    return event;
}

std::string to_log_line(const SessionEvent& event)
{
    return to_json(event).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string describe(const StreamKey& key)
{
    return fmt::format("user={} treatment={} task={}", key.user_id, to_string(key.treatment), key.task_id);
}

void SessionLog::check(const SessionEvent& event) const
{
    validate_event(event);
    auto key = key_of(event);
    auto it = m_streams.find(key);
    auto fail = [&](std::string_view what) {
        throw Error(ErrorCode::sequencing, fmt::format("{} ({})", what, describe(key)));
    };
    if (it == m_streams.end()) {
        if (event.kind != EventKind::task_start) {
            fail(fmt::format("{} before task_start", to_string(event.kind)));
        }
        return;
    }
    const auto& state = it->second;
    if (event.kind == EventKind::task_start) {
        fail("second task_start");
    }
    if (state.ended) {
        fail(fmt::format("{} after task_end", to_string(event.kind)));
    }
    if (event.ts_ms < state.last_ts) {
        fail(fmt::format("timestamp {} precedes {}", event.ts_ms, state.last_ts));
    }
}

void SessionLog::record(const SessionEvent& event)
{
    check(event);
    auto& state = m_streams[key_of(event)];
    state.last_ts = event.ts_ms;
    state.ended = event.kind == EventKind::task_end;
    m_events.push_back(event);
}

void record_event(SessionLog& log, const SessionEvent& event) { log.record(event); }

EventLogFile::EventLogFile(std::filesystem::path path) : m_path(std::move(path))
{
    std::size_t valid_bytes = 0;
    if (std::filesystem::exists(m_path)) {
        auto contents = read_file(m_path);
        auto parsed = parse_log(contents, m_path);
        m_log = std::move(parsed.log);
        valid_bytes = parsed.valid_bytes;
        if (valid_bytes < contents.size()) {
            std::filesystem::resize_file(m_path, valid_bytes);
        }
    }
    m_fd = ::open(m_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (m_fd < 0) {
        throw Error(ErrorCode::io, fmt::format("cannot open event log {}: {}", m_path.string(), std::strerror(errno)));
    }
}

EventLogFile::~EventLogFile()
{
    if (m_fd >= 0) {
        ::close(m_fd);
    }
}

void EventLogFile::append(const SessionEvent& event)
{
    std::lock_guard lock(m_mutex);
    m_log.check(event);
    auto line = to_log_line(event);
    line.push_back('\n');

    struct stat before {};
    ::fstat(m_fd, &before);
    std::size_t written = 0;
    while (written < line.size()) {
        auto n = ::write(m_fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            auto message = fmt::format("write to {} failed: {}", m_path.string(), std::strerror(errno));
            if (::ftruncate(m_fd, before.st_size) != 0) {
                message += " (and rollback failed)";
            }
            throw Error(ErrorCode::io, message);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fdatasync(m_fd) != 0) {
        throw Error(ErrorCode::io, fmt::format("fdatasync {} failed: {}", m_path.string(), std::strerror(errno)));
    }
    m_log.record(event);
}

SessionLog EventLogFile::snapshot() const
{
    std::lock_guard lock(m_mutex);
    return m_log;
}

SessionMetrics compute_session_metrics(const SessionLog& log, std::string_view user_id, Treatment treatment)
{
    auto streams = tally_streams(log.events());
    std::vector<const StreamTally*> matching;
    for (const auto& [key, tally] : streams) {
        if (key.user_id != user_id || key.treatment != treatment) {
            continue;
        }
        if (!tally.end_ts) {
            throw Error(ErrorCode::incomplete_task, fmt::format("incomplete task ({})", describe(key)));
        }
        matching.push_back(&tally);
    }
    if (matching.empty()) {
        throw Error(ErrorCode::no_data,
                    fmt::format("no stream for user={} treatment={}", user_id, to_string(treatment)));
    }
    return aggregate(std::string(user_id), treatment, matching);
}

ReplayResult summarize_sessions(const SessionLog& log)
{
    ReplayResult result;
    result.event_count = log.size();
    auto streams = tally_streams(log.events());

    auto it = streams.begin();
    while (it != streams.end()) {
        const auto& user_id = it->first.user_id;
        auto treatment = it->first.treatment;
        std::vector<const StreamTally*> pair;
        bool complete = true;
        for (; it != streams.end() && it->first.user_id == user_id && it->first.treatment == treatment; ++it) {
            if (!it->second.end_ts) {
                complete = false;
                result.incomplete.push_back({it->first, "missing task_end"});
            }
            pair.push_back(&it->second);
        }
        if (complete) {
            result.metrics.push_back(aggregate(user_id, treatment, pair));
        }
    }
    return result;
}

SessionLog read_log(const std::filesystem::path& path)
{
    auto contents = read_file(path);
    return parse_log(contents, path).log;
}

ReplayResult replay_log(const std::filesystem::path& path) { return summarize_sessions(read_log(path)); }

}  // namespace sentiview
