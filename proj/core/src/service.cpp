// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "sentiview/analytics.hpp"
#include "sentiview/error.hpp"

namespace sentiview {

namespace {

nlohmann::ordered_json attribute_json(const AttributeSummary& s)
{
    nlohmann::ordered_json out;
    out["count"] = s.count;
    out["mean"] = s.mean;
    out["stddev"] = s.stddev;
    out["bin_edges"] = s.histogram.edges;
    out["counts"] = s.histogram.counts;
    return out;
}

Response json_response(int status, const nlohmann::ordered_json& body)
{
    return {status, body.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace)};
}

Response error_response(int status, std::string_view code, std::string_view message)
{
    nlohmann::ordered_json body;
    body["error"] = code;
    body["message"] = message;
    return json_response(status, body);
}

int status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::sequencing:
    case ErrorCode::incomplete_task:
    case ErrorCode::no_data:
    case ErrorCode::insufficient_users:
    case ErrorCode::degenerate: return 409;
    case ErrorCode::io: return 500;
    default: return 400;
    }
}

std::optional<double> parse_double(const std::map<std::string, std::string>& params, const char* key)
{
    auto it = params.find(key);
    if (it == params.end()) {
        return std::nullopt;
    }
    const auto& text = it->second;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("{} is not a number: \"{}\"", key, text));
    }
    return value;
}

}  // namespace

SearchResponse run_search(const Corpus& corpus, const InvertedIndex& index, std::string_view query,
                          const SentimentRect& rect, std::size_t limit, const ServiceConfig& config)
{
    limit = std::clamp<std::size_t>(limit, 1, kMaxResults);
    auto ranked = search(query, index, limit, config.bm25);

    std::vector<FacetedHit> faceted;
    faceted.reserve(ranked.hits.size());
    for (auto& hit : ranked.hits) {
        const auto& doc = corpus[hit.ordinal];
        auto ordinal = hit.ordinal;
        faceted.push_back({std::move(hit), doc.positivity, doc.negativity,
                           std::string(corpus.display_category(ordinal))});
    }
    auto partition = partition_by_rect(faceted, rect);

    SearchResponse response;
    response.total_matches = ranked.total_matches;
    response.active_rect = rect;
    if (!faceted.empty()) {
        response.distributions = distribution_summary(faceted, config.bin_count);
    }
    std::vector<bool> focused(faceted.size(), false);
    for (const auto& item : partition.in_focus) {
        focused[item.hit.rank - 1] = true;
    }
    response.hits.reserve(faceted.size());
    for (std::size_t i = 0; i < faceted.size(); ++i) {
        const auto& item = faceted[i];
        const auto& doc = corpus[item.hit.ordinal];
        response.hits.push_back({doc.doc_id, doc.title, doc.abstract, item.positivity, item.negativity,
                                 item.display_category, item.hit.bm25_score, item.hit.rank, focused[i]});
    }
    return response;
}

nlohmann::ordered_json to_json(const SentimentRect& rect)
{
    nlohmann::ordered_json out;
    out["pos_min"] = rect.pos_min;
    out["pos_max"] = rect.pos_max;
    out["neg_min"] = rect.neg_min;
    out["neg_max"] = rect.neg_max;
    return out;
}

nlohmann::ordered_json to_json(const DistributionSummary& summary)
{
    nlohmann::ordered_json out;
    out["positivity"] = attribute_json(summary.positivity);
    out["negativity"] = attribute_json(summary.negativity);
    return out;
}

nlohmann::ordered_json to_json(const SearchResponse& response)
{
    nlohmann::ordered_json out;
    out["total_matches"] = response.total_matches;
    auto& hits = out["hits"] = nlohmann::ordered_json::array();
    for (const auto& h : response.hits) {
        nlohmann::ordered_json hit;
        hit["doc_id"] = h.doc_id;
        hit["title"] = h.title;
        hit["abstract"] = h.abstract;
        hit["positivity"] = h.positivity;
        hit["negativity"] = h.negativity;
        hit["display_category"] = h.display_category;
        hit["bm25_score"] = h.bm25_score;
        hit["rank"] = h.rank;
        hit["in_focus"] = h.in_focus;
        hits.push_back(std::move(hit));
    }
    out["active_rect"] = to_json(response.active_rect);
    out["distributions"] = response.distributions ? to_json(*response.distributions) : nlohmann::ordered_json(nullptr);
    return out;
}

SearchService::SearchService(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const InvertedIndex> index,
                             const std::filesystem::path& log_path, ServiceConfig config)
    : m_corpus(std::move(corpus)),
      m_index(std::move(index)),
      m_config(config),
      m_log(std::make_unique<EventLogFile>(log_path))
{
    m_config.bm25.validate();
    if (m_config.bin_count == 0) {
        throw Error(ErrorCode::invalid_argument, "bin_count must be >= 1");
    }
}

Response SearchService::handle_search(const std::map<std::string, std::string>& params) const
{
    std::optional<SentimentRect> rect;
    std::optional<long long> limit;
    try {
        auto pos_min = parse_double(params, "pos_min");
        auto pos_max = parse_double(params, "pos_max");
        auto neg_min = parse_double(params, "neg_min");
        auto neg_max = parse_double(params, "neg_max");
        if (pos_min || pos_max || neg_min || neg_max) {
            rect = SentimentRect::make(pos_min.value_or(kSentimentMin), pos_max.value_or(kSentimentMax),
                                       neg_min.value_or(kSentimentMin), neg_max.value_or(kSentimentMax));
        }
    } catch (const Error& e) {
        return error_response(400, "invalid_rect", e.what());
    }
    if (auto it = params.find("limit"); it != params.end()) {
        long long value = 0;
        const auto& text = it->second;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            return error_response(400, "invalid_limit", fmt::format("limit is not an integer: \"{}\"", text));
        }
        limit = value;
    }
    auto q = params.find("q");
    return handle_search(q == params.end() ? std::string_view{} : std::string_view(q->second), rect, limit);
}

Response SearchService::handle_search(std::string_view query, const std::optional<SentimentRect>& rect,
                                      std::optional<long long> limit) const
{
    if (limit && *limit < 1) {
        return error_response(400, "invalid_limit", "limit must be >= 1");
    }
    auto effective_limit = limit ? static_cast<std::size_t>(std::min<long long>(*limit, kMaxResults)) : kMaxResults;
    try {
        auto response = run_search(*m_corpus, *m_index, query, rect.value_or(SentimentRect::full()), effective_limit,
                                   m_config);
        return json_response(200, to_json(response));
    } catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    }
}

Response SearchService::handle_event(std::string_view body)
{
    auto record = nlohmann::json::parse(body, nullptr, false);
    if (record.is_discarded()) {
        return error_response(400, "bad_event", "body is not a structured event record");
    }
    try {
        auto event = event_from_json(record);
        m_log->append(event);
    } catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    }
    nlohmann::ordered_json ack;
    ack["status"] = "ok";
    return json_response(200, ack);
}

Response SearchService::handle_report(std::string_view kind) const
{
    try {
        auto report_kind = parse_report_kind(kind);
        auto summary = summarize_sessions(m_log->snapshot());
        if (summary.metrics.empty()) {
            return error_response(409, "no_data", "no complete streams");
        }
        return {200, render_report(report_kind, summary.metrics)};
    } catch (const Error& e) {
        auto status = e.code() == ErrorCode::invalid_argument ? 404 : status_for(e.code());
        return error_response(status, to_string(e.code()), e.what());
    }
}

Response SearchService::handle_corpus_stats() const
{
    auto summary = distribution_summary(*m_corpus, m_config.bin_count);
    nlohmann::ordered_json body;
    body["documents"] = m_corpus->size();
    body["distributions"] = to_json(summary);
    body["categories"] = m_corpus->category_map().palette();
    return json_response(200, body);
}

}  // namespace sentiview
