// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentiview/corpus.hpp"
#include "sentiview/facets.hpp"
#include "sentiview/index.hpp"
#include "sentiview/session.hpp"

namespace sentiview {

inline constexpr std::size_t kDefaultBinCount = 20;

struct ServiceConfig {
    Bm25Params bm25;
    std::size_t bin_count = kDefaultBinCount;
};

struct SearchHit {
    std::string doc_id;
    std::string title;
    std::string abstract;
    double positivity = 0.0;
    double negativity = 0.0;
    std::string display_category;
    double bm25_score = 0.0;
    std::size_t rank = 0;
    bool in_focus = true;
};

struct SearchResponse {
    std::size_t total_matches = 0;
    std::vector<SearchHit> hits;
    SentimentRect active_rect;
    /// Over every returned hit, focused or not; absent when there are none.
    std::optional<DistributionSummary> distributions;
};

/// Rank, then partition by `rect`. `limit` is clamped to 200.
[[nodiscard]] SearchResponse run_search(const Corpus& corpus, const InvertedIndex& index, std::string_view query,
                                        const SentimentRect& rect, std::size_t limit, const ServiceConfig& config);

[[nodiscard]] nlohmann::ordered_json to_json(const SentimentRect& rect);
[[nodiscard]] nlohmann::ordered_json to_json(const DistributionSummary& summary);
[[nodiscard]] nlohmann::ordered_json to_json(const SearchResponse& response);

struct Response {
    int status = 200;
    std::string body;
};

/// Transport-independent request handlers. Searches are read-only and run
/// concurrently; event writes serialize through the single EventLogFile.
class SearchService {
  public:
    SearchService(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const InvertedIndex> index,
                  const std::filesystem::path& log_path, ServiceConfig config = {});

    /// Query parameters: q, pos_min, pos_max, neg_min, neg_max, limit.
    [[nodiscard]] Response handle_search(const std::map<std::string, std::string>& params) const;
    [[nodiscard]] Response handle_search(std::string_view query, const std::optional<SentimentRect>& rect,
                                         std::optional<long long> limit) const;
    [[nodiscard]] Response handle_event(std::string_view body);
    [[nodiscard]] Response handle_report(std::string_view kind) const;
    [[nodiscard]] Response handle_corpus_stats() const;

  private:
    std::shared_ptr<const Corpus> m_corpus;
    std::shared_ptr<const InvertedIndex> m_index;
    ServiceConfig m_config;
    std::unique_ptr<EventLogFile> m_log;
};

/// Binds SearchService to HTTP routes:
///   GET /search, POST /events, GET /report/{treatment,taxonomy}, GET /corpus/stats
class HttpServer {
  public:
    explicit HttpServer(SearchService& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds (port 0 picks a free port) and returns the bound port.
    /// Throws Error(io) if binding fails.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void serve();
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

}  // namespace sentiview
