// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sentiview/analytics.hpp"
#include "sentiview/corpus.hpp"
#include "sentiview/error.hpp"
#include "sentiview/facets.hpp"
#include "sentiview/index.hpp"
#include "sentiview/service.hpp"
#include "sentiview/session.hpp"

namespace sentiview::cli {

namespace {

struct CorpusOptions {
    std::string corpus_path;
    std::string category_map_path;
    std::string index_cache_path;
};

struct Options {
    CorpusOptions corpus;
    std::string log_path;
    Bm25Params bm25;
    std::size_t bin_count = kDefaultBinCount;
    std::string listen_address = "127.0.0.1:8080";

    std::string query;
    std::vector<std::string> query_words;
    double pos_min = kSentimentMin;
    double pos_max = kSentimentMax;
    double neg_min = kSentimentMin;
    double neg_max = kSentimentMax;
    std::size_t limit = kMaxResults;
    bool json = false;

    std::string report_kind;
};

/// Invalid operator input that CLI11 cannot catch on its own (exit 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_corpus_options(CLI::App& cmd, CorpusOptions& opts)
{
    cmd.add_option("--corpus", opts.corpus_path, "Line-delimited corpus file")->required();
    cmd.add_option("--category-map", opts.category_map_path, "raw_label<TAB>display_label file");
    cmd.add_option("--index-cache", opts.index_cache_path, "Index cache file (default: <corpus>.idx)");
}

void add_bm25_options(CLI::App& cmd, Options& opts)
{
    cmd.add_option("--k1", opts.bm25.k1, "BM25 term-frequency saturation")->capture_default_str();
    cmd.add_option("--b", opts.bm25.b, "BM25 length normalization")->capture_default_str();
}

void add_bins_option(CLI::App& cmd, Options& opts)
{
    cmd.add_option("--bins", opts.bin_count, "Histogram bins over [1, 5]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

std::filesystem::path cache_path(const CorpusOptions& opts)
{
    return opts.index_cache_path.empty() ? std::filesystem::path(opts.corpus_path + ".idx")
                                         : std::filesystem::path(opts.index_cache_path);
}

LoadedCorpus load(const CorpusOptions& opts, std::ostream& err)
{
    std::optional<std::filesystem::path> map_path;
    if (!opts.category_map_path.empty()) {
        map_path = opts.category_map_path;
    }
    auto loaded = load_corpus(opts.corpus_path, map_path);
    for (const auto& rejection : loaded.report.rejected) {
        std::string reasons;
        for (const auto& r : rejection.reasons) {
            reasons += (reasons.empty() ? "" : "; ") + r;
        }
        fmt::print(err, "{}:{}: rejected: {}\n", opts.corpus_path, rejection.line, reasons);
    }
    return loaded;
}

InvertedIndex load_or_build_index(const CorpusOptions& opts, const Corpus& corpus)
{
    auto path = cache_path(opts);
    if (std::ifstream in(path, std::ios::binary); in) {
        if (auto cached = InvertedIndex::load(in, file_fingerprint(opts.corpus_path))) {
            return std::move(*cached);
        }
    }
    return InvertedIndex::build(corpus);
}

void print_attribute(std::ostream& out, std::string_view name, const AttributeSummary& summary)
{
    fmt::print(out, "{}: {:.2f} ± {:.2f}\n", name, summary.mean, summary.stddev);
    const auto& hist = summary.histogram;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        bool last = i + 1 == hist.counts.size();
        fmt::print(out, "  [{:.2f}, {:.2f}{} {}\n", hist.edges[i], hist.edges[i + 1], last ? "]" : ")",
                   hist.counts[i]);
    }
}

int cmd_index(const Options& opts, std::ostream& out, std::ostream& err)
{
    auto loaded = load(opts.corpus, err);
    const auto& corpus = loaded.corpus;
    auto index = InvertedIndex::build(corpus);
    auto path = cache_path(opts.corpus);
    {
        std::ofstream cache(path, std::ios::binary | std::ios::trunc);
        if (!cache) {
            throw Error(ErrorCode::io, fmt::format("cannot write index cache {}", path.string()));
        }
        index.save(cache, file_fingerprint(opts.corpus.corpus_path));
    }
    auto summary = distribution_summary(corpus, opts.bin_count);
    fmt::print(out, "{} documents\n", corpus.size());
    if (!loaded.report.rejected.empty()) {
        fmt::print(out, "{} lines rejected\n", loaded.report.rejected.size());
    }
    fmt::print(out, "{} terms\n", index.vocabulary().size());
    print_attribute(out, "positivity", summary.positivity);
    print_attribute(out, "negativity", summary.negativity);
    return kOk;
}

int cmd_query(const Options& opts, std::ostream& out, std::ostream& err)
{
    SentimentRect rect;
    try {
        rect = SentimentRect::make(opts.pos_min, opts.pos_max, opts.neg_min, opts.neg_max);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    auto loaded = load(opts.corpus, err);
    auto index = load_or_build_index(opts.corpus, loaded.corpus);
    ServiceConfig config{opts.bm25, opts.bin_count};

    std::string query = opts.query;
    for (const auto& word : opts.query_words) {
        query += (query.empty() ? "" : " ") + word;
    }
    auto response = run_search(loaded.corpus, index, query, rect, opts.limit, config);
    if (opts.json) {
        out << to_json(response).dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
        return kOk;
    }
    fmt::print(out, "{} results ({} matching)\n", response.hits.size(), response.total_matches);
    if (response.hits.empty()) {
        return kOk;
    }
    fmt::print(out, "{:>4}  {:<24}  {:>9}  {:>5}  {:>5}  {:<16}  {}\n", "rank", "doc_id", "score", "pos", "neg",
               "category", "focus");
    for (const auto& hit : response.hits) {
        fmt::print(out, "{:>4}  {:<24}  {:>9.4f}  {:>5.2f}  {:>5.2f}  {:<16}  {}\n", hit.rank, hit.doc_id,
                   hit.bm25_score, hit.positivity, hit.negativity, hit.display_category,
                   hit.in_focus ? "in" : "out");
    }
    return kOk;
}

int cmd_report(const Options& opts, std::ostream& out, std::ostream& err)
{
    auto kind = parse_report_kind(opts.report_kind);
    auto replay = replay_log(opts.log_path);
    for (const auto& stream : replay.incomplete) {
        fmt::print(err, "incomplete stream ({}): {}\n", describe(stream.key), stream.reason);
    }
    if (replay.metrics.empty()) {
        throw Error(ErrorCode::no_data, "no complete streams");
    }
    out << render_report(kind, replay.metrics);
    return kOk;
}

std::pair<std::string, int> split_listen(const std::string& address)
{
    auto colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw UsageError(fmt::format("--listen expects host:port (got \"{}\")", address));
    }
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError(fmt::format("bad port in \"{}\"", address));
    }
    if (port < 0 || port > 65535) {
        throw UsageError(fmt::format("port out of range in \"{}\"", address));
    }
    return {address.substr(0, colon), port};
}

int cmd_serve(const Options& opts, std::ostream& out, std::ostream& err)
{
    auto [host, port] = split_listen(opts.listen_address);
    auto loaded = load(opts.corpus, err);
    auto corpus = std::make_shared<const Corpus>(std::move(loaded.corpus));
    auto index = std::make_shared<const InvertedIndex>(load_or_build_index(opts.corpus, *corpus));
    SearchService service(corpus, index, opts.log_path, ServiceConfig{opts.bm25, opts.bin_count});
    HttpServer server(service);

    // SIGINT/SIGTERM are consumed by a waiter thread; worker threads inherit the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    int bound = server.bind(host, port);
    fmt::print(out, "listening on {}:{}\n", host, bound);
    out.flush();

    std::thread waiter([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.serve();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return kOk;
}

}  // namespace

std::uint64_t file_fingerprint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, fmt::format("cannot open {}", path.string()));
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[1 << 16];
    while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options opts;
    CLI::App app{"Sentiment-faceted exploratory search: indexing, querying, serving and study reports", "sentiview"};
    app.set_config("--config", "", "Optional TOML/INI config file; command-line flags win");
    app.require_subcommand(1);

    auto* index_cmd = app.add_subcommand("index", "Build the index cache and print corpus sentiment statistics");
    add_corpus_options(*index_cmd, opts.corpus);
    add_bins_option(*index_cmd, opts);

    auto* query_cmd = app.add_subcommand("query", "Run a ranked query with an optional sentiment rectangle");
    add_corpus_options(*query_cmd, opts.corpus);
    add_bm25_options(*query_cmd, opts);
    add_bins_option(*query_cmd, opts);
    query_cmd->add_option("query", opts.query_words, "Query text")->required();
    query_cmd->add_option("--pos-min", opts.pos_min)->capture_default_str();
    query_cmd->add_option("--pos-max", opts.pos_max)->capture_default_str();
    query_cmd->add_option("--neg-min", opts.neg_min)->capture_default_str();
    query_cmd->add_option("--neg-max", opts.neg_max)->capture_default_str();
    query_cmd->add_option("--limit", opts.limit, "Maximum hits (clamped to 200)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    query_cmd->add_flag("--json", opts.json, "Print the search response document");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    add_corpus_options(*serve_cmd, opts.corpus);
    add_bm25_options(*serve_cmd, opts);
    add_bins_option(*serve_cmd, opts);
    serve_cmd->add_option("--log", opts.log_path, "Append-only session event log")->required();
    serve_cmd->add_option("--listen", opts.listen_address, "host:port (port 0 picks a free one)")
        ->capture_default_str();

    auto* report_cmd = app.add_subcommand("report", "Replay a session log and print a study report");
    report_cmd->add_option("kind", opts.report_kind, "treatment | taxonomy")
        ->required()
        ->check(CLI::IsMember({"treatment", "taxonomy"}));
    report_cmd->add_option("--log", opts.log_path, "Session event log")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        opts.bm25.validate();
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    }

    try {
        if (index_cmd->parsed()) {
            return cmd_index(opts, out, err);
        }
        if (query_cmd->parsed()) {
            return cmd_query(opts, out, err);
        }
        if (serve_cmd->parsed()) {
            return cmd_serve(opts, out, err);
        }
        return cmd_report(opts, out, err);
    } catch (const UsageError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
}

}  // namespace sentiview::cli
