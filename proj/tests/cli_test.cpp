// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "cli.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "sentiview/analytics.hpp"
#include "sentiview/service.hpp"

using namespace sentiview;
using sentiview::testing::TempDir;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

struct Workspace {
    TempDir dir;
    std::string corpus;

    Workspace() : corpus((dir / "corpus.jsonl").string())
    {
        std::filesystem::copy_file(std::filesystem::path(SENTIVIEW_FIXTURE_DIR) / "three_docs.jsonl", corpus);
    }
};

bool contains(const std::string& haystack, std::string_view needle)
{
    return haystack.find(needle) != std::string::npos;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST(CliIndex, PrintsDocumentCountAndStatistics)
{
    Workspace ws;
    auto r = run({"index", "--corpus", ws.corpus});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "3 documents"));
    EXPECT_TRUE(contains(r.out, "positivity: 3.00 ± 0.00"));
    std::vector<double> negativity{2.0, 4.5, 1.0};
    auto expected = oracle::single_pass(negativity);
    EXPECT_TRUE(contains(r.out, fmt::format("negativity: {:.2f} ± {:.2f}", expected.mean, expected.stddev))) << r.out;
    EXPECT_TRUE(std::filesystem::exists(ws.corpus + ".idx"));

    // A second run reuses the cache and prints the same report.
    auto again = run({"index", "--corpus", ws.corpus});
    EXPECT_EQ(again.out, r.out);
}

TEST(CliIndex, MissingFileNamesThePath)
{
    auto r = run({"index", "--corpus", "/no/such/corpus.jsonl"});
    EXPECT_NE(r.status, 0);
    EXPECT_TRUE(contains(r.err, "/no/such/corpus.jsonl"));
}

TEST(CliIndex, RejectedLinesAreReported)
{
    Workspace ws;
    {
        std::ofstream out(ws.corpus, std::ios::app);
        out << R"({"doc_id":"bad","title":"t","abstract":"","positivity":6.0,"negativity":2,"category":""})" << "\n";
    }
    auto r = run({"index", "--corpus", ws.corpus});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(contains(r.out, "3 documents"));
    EXPECT_TRUE(contains(r.err, "positivity above 5.0"));
}

TEST(CliIndex, StaleCacheIsRebuilt)
{
    Workspace ws;
    ASSERT_EQ(run({"index", "--corpus", ws.corpus}).status, 0);
    {
        std::ofstream out(ws.corpus, std::ios::app);
        out << R"({"doc_id":"d3","title":"war","abstract":"","positivity":5,"negativity":1,"category":"Event"})"
            << "\n";
    }
    auto r = run({"query", "war", "--corpus", ws.corpus});
    EXPECT_TRUE(contains(r.out, "3 results")) << r.out;
}

TEST(CliQuery, RanksD1First)
{
    Workspace ws;
    auto r = run({"query", "war", "--corpus", ws.corpus});
    ASSERT_EQ(r.status, 0) << r.err;
    auto lines = lines_of(r.out);
    ASSERT_GE(lines.size(), 4u);
    EXPECT_EQ(lines[0], "2 results (2 matching)");
    EXPECT_TRUE(contains(lines[2], "d1"));
    EXPECT_TRUE(contains(lines[3], "d0"));
}

TEST(CliQuery, RectExcludingEverythingFlagsEveryRow)
{
    Workspace ws;
    auto r = run({"query", "war", "peace", "--corpus", ws.corpus, "--pos-min", "4.5"});
    ASSERT_EQ(r.status, 0);
    auto lines = lines_of(r.out);
    ASSERT_EQ(lines.size(), 5u);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        EXPECT_TRUE(lines[i].ends_with("out")) << lines[i];
    }
}

TEST(CliQuery, NoMatches)
{
    Workspace ws;
    auto r = run({"query", "zzz", "--corpus", ws.corpus});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.starts_with("0 results"));
}

TEST(CliQuery, JsonMatchesService)
{
    Workspace ws;
    auto r = run({"query", "war", "--corpus", ws.corpus, "--json", "--neg-max", "3"});
    ASSERT_EQ(r.status, 0);
    auto body = nlohmann::json::parse(r.out);
    EXPECT_EQ(body["hits"][0]["doc_id"], "d1");
    EXPECT_FALSE(body["hits"][0]["in_focus"].get<bool>());
    EXPECT_TRUE(body["hits"][1]["in_focus"].get<bool>());
    EXPECT_EQ(body["active_rect"]["neg_max"], 3.0);
}

TEST(CliQuery, UsageErrors)
{
    Workspace ws;
    EXPECT_EQ(run({"query", "war", "--corpus", ws.corpus, "--k1", "-1"}).status, 1);
    EXPECT_EQ(run({"query", "war", "--corpus", ws.corpus, "--b", "2"}).status, 1);
    EXPECT_EQ(run({"query", "war", "--corpus", ws.corpus, "--pos-min", "4", "--pos-max", "2"}).status, 1);
    EXPECT_EQ(run({"query", "--corpus", ws.corpus}).status, 1);
    EXPECT_EQ(run({"frobnicate"}).status, 1);
    EXPECT_EQ(run({}).status, 1);
    EXPECT_EQ(run({"query", "...", "--corpus", ws.corpus}).status, 2);
}

TEST(CliQuery, ReadsOptionsFromConfigFile)
{
    Workspace ws;
    auto config = ws.dir / "sentiview.toml";
    std::ofstream(config) << "[query]\ncorpus = \"" << ws.corpus << "\"\nlimit = 1\n";
    auto r = run({"--config", config.string(), "query", "war"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(r.out.starts_with("1 results (2 matching)")) << r.out;
}

TEST(CliReport, TreatmentMeansMatchTheFixture)
{
    TempDir dir;
    auto log = dir / "log.jsonl";
    sentiview::testing::write_events(log, sentiview::testing::table_fixture_events());
    auto r = run({"report", "treatment", "--log", log.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    auto body = nlohmann::json::parse(r.out);
    EXPECT_NEAR(body["rows"]["Query Count"]["means"]["PC"].get<double>(), 14.15, 0.01);
    EXPECT_NEAR(body["rows"]["Perceived Time"]["means"]["SC"].get<double>(), 761.54, 0.01);
}

TEST(CliReport, FourUsersSplitTwoTwo)
{
    std::vector<SessionEvent> events;
    std::int64_t ts = 0;
    for (int u = 0; u < 4; ++u) {
        std::string user = fmt::format("u{}", u);
        events.push_back(SessionEvent::task_start(ts, user, Treatment::SC, "t"));
        for (int q = 0; q <= u; ++q) {
            events.push_back(SessionEvent::query(ts + q, user, Treatment::SC, "t", "war"));
        }
        ts += 60'000 * (u + 1);
        events.push_back(SessionEvent::task_end(ts, user, Treatment::SC, "t"));
    }
    TempDir dir;
    sentiview::testing::write_events(dir / "log.jsonl", events);
    auto r = run({"report", "taxonomy", "--log", (dir / "log.jsonl").string()});
    ASSERT_EQ(r.status, 0) << r.err;
    auto body = nlohmann::json::parse(r.out);
    EXPECT_EQ(body["achievers"], 2);
    EXPECT_EQ(body["explorers"], 2);
}

TEST(CliReport, EmptyLogFails)
{
    TempDir dir;
    std::ofstream(dir / "log.jsonl").close();
    auto r = run({"report", "treatment", "--log", (dir / "log.jsonl").string()});
    EXPECT_EQ(r.status, 2);
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(run({"report", "summary", "--log", (dir / "log.jsonl").string()}).status, 1);
    EXPECT_EQ(run({"report", "treatment", "--log", (dir / "absent.jsonl").string()}).status, 2);
}

TEST(CliReport, IncompleteStreamsAreListedOnStderr)
{
    auto events = sentiview::testing::table_fixture_events();
    events.pop_back();
    TempDir dir;
    sentiview::testing::write_events(dir / "log.jsonl", events);
    auto r = run({"report", "treatment", "--log", (dir / "log.jsonl").string()});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(contains(r.err, "P13")) << r.err;
}

TEST(CliReport, ByteIdenticalToServiceReport)
{
    Workspace ws;
    auto log = ws.dir / "log.jsonl";
    sentiview::testing::write_events(log, sentiview::testing::table_fixture_events());
    auto loaded = load_corpus(ws.corpus);
    auto corpus = std::make_shared<const Corpus>(std::move(loaded.corpus));
    auto index = std::make_shared<const InvertedIndex>(InvertedIndex::build(*corpus));
    SearchService service(corpus, index, log);
    for (const std::string kind : {"treatment", "taxonomy"}) {
        auto cli_out = run({"report", kind, "--log", log.string()});
        auto http = service.handle_report(kind);
        ASSERT_EQ(http.status, 200);
        EXPECT_EQ(cli_out.out, http.body) << kind;
    }
}
