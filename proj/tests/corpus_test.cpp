// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "sentiview/corpus.hpp"
#include "sentiview/error.hpp"
#include "sentiview/facets.hpp"

using namespace sentiview;

namespace {

std::string record(std::string_view id, double pos, double neg, std::string_view category = "Event")
{
    return fmt::format(
        R"({{"doc_id":"{}","title":"Title {}","abstract":"text","positivity":{},"negativity":{},"category":"{}"}})", id,
        id, pos, neg, category);
}

bool has(const std::vector<std::string>& list, std::string_view item)
{
    return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

TEST(ValidateDocument, AcceptsWellFormedRecord)
{
    auto raw = nlohmann::json::parse(
        R"({"doc_id":"a","title":"War","abstract":"...","positivity":2.1,"negativity":4.8,"category":"Event"})");
    auto v = validate_document(raw);
    ASSERT_TRUE(v.document);
    EXPECT_TRUE(v.violations.empty());
    EXPECT_EQ(v.document->doc_id, "a");
    EXPECT_DOUBLE_EQ(v.document->positivity, 2.1);
    EXPECT_DOUBLE_EQ(v.document->negativity, 4.8);
}

TEST(ValidateDocument, BoundaryScoresAreInclusive)
{
    auto v = validate_document(nlohmann::json::parse(record("x", 1.0, 5.0)));
    EXPECT_TRUE(v.document);
}

TEST(ValidateDocument, NamesEveryViolation)
{
    auto raw = nlohmann::json::parse(
        R"({"doc_id":"a","title":"","abstract":"","positivity":0.99,"negativity":5.5,"category":""})");
    auto v = validate_document(raw);
    EXPECT_FALSE(v.document);
    EXPECT_EQ(v.violations.size(), 3u);
    EXPECT_TRUE(has(v.violations, "positivity below 1.0"));
    EXPECT_TRUE(has(v.violations, "negativity above 5.0"));
    EXPECT_TRUE(has(v.violations, "title empty"));
}

TEST(ValidateDocument, RejectsMissingAndExtraKeys)
{
    auto v = validate_document(nlohmann::json::parse(R"({"doc_id":"a","title":"t","positivity":2,"negativity":2,
        "category":"","abstract":"","score":1})"));
    EXPECT_TRUE(has(v.violations, "unexpected key score"));
    v = validate_document(nlohmann::json::parse(R"({"doc_id":"a","title":"t"})"));
    EXPECT_TRUE(has(v.violations, "missing key positivity"));
    EXPECT_TRUE(has(v.violations, "missing key category"));
}

TEST(ValidateDocument, RejectsWrongTypes)
{
    auto v = validate_document(nlohmann::json::parse(
        R"({"doc_id":7,"title":"t","abstract":"","positivity":"2","negativity":2,"category":""})"));
    EXPECT_TRUE(has(v.violations, "doc_id not a string"));
    EXPECT_TRUE(has(v.violations, "positivity not a number"));
}

TEST(CategoryMap, MapsKnownLabelsAndFallsBackToOther)
{
    std::vector<std::pair<std::string, std::string>> entries{{"MilitaryConflict", "Event"}};
    auto map = CategoryMap::from_entries(entries);
    EXPECT_EQ(map_category("MilitaryConflict", map), "Event");
    EXPECT_EQ(map_category("UnknownLeafClass", map), "other");
    EXPECT_EQ(map_category("", map), "other");
}

TEST(CategoryMap, PaletteOverflowsIntoOther)
{
    std::vector<std::pair<std::string, std::string>> entries;
    for (int i = 0; i < 30; ++i) {
        entries.emplace_back("raw" + std::to_string(i), "display" + std::to_string(i));
    }
    entries.emplace_back("alias0", "display0");
    auto map = CategoryMap::from_entries(entries);
    EXPECT_EQ(map.palette().size(), CategoryMap::kPaletteSize);
    EXPECT_EQ(map.map("raw23"), "display23");
    EXPECT_EQ(map.map("raw24"), "other");
    EXPECT_EQ(map.map("alias0"), "display0");

    std::set<std::string> distinct;
    for (int i = 0; i < 40; ++i) {
        distinct.insert(std::string(map.map("raw" + std::to_string(i))));
    }
    EXPECT_LE(distinct.size(), CategoryMap::kPaletteSize + 1);
}

TEST(CategoryMap, ParsesTabSeparatedFile)
{
    std::istringstream in("# comment\nMilitaryConflict\tEvent\nPerson\tPerson\n\n");
    auto map = CategoryMap::parse(in);
    EXPECT_EQ(map.map("MilitaryConflict"), "Event");
    EXPECT_EQ(map.map("Person"), "Person");

    std::istringstream bad("no tab here\n");
    EXPECT_THROW((void)CategoryMap::parse(bad), Error);
}

TEST(LoadCorpus, ThreeValidLines)
{
    std::istringstream in(record("a", 2, 3) + "\n" + record("b", 1, 1) + "\n" + record("c", 5, 5) + "\n");
    auto loaded = read_corpus(in);
    EXPECT_EQ(loaded.corpus.size(), 3u);
    EXPECT_EQ(loaded.report.accepted, 3u);
    EXPECT_TRUE(loaded.report.rejected.empty());
    EXPECT_EQ(loaded.corpus.find("b"), std::optional<std::size_t>{1});
}

TEST(LoadCorpus, RejectsOutOfRangeLineAndKeepsTheRest)
{
    std::istringstream in(record("a", 2, 3) + "\n" + record("b", 6.0, 1) + "\n" + "{not json\n" + record("c", 5, 5));
    auto loaded = read_corpus(in);
    EXPECT_EQ(loaded.corpus.size(), 2u);
    ASSERT_EQ(loaded.report.rejected.size(), 2u);
    EXPECT_EQ(loaded.report.rejected[0].line, 2u);
    EXPECT_TRUE(has(loaded.report.rejected[0].reasons, "positivity above 5.0"));
    EXPECT_EQ(loaded.report.rejected[1].line, 3u);
}

TEST(LoadCorpus, DuplicateIdRejectsWholeLoad)
{
    std::istringstream in(record("Q1", 2, 3) + "\n" + record("Q1", 1, 1) + "\n");
    try {
        (void)read_corpus(in);
        FAIL() << "expected duplicate error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::data);
        EXPECT_NE(std::string(e.what()).find("\"Q1\""), std::string::npos);
    }
}

TEST(LoadCorpus, ZeroValidDocumentsRejectsLoad)
{
    std::istringstream in(record("a", 0.5, 3) + "\n");
    EXPECT_THROW((void)read_corpus(in), Error);
    std::istringstream empty("");
    EXPECT_THROW((void)read_corpus(empty), Error);
}

TEST(LoadCorpus, MissingFileNamesPath)
{
    try {
        (void)load_corpus("/definitely/not/here.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io);
        EXPECT_NE(std::string(e.what()).find("/definitely/not/here.jsonl"), std::string::npos);
    }
}

TEST(LoadCorpus, UsesCategoryMapFile)
{
    sentiview::testing::TempDir dir;
    {
        std::ofstream(dir / "c.jsonl") << record("a", 2, 3, "MilitaryConflict") << "\n" << record("b", 2, 3, "Leaf");
        std::ofstream(dir / "map.tsv") << "MilitaryConflict\tEvent\n";
    }
    auto loaded = load_corpus(dir / "c.jsonl", dir / "map.tsv");
    EXPECT_EQ(loaded.corpus.display_category(0), "Event");
    EXPECT_EQ(loaded.corpus.display_category(1), "other");
}

TEST(LoadCorpus, WithoutMapUsesIdentityPalette)
{
    std::istringstream in(record("a", 2, 3, "Person") + "\n" + record("b", 2, 3, "") + "\n");
    auto loaded = read_corpus(in);
    EXPECT_EQ(loaded.corpus.display_category(0), "Person");
    EXPECT_EQ(loaded.corpus.display_category(1), "other");
}

TEST(CorpusProperties, WriteThenLoadRoundTrips)
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        auto corpus = sentiview::testing::random_corpus(rng, 1 + rng() % 40);
        std::vector<Document> docs(corpus.documents().begin(), corpus.documents().end());
        // Exercise full double precision and non-ASCII text in the round trip.
        for (auto& d : docs) {
            d.positivity = 1.0 + 4.0 * std::generate_canonical<double, 53>(rng);
            d.abstract += " Zürich “quoted” \\ \"x\"";
        }
        Corpus original(docs, CategoryMap{});
        std::stringstream buffer;
        write_corpus(buffer, original);
        auto reloaded = read_corpus(buffer);
        ASSERT_EQ(reloaded.corpus.size(), original.size());
        for (std::size_t i = 0; i < original.size(); ++i) {
            EXPECT_EQ(reloaded.corpus[i], original[i]);
        }
    }
}

TEST(CorpusProperties, SummaryMatchesSinglePassOracle)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Document> docs;
        std::size_t n = 1 + rng() % 3000;
        std::vector<double> pos;
        std::vector<double> neg;
        for (std::size_t i = 0; i < n; ++i) {
            Document d{"id" + std::to_string(i), "t", "", 1.0 + 4.0 * std::generate_canonical<double, 53>(rng),
                       1.0 + 4.0 * std::generate_canonical<double, 53>(rng), ""};
            pos.push_back(d.positivity);
            neg.push_back(d.negativity);
            docs.push_back(d);
        }
        Corpus corpus(std::move(docs), CategoryMap{});
        auto summary = distribution_summary(corpus, 10);
        auto expect_pos = oracle::single_pass(pos);
        auto expect_neg = oracle::single_pass(neg);
        EXPECT_NEAR(summary.positivity.mean, expect_pos.mean, 1e-9);
        EXPECT_NEAR(summary.positivity.stddev, expect_pos.stddev, 1e-9);
        EXPECT_NEAR(summary.negativity.mean, expect_neg.mean, 1e-9);
        EXPECT_NEAR(summary.negativity.stddev, expect_neg.stddev, 1e-9);
    }
}
