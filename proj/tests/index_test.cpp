// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "sentiview/error.hpp"
#include "sentiview/index.hpp"

using namespace sentiview;

namespace {

Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& id_and_text)
{
    std::vector<Document> docs;
    for (const auto& [id, text] : id_and_text) {
        docs.push_back({id, text, "", 3.0, 3.0, ""});
    }
    return Corpus(std::move(docs), CategoryMap{});
}

Corpus war_peace() { return make_corpus({{"d0", "war peace"}, {"d1", "war war war"}, {"d2", "peace"}}); }

using Strings = std::vector<std::string>;

}  // namespace

TEST(Tokenize, LowercasesAndSplitsOnNonAlphanumerics)
{
    EXPECT_EQ(tokenize("Art in Europe"), (Strings{"art", "in", "europe"}));
    EXPECT_EQ(tokenize(""), Strings{});
    EXPECT_EQ(tokenize("World-War II (1939–45)"), (Strings{"world", "war", "ii", "1939", "45"}));
}

TEST(Tokenize, HandlesUnicodeLettersAndPunctuation)
{
    EXPECT_EQ(tokenize("ZÜRICH café"), (Strings{"zürich", "café"}));
    EXPECT_EQ(tokenize("“quoted”…end"), (Strings{"quoted", "end"}));
    EXPECT_EQ(tokenize("a\xff" "b"), (Strings{"a", "b"}));  // invalid byte acts as a separator
    EXPECT_EQ(tokenize("  ,;  "), Strings{});
}

TEST(BuildIndex, CountsTermsInTitlePlusAbstract)
{
    Corpus corpus({{"x", "a", "b a", 2, 2, ""}}, CategoryMap{});
    auto index = InvertedIndex::build(corpus);
    ASSERT_EQ(index.postings("a").size(), 1u);
    EXPECT_EQ(index.postings("a")[0], (Posting{0, 2}));
    EXPECT_EQ(index.postings("b")[0], (Posting{0, 1}));
    EXPECT_EQ(index.doc_lengths()[0], 3u);
}

TEST(BuildIndex, DisjointVocabulariesGiveSingletonPostings)
{
    auto index = InvertedIndex::build(make_corpus({{"a", "red green"}, {"b", "blue yellow"}}));
    for (const auto& term : index.vocabulary()) {
        EXPECT_EQ(index.postings(term).size(), 1u) << term;
    }
}

TEST(BuildIndex, AverageDocLength)
{
    auto index = InvertedIndex::build(make_corpus({{"a", "x x"}, {"b", "x x x x"}, {"c", "x x x x x x"}}));
    EXPECT_DOUBLE_EQ(index.avg_doc_length(), 4.0);
}

TEST(BuildIndex, InvariantsOnRandomCorpora)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto corpus = sentiview::testing::random_corpus(rng, 1 + rng() % 60);
        auto index = InvertedIndex::build(corpus);
        double sum = 0;
        for (auto len : index.doc_lengths()) {
            sum += len;
        }
        EXPECT_NEAR(index.avg_doc_length(), sum / static_cast<double>(corpus.size()), 1e-9);
        for (const auto& term : index.vocabulary()) {
            auto list = index.postings(term);
            for (std::size_t i = 0; i < list.size(); ++i) {
                EXPECT_LT(list[i].doc, corpus.size());
                if (i > 0) {
                    EXPECT_LT(list[i - 1].doc, list[i].doc);
                }
            }
        }
    }
}

TEST(Idf, HandEvaluatedClosedForm)
{
    EXPECT_NEAR(idf(4, 1), std::log(10.0 / 3.0), 1e-12);
    EXPECT_NEAR(idf(4, 1), 1.20397, 1e-5);
    EXPECT_NEAR(idf(4, 4), 0.10536, 1e-5);
    EXPECT_NEAR(idf(1, 0), std::log(4.0), 1e-12);
    for (std::size_t n = 1; n < 30; ++n) {
        for (std::size_t df = 1; df <= n; ++df) {
            EXPECT_GT(idf(n, df), 0.0);
        }
    }
}

TEST(ScoreBm25, AbsentTermsContributeNothing)
{
    auto index = InvertedIndex::build(war_peace());
    EXPECT_EQ(score_bm25(Strings{"zzz"}, 0, index), 0.0);
    EXPECT_EQ(score_bm25(Strings{"war"}, 2, index), 0.0);
}

TEST(ScoreBm25, K1ZeroIsSumOfIdfs)
{
    auto index = InvertedIndex::build(war_peace());
    Bm25Params params{0.0, 0.75};
    EXPECT_NEAR(score_bm25(Strings{"war", "peace"}, 0, index, params), idf("war", index) + idf("peace", index),
                1e-12);
    EXPECT_NEAR(score_bm25(Strings{"war"}, 1, index, params), idf("war", index), 1e-12);
}

TEST(ScoreBm25, ThreeDocExampleMatchesHandEvaluation)
{
    auto index = InvertedIndex::build(war_peace());
    // N = 3, n_war = 2, avgdl = 2: idf = ln 1.6.
    // d0: f = 1, |d| = 2 -> 2.2 / (1 + 1.2) = 1.
    // d1: f = 3, |d| = 3 -> 6.6 / (3 + 1.2 * 1.375) = 6.6 / 4.65.
    const double d0 = std::log(1.6);
    const double d1 = std::log(1.6) * 6.6 / 4.65;
    EXPECT_NEAR(score_bm25(Strings{"war"}, 0, index), d0, 1e-12);
    EXPECT_NEAR(score_bm25(Strings{"war"}, 1, index), d1, 1e-12);
    EXPECT_EQ(score_bm25(Strings{"war"}, 2, index), 0.0);
    EXPECT_GT(d1, d0);
}

TEST(ScoreBm25, MatchesClosedFormOracleOnRandomCorpora)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto corpus = sentiview::testing::random_corpus(rng, 1 + rng() % 30);
        auto index = InvertedIndex::build(corpus);
        std::vector<std::vector<std::string>> tokens;
        for (const auto& d : corpus.documents()) {
            auto t = tokenize(d.title);
            auto body = tokenize(d.abstract);
            t.insert(t.end(), body.begin(), body.end());
            tokens.push_back(t);
        }
        Bm25Params params{std::uniform_real_distribution<double>(0.0, 3.0)(rng),
                          std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
        auto query = tokenize(sentiview::testing::random_query(rng));
        for (std::uint32_t d = 0; d < corpus.size(); ++d) {
            EXPECT_NEAR(score_bm25(query, d, index, params),
                        oracle::bm25_closed_form(tokens, d, query, params.k1, params.b), 1e-12);
        }
    }
}

TEST(ScoreBm25, RepeatedQueryTermsAreDeduplicated)
{
    auto index = InvertedIndex::build(war_peace());
    EXPECT_EQ(score_bm25(Strings{"war", "war", "war"}, 1, index), score_bm25(Strings{"war"}, 1, index));
}

TEST(ScoreBm25, MonotoneInTermFrequency)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        double k1 = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        double b = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double term_idf = std::uniform_real_distribution<double>(0.01, 5.0)(rng);
        auto len = static_cast<std::uint32_t>(1 + rng() % 100);
        double avgdl = std::uniform_real_distribution<double>(1.0, 50.0)(rng);
        double previous = 0.0;
        for (std::uint32_t f = 0; f < 50; ++f) {
            double w = bm25_term_weight(term_idf, f, len, avgdl, {k1, b});
            EXPECT_GE(w, previous);
            EXPECT_TRUE(std::isfinite(w));
            previous = w;
        }
    }
}

TEST(Search, RanksThreeDocExample)
{
    auto index = InvertedIndex::build(war_peace());
    auto result = search("war", index);
    ASSERT_EQ(result.hits.size(), 2u);
    EXPECT_EQ(result.hits[0].doc_id, "d1");
    EXPECT_EQ(result.hits[1].doc_id, "d0");
    EXPECT_EQ(result.hits[0].rank, 1u);
    EXPECT_EQ(result.hits[1].rank, 2u);
    EXPECT_TRUE(search("zzz", index).hits.empty());
}

TEST(Search, EmptyQueryIsAnError)
{
    auto index = InvertedIndex::build(war_peace());
    try {
        (void)search(" -- ", index);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_query);
    }
    EXPECT_THROW((void)search("war", index, 0), Error);
}

TEST(Search, CapsAtTwoHundred)
{
    std::vector<std::pair<std::string, std::string>> docs;
    for (int i = 0; i < 250; ++i) {
        docs.emplace_back("doc" + std::to_string(i), "war " + std::string(static_cast<std::size_t>(i % 7), 'x'));
    }
    auto index = InvertedIndex::build(make_corpus(docs));
    auto result = search("war", index);
    EXPECT_EQ(result.hits.size(), kMaxResults);
    EXPECT_EQ(result.total_matches, 250u);
}

TEST(Search, TiesBreakByDocIdAscending)
{
    auto index = InvertedIndex::build(make_corpus({{"b", "war"}, {"c", "war"}, {"a", "war"}}));
    auto result = search("war", index);
    ASSERT_EQ(result.hits.size(), 3u);
    EXPECT_EQ(result.hits[0].doc_id, "a");
    EXPECT_EQ(result.hits[1].doc_id, "b");
    EXPECT_EQ(result.hits[2].doc_id, "c");
}

TEST(Search, EqualsBruteForceOracle)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        auto corpus = sentiview::testing::random_corpus(rng, 1 + rng() % 50);
        auto index = InvertedIndex::build(corpus);
        auto query = sentiview::testing::random_query(rng);
        std::size_t limit = 1 + rng() % 60;
        auto got = search(query, index, limit);
        auto expected = oracle::brute_force_search(corpus, index, query, limit, {});
        EXPECT_EQ(got.hits, expected);
    }
}

TEST(Search, RemovingTheLimitNeverReordersThePrefix)
{
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        auto corpus = sentiview::testing::random_corpus(rng, 1 + rng() % 50);
        auto index = InvertedIndex::build(corpus);
        auto query = sentiview::testing::random_query(rng);
        auto full = search(query, index, 1000).hits;
        std::size_t limit = 1 + rng() % 20;
        auto truncated = search(query, index, limit).hits;
        ASSERT_LE(truncated.size(), full.size());
        for (std::size_t i = 0; i < truncated.size(); ++i) {
            EXPECT_EQ(truncated[i], full[i]);
        }
        for (const auto& hit : full) {
            EXPECT_GE(hit.bm25_score, 0.0);
            EXPECT_TRUE(std::isfinite(hit.bm25_score));
        }
    }
}

TEST(IndexCache, SaveLoadRoundTripAndFingerprintMismatch)
{
    std::mt19937_64 rng(23);
    auto corpus = sentiview::testing::random_corpus(rng, 40);
    auto index = InvertedIndex::build(corpus);
    std::stringstream buffer;
    index.save(buffer, 99);
    auto reloaded = InvertedIndex::load(buffer, 99);
    ASSERT_TRUE(reloaded);
    EXPECT_EQ(reloaded->vocabulary(), index.vocabulary());
    EXPECT_DOUBLE_EQ(reloaded->avg_doc_length(), index.avg_doc_length());
    for (const auto& term : index.vocabulary()) {
        auto a = index.postings(term);
        auto b = reloaded->postings(term);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
    EXPECT_EQ(search("war peace", *reloaded).hits, search("war peace", index).hits);

    std::stringstream again;
    index.save(again, 99);
    EXPECT_FALSE(InvertedIndex::load(again, 100));

    std::string truncated = buffer.str().substr(0, 40);
    std::stringstream broken(truncated);
    EXPECT_FALSE(InvertedIndex::load(broken, 99));
}

TEST(Bm25Params, Validation)
{
    EXPECT_NO_THROW((Bm25Params{0.0, 0.0}.validate()));
    EXPECT_NO_THROW((Bm25Params{2.0, 1.0}.validate()));
    EXPECT_THROW((Bm25Params{-0.1, 0.5}.validate()), Error);
    EXPECT_THROW((Bm25Params{1.2, 1.5}.validate()), Error);
}
