// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sentiview {

class Corpus;

/// Result lists never exceed this many hits.
inline constexpr std::size_t kMaxResults = 200;

/// Lowercases and splits on every non-alphanumeric character. No stemming and
/// no stopword removal. Non-ASCII code points count as alphanumeric except
/// for punctuation/symbol blocks (Latin-1 symbols, General Punctuation, CJK
/// punctuation), so "1939–45" splits at the en dash.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

/// Removes repeated terms, keeping first occurrences in order.
[[nodiscard]] std::vector<std::string> distinct_terms(std::span<const std::string> terms);

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t freq = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Okapi BM25 free parameters.
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    /// Throws Error(invalid_argument) unless k1 >= 0 and 0 <= b <= 1.
    void validate() const;
};

/// Term -> postings over title + abstract. Immutable after build; concurrent
/// searches need no synchronization.
class InvertedIndex {
  public:
    /// Throws Error(invalid_argument) for an empty corpus.
    static InvertedIndex build(const Corpus& corpus);

    [[nodiscard]] std::size_t doc_count() const noexcept { return m_doc_ids.size(); }
    [[nodiscard]] double avg_doc_length() const noexcept { return m_avg_doc_length; }
    [[nodiscard]] std::span<const std::uint32_t> doc_lengths() const noexcept { return m_doc_lengths; }
    [[nodiscard]] const std::string& doc_id(std::uint32_t ordinal) const { return m_doc_ids.at(ordinal); }

    /// Empty span for unknown terms.
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    [[nodiscard]] std::size_t document_frequency(std::string_view term) const { return postings(term).size(); }
    [[nodiscard]] std::uint32_t term_frequency(std::string_view term, std::uint32_t doc) const;

    [[nodiscard]] std::vector<std::string> vocabulary() const;

    /// Opaque binary cache. `fingerprint` identifies the source corpus; load()
    /// returns nullopt on any mismatch or corruption so callers rebuild.
    void save(std::ostream& out, std::uint64_t fingerprint) const;
    [[nodiscard]] static std::optional<InvertedIndex> load(std::istream& in, std::uint64_t fingerprint);

  private:
    InvertedIndex() = default;

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> m_term_ids;
    std::vector<std::vector<Posting>> m_postings;
    std::vector<std::uint32_t> m_doc_lengths;
    std::vector<std::string> m_doc_ids;
    double m_avg_doc_length = 0.0;

    void finalize();
};

/// ln(1 + (N - n_t + 0.5) / (n_t + 0.5)); never negative.
[[nodiscard]] double idf(std::size_t doc_count, std::size_t doc_freq) noexcept;
[[nodiscard]] double idf(std::string_view term, const InvertedIndex& index);

/// One term's BM25 contribution for a document of length `doc_length`.
[[nodiscard]] double bm25_term_weight(double term_idf, std::uint32_t freq, std::uint32_t doc_length,
                                      double avg_doc_length, const Bm25Params& params) noexcept;

/// Sum over distinct query terms in first-occurrence order.
[[nodiscard]] double score_bm25(std::span<const std::string> query_terms, std::uint32_t doc,
                                const InvertedIndex& index, const Bm25Params& params = {});

struct RankedHit {
    std::string doc_id;
    std::uint32_t ordinal = 0;
    double bm25_score = 0.0;
    std::size_t rank = 0;

    friend bool operator==(const RankedHit&, const RankedHit&) = default;
};

/// Score descending, then doc_id ascending.
[[nodiscard]] bool ranks_before(const RankedHit& lhs, const RankedHit& rhs) noexcept;

struct SearchResult {
    std::vector<RankedHit> hits;
    /// Documents containing at least one query term, before truncation.
    std::size_t total_matches = 0;
};

/// Throws Error(empty_query) if the query has no terms and
/// Error(invalid_argument) if limit is zero.
[[nodiscard]] SearchResult search(std::string_view query, const InvertedIndex& index,
                                  std::size_t limit = kMaxResults, const Bm25Params& params = {});

}  // namespace sentiview
