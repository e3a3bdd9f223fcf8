// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/index.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "sentiview/corpus.hpp"
#include "sentiview/error.hpp"

namespace sentiview {

namespace {

struct CodePoint {
    char32_t value;
    std::size_t length;
};

// Malformed sequences decode as U+FFFD of length 1 so scanning always advances.
CodePoint decode_utf8(std::string_view text, std::size_t pos)
{
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    unsigned char lead = byte(pos);
    if (lead < 0x80) {
        return {lead, 1};
    }
    std::size_t length = 0;
    char32_t value = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        value = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        value = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        value = lead & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (pos + length > text.size()) {
        return {0xFFFD, 1};
    }
    for (std::size_t i = 1; i < length; ++i) {
        if ((byte(pos + i) & 0xC0) != 0x80) {
            return {0xFFFD, 1};
        }
        value = (value << 6) | (byte(pos + i) & 0x3F);
    }
    return {value, length};
}

bool is_term_char(char32_t c)
{
    if (c < 0x80) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    if (c <= 0xBF || c == 0xD7 || c == 0xF7) {
        return false;  // C1 controls, Latin-1 punctuation and symbols
    }
    if ((c >= 0x2000 && c <= 0x2BFF) || (c >= 0x3000 && c <= 0x303F) || (c >= 0xFE30 && c <= 0xFE4F) ||
        (c >= 0xFF00 && c <= 0xFF0F) || c == 0xFFFD || c == 0xFEFF) {
        return false;  // punctuation, arrows, math and technical symbols, CJK punctuation
    }
    return true;
}

void append_lowered(std::string& out, std::string_view text, std::size_t pos, CodePoint cp)
{
    if (cp.length == 1) {
        auto c = static_cast<unsigned char>(text[pos]);
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c));
        return;
    }
    // Latin-1 uppercase letters U+00C0..U+00DE (minus U+00D7) encode as C3 80..C3 9E.
    if (cp.value >= 0xC0 && cp.value <= 0xDE) {
        char32_t lower = cp.value + 0x20;
        out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
        out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
        return;
    }
    out.append(text.substr(pos, cp.length));
}

template <typename T>
void write_pod(std::ostream& out, const T& value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& value)
{
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

void write_string(std::ostream& out, const std::string& s)
{
    write_pod(out, static_cast<std::uint64_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

bool read_string(std::istream& in, std::string& s, std::uint64_t max_size)
{
    std::uint64_t size = 0;
    if (!read_pod(in, size) || size > max_size) {
        return false;
    }
    s.resize(size);
    return static_cast<bool>(in.read(s.data(), static_cast<std::streamsize>(size)));
}

constexpr std::uint64_t kCacheMagic = 0x3158444956544E53ULL;  // "SNTVIDX1"
constexpr std::uint64_t kMaxCacheString = 1ULL << 24;

}  // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> terms;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto cp = decode_utf8(text, pos);
        if (is_term_char(cp.value)) {
            append_lowered(current, text, pos, cp);
        } else if (!current.empty()) {
            terms.push_back(std::move(current));
            current.clear();
        }
        pos += cp.length;
    }
    if (!current.empty()) {
        terms.push_back(std::move(current));
    }
    return terms;
}

std::vector<std::string> distinct_terms(std::span<const std::string> terms)
{
    std::vector<std::string> out;
    for (const auto& term : terms) {
        if (std::find(out.begin(), out.end(), term) == out.end()) {
            out.push_back(term);
        }
    }
    return out;
}

void Bm25Params::validate() const
{
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("k1 must be >= 0 (got {})", k1));
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, fmt::format("b must lie in [0, 1] (got {})", b));
    }
}

InvertedIndex InvertedIndex::build(const Corpus& corpus)
{
    if (corpus.size() == 0) {
        throw Error(ErrorCode::invalid_argument, "cannot index an empty corpus");
    }
    InvertedIndex index;
    index.m_doc_ids.reserve(corpus.size());
    index.m_doc_lengths.reserve(corpus.size());
    std::vector<std::uint32_t> local_counts;
    std::vector<std::uint32_t> touched;
    for (std::size_t ordinal = 0; ordinal < corpus.size(); ++ordinal) {
        const auto& doc = corpus[ordinal];
        auto terms = tokenize(doc.title);
        auto body = tokenize(doc.abstract);
        terms.insert(terms.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));

        touched.clear();
        for (auto& term : terms) {
            auto [it, inserted] = index.m_term_ids.try_emplace(std::move(term),
                                                               static_cast<std::uint32_t>(index.m_postings.size()));
            if (inserted) {
                index.m_postings.emplace_back();
                local_counts.push_back(0);
            }
            if (local_counts[it->second]++ == 0) {
                touched.push_back(it->second);
            }
        }
        for (auto term_id : touched) {
            index.m_postings[term_id].push_back({static_cast<std::uint32_t>(ordinal), local_counts[term_id]});
            local_counts[term_id] = 0;
        }
        index.m_doc_ids.push_back(doc.doc_id);
        index.m_doc_lengths.push_back(static_cast<std::uint32_t>(terms.size()));
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize()
{
    auto total = std::accumulate(m_doc_lengths.begin(), m_doc_lengths.end(), 0.0,
                                 [](double acc, std::uint32_t len) { return acc + len; });
    m_avg_doc_length = total / static_cast<double>(m_doc_lengths.size());
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const
{
    auto it = m_term_ids.find(term);
    if (it == m_term_ids.end()) {
        return {};
    }
    return m_postings[it->second];
}

std::uint32_t InvertedIndex::term_frequency(std::string_view term, std::uint32_t doc) const
{
    auto list = postings(term);
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->freq : 0;
}

std::vector<std::string> InvertedIndex::vocabulary() const
{
    std::vector<std::string> terms;
    terms.reserve(m_term_ids.size());
    for (const auto& [term, id] : m_term_ids) {
        terms.push_back(term);
    }
    std::sort(terms.begin(), terms.end());
    return terms;
}

void InvertedIndex::save(std::ostream& out, std::uint64_t fingerprint) const
{
    write_pod(out, kCacheMagic);
    write_pod(out, fingerprint);
    write_pod(out, static_cast<std::uint64_t>(m_doc_ids.size()));
    for (std::size_t i = 0; i < m_doc_ids.size(); ++i) {
        write_string(out, m_doc_ids[i]);
        write_pod(out, m_doc_lengths[i]);
    }
    write_pod(out, static_cast<std::uint64_t>(m_term_ids.size()));
    for (const auto& term : vocabulary()) {
        write_string(out, term);
        const auto& list = m_postings[m_term_ids.find(term)->second];
        write_pod(out, static_cast<std::uint64_t>(list.size()));
        for (const auto& p : list) {
            write_pod(out, p.doc);
            write_pod(out, p.freq);
        }
    }
    write_pod(out, kCacheMagic);
}

std::optional<InvertedIndex> InvertedIndex::load(std::istream& in, std::uint64_t fingerprint)
{
    std::uint64_t magic = 0;
    std::uint64_t stored_fingerprint = 0;
    std::uint64_t doc_count = 0;
    if (!read_pod(in, magic) || magic != kCacheMagic || !read_pod(in, stored_fingerprint) ||
        stored_fingerprint != fingerprint || !read_pod(in, doc_count) || doc_count == 0 ||
        doc_count > (1ULL << 32)) {
        return std::nullopt;
    }
    InvertedIndex index;
    index.m_doc_ids.resize(doc_count);
    index.m_doc_lengths.resize(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        if (!read_string(in, index.m_doc_ids[i], kMaxCacheString) || !read_pod(in, index.m_doc_lengths[i])) {
            return std::nullopt;
        }
    }
    std::uint64_t term_count = 0;
    if (!read_pod(in, term_count)) {
        return std::nullopt;
    }
    for (std::uint64_t t = 0; t < term_count; ++t) {
        std::string term;
        std::uint64_t list_size = 0;
        if (!read_string(in, term, kMaxCacheString) || !read_pod(in, list_size) || list_size > doc_count) {
            return std::nullopt;
        }
        std::vector<Posting> list(list_size);
        for (auto& p : list) {
            if (!read_pod(in, p.doc) || !read_pod(in, p.freq) || p.doc >= doc_count) {
                return std::nullopt;
            }
        }
        auto id = static_cast<std::uint32_t>(index.m_postings.size());
        if (!index.m_term_ids.emplace(std::move(term), id).second) {
            return std::nullopt;
        }
        index.m_postings.push_back(std::move(list));
    }
    if (!read_pod(in, magic) || magic != kCacheMagic) {
        return std::nullopt;
    }
    index.finalize();
    return index;
}

double idf(std::size_t doc_count, std::size_t doc_freq) noexcept
{
    auto n = static_cast<double>(doc_count);
    auto df = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double idf(std::string_view term, const InvertedIndex& index)
{
    return idf(index.doc_count(), index.document_frequency(term));
}

double bm25_term_weight(double term_idf, std::uint32_t freq, std::uint32_t doc_length, double avg_doc_length,
                        const Bm25Params& params) noexcept
{
    if (freq == 0) {
        return 0.0;
    }
    double norm = avg_doc_length > 0.0 ? static_cast<double>(doc_length) / avg_doc_length : 1.0;
    double f = freq;
    return term_idf * (f * (params.k1 + 1.0)) / (f + params.k1 * (1.0 - params.b + params.b * norm));
}

double score_bm25(std::span<const std::string> query_terms, std::uint32_t doc, const InvertedIndex& index,
                  const Bm25Params& params)
{
    double score = 0.0;
    auto doc_length = index.doc_lengths()[doc];
    for (const auto& term : distinct_terms(query_terms)) {
        auto freq = index.term_frequency(term, doc);
        if (freq == 0) {
            continue;
        }
        score += bm25_term_weight(idf(term, index), freq, doc_length, index.avg_doc_length(), params);
    }
    return score;
}

bool ranks_before(const RankedHit& lhs, const RankedHit& rhs) noexcept
{
    if (lhs.bm25_score != rhs.bm25_score) {
        return lhs.bm25_score > rhs.bm25_score;
    }
    return lhs.doc_id < rhs.doc_id;
}

SearchResult search(std::string_view query, const InvertedIndex& index, std::size_t limit, const Bm25Params& params)
{
    if (limit == 0) {
        throw Error(ErrorCode::invalid_argument, "limit must be >= 1");
    }
    params.validate();
    auto terms = distinct_terms(tokenize(query));
    if (terms.empty()) {
        throw Error(ErrorCode::empty_query, "empty query");
    }

    // Term-at-a-time accumulation in the same term order as score_bm25 so the
    // floating-point sums agree bit for bit.
    std::vector<double> scores(index.doc_count(), 0.0);
    std::vector<std::uint8_t> matched(index.doc_count(), 0);
    std::vector<std::uint32_t> candidates;
    auto lengths = index.doc_lengths();
    for (const auto& term : terms) {
        auto list = index.postings(term);
        if (list.empty()) {
            continue;
        }
        double term_idf = idf(index.doc_count(), list.size());
        for (const auto& p : list) {
            scores[p.doc] += bm25_term_weight(term_idf, p.freq, lengths[p.doc], index.avg_doc_length(), params);
            if (!matched[p.doc]) {
                matched[p.doc] = 1;
                candidates.push_back(p.doc);
            }
        }
    }

    SearchResult result;
    result.total_matches = candidates.size();
    std::vector<RankedHit> hits;
    hits.reserve(candidates.size());
    for (auto doc : candidates) {
        hits.push_back({index.doc_id(doc), doc, scores[doc], 0});
    }
    auto keep = std::min(limit, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), ranks_before);
    hits.resize(keep);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        hits[i].rank = i + 1;
    }
    result.hits = std::move(hits);
    return result;
}

}  // namespace sentiview
