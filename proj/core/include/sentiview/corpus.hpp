// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace sentiview {

inline constexpr double kSentimentMin = 1.0;
inline constexpr double kSentimentMax = 5.0;

/// One searchable article with its bivariate sentiment annotation.
/// Positivity and negativity are scored independently on [1, 5].
struct Document {
    std::string doc_id;
    std::string title;
    std::string abstract;
    double positivity = kSentimentMin;
    double negativity = kSentimentMin;
    std::string category;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Outcome of validating one parsed corpus record: either a document or the
/// full list of violated field invariants.
struct Validated {
    std::optional<Document> document;
    std::vector<std::string> violations;
};

[[nodiscard]] Validated validate_document(const nlohmann::json& record);

/// Raw ontology label -> display category. At most kPaletteSize distinct
/// display categories survive; anything else maps to kOther.
class CategoryMap {
  public:
    static constexpr std::size_t kPaletteSize = 24;
    static constexpr std::string_view kOther = "other";

    CategoryMap() = default;

    /// Entries are applied in order; a display label that would become the
    /// 25th distinct category overflows into "other".
    static CategoryMap from_entries(std::span<const std::pair<std::string, std::string>> entries);

    /// Reads "raw_label<TAB>display_label" lines. Blank lines and lines
    /// starting with '#' are skipped.
    static CategoryMap load(const std::filesystem::path& path);
    static CategoryMap parse(std::istream& in);

    /// Identity mapping over labels in first-appearance order, palette-bounded.
    static CategoryMap identity(std::span<const std::string> raw_labels);

    [[nodiscard]] std::string_view map(std::string_view raw_label) const;
    [[nodiscard]] const std::vector<std::string>& palette() const noexcept { return m_palette; }
    [[nodiscard]] bool empty() const noexcept { return m_map.empty(); }

  private:
    std::unordered_map<std::string, std::string> m_map;
    std::vector<std::string> m_palette;
};

[[nodiscard]] std::string map_category(std::string_view raw_label, const CategoryMap& category_map);

/// Immutable document collection. Construction enforces doc_id uniqueness and
/// non-emptiness; safe for concurrent reads afterwards.
class Corpus {
  public:
    Corpus(std::vector<Document> documents, CategoryMap category_map);

    [[nodiscard]] std::span<const Document> documents() const noexcept { return m_documents; }
    [[nodiscard]] std::size_t size() const noexcept { return m_documents.size(); }
    [[nodiscard]] const Document& operator[](std::size_t ordinal) const { return m_documents[ordinal]; }
    [[nodiscard]] const CategoryMap& category_map() const noexcept { return m_category_map; }
    [[nodiscard]] std::string_view display_category(std::size_t ordinal) const;
    [[nodiscard]] std::optional<std::size_t> find(std::string_view doc_id) const;

  private:
    std::vector<Document> m_documents;
    CategoryMap m_category_map;
    std::unordered_map<std::string, std::size_t> m_by_id;
};

struct LineRejection {
    std::size_t line = 0;
    std::vector<std::string> reasons;
};

struct LoadReport {
    std::size_t lines = 0;
    std::size_t accepted = 0;
    std::vector<LineRejection> rejected;
};

struct LoadedCorpus {
    Corpus corpus;
    LoadReport report;
};

/// Parses line-delimited records. Malformed lines are rejected individually;
/// a duplicate doc_id or an empty result rejects the whole load.
/// When `category_map` is empty an identity map is derived from the corpus.
[[nodiscard]] LoadedCorpus read_corpus(std::istream& in, CategoryMap category_map = {});

[[nodiscard]] LoadedCorpus load_corpus(const std::filesystem::path& corpus_path,
                                       const std::optional<std::filesystem::path>& category_map_path = {});

[[nodiscard]] std::string to_json_line(const Document& document);
void write_corpus(std::ostream& out, const Corpus& corpus);

}  // namespace sentiview
