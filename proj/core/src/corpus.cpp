// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sentiview Authors

#include "sentiview/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "sentiview/error.hpp"

namespace sentiview {

namespace {

constexpr std::array<std::string_view, 6> kRecordKeys{"doc_id", "title", "abstract", "positivity", "negativity",
                                                      "category"};

void check_score(const nlohmann::json& record, const char* key, std::vector<std::string>& violations,
                 double& out)
{
    const auto& value = record.at(key);
    if (!value.is_number()) {
        violations.push_back(fmt::format("{} not a number", key));
        return;
    }
    out = value.get<double>();
    if (!std::isfinite(out)) {
        violations.push_back(fmt::format("{} not finite", key));
    } else if (out < kSentimentMin) {
        violations.push_back(fmt::format("{} below 1.0", key));
    } else if (out > kSentimentMax) {
        violations.push_back(fmt::format("{} above 5.0", key));
    }
}

void check_string(const nlohmann::json& record, const char* key, std::vector<std::string>& violations,
                  std::string& out)
{
    const auto& value = record.at(key);
    if (!value.is_string()) {
        violations.push_back(fmt::format("{} not a string", key));
        return;
    }
    out = value.get<std::string>();
}

}  // namespace

Validated validate_document(const nlohmann::json& record)
{
    Validated result;
    auto& violations = result.violations;
    if (!record.is_object()) {
        violations.emplace_back("record not an object");
        return result;
    }
    for (auto key : kRecordKeys) {
        if (!record.contains(key)) {
            violations.push_back(fmt::format("missing key {}", key));
        }
    }
    for (const auto& [key, value] : record.items()) {
        if (std::find(kRecordKeys.begin(), kRecordKeys.end(), key) == kRecordKeys.end()) {
            violations.push_back(fmt::format("unexpected key {}", key));
        }
    }
    if (!violations.empty()) {
        return result;
    }

    Document doc;
    check_string(record, "doc_id", violations, doc.doc_id);
    check_string(record, "title", violations, doc.title);
    check_string(record, "abstract", violations, doc.abstract);
    check_string(record, "category", violations, doc.category);
    check_score(record, "positivity", violations, doc.positivity);
    check_score(record, "negativity", violations, doc.negativity);
    if (record.at("doc_id").is_string() && doc.doc_id.empty()) {
        violations.emplace_back("doc_id empty");
    }
    if (record.at("title").is_string() && doc.title.empty()) {
        violations.emplace_back("title empty");
    }
    if (violations.empty()) {
        result.document = std::move(doc);
    }
    return result;
}

CategoryMap CategoryMap::from_entries(std::span<const std::pair<std::string, std::string>> entries)
{
    CategoryMap result;
    for (const auto& [raw, display] : entries) {
        if (raw.empty() || result.m_map.contains(raw)) {
            continue;
        }
        std::string target = display;
        if (display.empty() || display == kOther) {
            target = std::string(kOther);
        } else if (std::find(result.m_palette.begin(), result.m_palette.end(), display) == result.m_palette.end()) {
            if (result.m_palette.size() < kPaletteSize) {
                result.m_palette.push_back(display);
            } else {
                target = std::string(kOther);
            }
        }
        result.m_map.emplace(raw, std::move(target));
    }
    return result;
}

CategoryMap CategoryMap::parse(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw Error(ErrorCode::data, fmt::format("category map line {}: expected raw_label<TAB>display_label",
                                                     line_no));
        }
        entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return from_entries(entries);
}

CategoryMap CategoryMap::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io, fmt::format("cannot open category map {}", path.string()));
    }
    return parse(in);
}

CategoryMap CategoryMap::identity(std::span<const std::string> raw_labels)
{
    std::vector<std::pair<std::string, std::string>> entries;
    entries.reserve(raw_labels.size());
    for (const auto& label : raw_labels) {
        entries.emplace_back(label, label);
    }
    return from_entries(entries);
}

std::string_view CategoryMap::map(std::string_view raw_label) const
{
    if (raw_label.empty()) {
        return kOther;
    }
    auto it = m_map.find(std::string(raw_label));
    return it == m_map.end() ? kOther : std::string_view(it->second);
}

std::string map_category(std::string_view raw_label, const CategoryMap& category_map)
{
    return std::string(category_map.map(raw_label));
}

Corpus::Corpus(std::vector<Document> documents, CategoryMap category_map)
    : m_documents(std::move(documents)), m_category_map(std::move(category_map))
{
    if (m_documents.empty()) {
        throw Error(ErrorCode::data, "corpus has no valid documents");
    }
    m_by_id.reserve(m_documents.size());
    for (std::size_t i = 0; i < m_documents.size(); ++i) {
        if (!m_by_id.emplace(m_documents[i].doc_id, i).second) {
            throw Error(ErrorCode::data, fmt::format("duplicate doc_id \"{}\"", m_documents[i].doc_id));
        }
    }
}

std::string_view Corpus::display_category(std::size_t ordinal) const
{
    return m_category_map.map(m_documents.at(ordinal).category);
}

std::optional<std::size_t> Corpus::find(std::string_view doc_id) const
{
    auto it = m_by_id.find(std::string(doc_id));
    if (it == m_by_id.end()) {
        return std::nullopt;
    }
    return it->second;
}

LoadedCorpus read_corpus(std::istream& in, CategoryMap category_map)
{
    LoadReport report;
    std::vector<Document> documents;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        ++report.lines;
        auto record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            report.rejected.push_back({line_no, {"unparseable record"}});
            continue;
        }
        auto validated = validate_document(record);
        if (!validated.document) {
            report.rejected.push_back({line_no, std::move(validated.violations)});
            continue;
        }
        auto [it, inserted] = first_line.emplace(validated.document->doc_id, line_no);
        if (!inserted) {
            throw Error(ErrorCode::data, fmt::format("duplicate doc_id \"{}\" on lines {} and {}",
                                                     validated.document->doc_id, it->second, line_no));
        }
        documents.push_back(std::move(*validated.document));
    }
    report.accepted = documents.size();
    if (documents.empty()) {
        throw Error(ErrorCode::data, fmt::format("no valid documents ({} lines rejected)", report.rejected.size()));
    }
    if (category_map.empty()) {
        std::vector<std::string> labels;
        labels.reserve(documents.size());
        for (const auto& doc : documents) {
            labels.push_back(doc.category);
        }
        category_map = CategoryMap::identity(labels);
    }
    return {Corpus(std::move(documents), std::move(category_map)), std::move(report)};
}

LoadedCorpus load_corpus(const std::filesystem::path& corpus_path,
                         const std::optional<std::filesystem::path>& category_map_path)
{
    std::ifstream in(corpus_path);
    if (!in) {
        throw Error(ErrorCode::io, fmt::format("cannot open corpus {}", corpus_path.string()));
    }
    CategoryMap category_map;
    if (category_map_path) {
        category_map = CategoryMap::load(*category_map_path);
    }
    return read_corpus(in, std::move(category_map));
}

std::string to_json_line(const Document& document)
{
    nlohmann::ordered_json record;
    record["doc_id"] = document.doc_id;
    record["title"] = document.title;
    record["abstract"] = document.abstract;
    record["positivity"] = document.positivity;
    record["negativity"] = document.negativity;
    record["category"] = document.category;
    return record.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

void write_corpus(std::ostream& out, const Corpus& corpus)
{
    for (const auto& doc : corpus.documents()) {
        out << to_json_line(doc) << '\n';
    }
}

}  // namespace sentiview
