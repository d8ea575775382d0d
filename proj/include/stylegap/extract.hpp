#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylegap/lexicon.hpp"

namespace stylegap::extract {

inline constexpr std::size_t kFeatureCount = 34;

// Fixed output order for every feature table, report row, and chart axis.
const std::array<std::string_view, kFeatureCount>& feature_schema();
std::optional<std::size_t> feature_index(std::string_view name);

// Affine combination of category percentages, clamped to [0,100] after
// evaluation. Shipped defaults live in data/composites.json.
struct CompositeDef {
    std::string name;
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> terms;
};

std::vector<CompositeDef> load_composites(const std::filesystem::path& path);
std::vector<CompositeDef> parse_composites(std::string_view json_text);

struct FeatureVector {
    std::string record_id;
    std::string variant;
    std::array<double, kFeatureCount> values{};
    bool degenerate = false;  // WC == 0; excluded from statistics downstream
};

struct DocumentInput {
    std::string record_id;
    std::string variant;
    std::string text;
};

// Lowercased word tokens: maximal runs of alphanumerics (non-ASCII bytes
// count as word characters) plus internal apostrophes and hyphens.
std::vector<std::string> tokenize(std::string_view text);

// Raw percentage per dictionary category name: 100 * matches / WC, clamped
// to [0,100]. Every category of the matcher appears in the map (zeros kept).
std::map<std::string, double> category_percentages(const lexicon::Matcher& matcher,
                                                   std::span<const std::string> tokens);

// value = clamp(intercept + sum(weight * raw[category]), 0, 100).
// Throws if a referenced category is missing from `raw`.
std::map<std::string, double> compute_composites(const std::map<std::string, double>& raw,
                                                 const std::vector<CompositeDef>& defs);

FeatureVector extract_features(const lexicon::Matcher& matcher,
                               const std::vector<CompositeDef>& composites,
                               const DocumentInput& doc);

// One vector per document, in input order regardless of worker count.
std::vector<FeatureVector> extract_corpus(const lexicon::Matcher& matcher,
                                          const std::vector<CompositeDef>& composites,
                                          const std::vector<DocumentInput>& docs,
                                          int workers = 1);

// Feature table CSV: record_id,variant,degenerate,<schema columns>, values
// at full precision. Reading back reproduces the vectors exactly.
std::string feature_table_csv(const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> parse_feature_table(std::string_view csv_text);
void write_feature_table(const std::filesystem::path& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_feature_table(const std::filesystem::path& path);

}  // namespace stylegap::extract
