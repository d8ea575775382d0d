#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stylegap/stats.hpp"

namespace stylegap::report {

// Diagonal correlation table: rows are the 34 schema features, one column
// per model, values rounded to 2 decimals, undefined cells rendered "NaN".
// Header: LIWC,<model>,... Throws when a diagonal is misaligned.
std::string correlation_table_csv(const std::vector<std::string>& model_names,
                                  const std::vector<std::vector<stats::CorrelationResult>>& diagonals);

// Gender t-test table: per variant a t column (2 decimals) plus a marker
// column holding "*" when p < alpha. Header: LIWC,<v>,<v>_sig,...
std::string ttest_table_csv(const std::vector<stats::VariantTTests>& variants, double alpha);

enum class HeatmapScale {
    DivergingR,   // blue-white-red over [-1, 1]
    SequentialP,  // dark-to-light over [0, 1]; cells below alpha outlined
};

// Standalone SVG heatmap. Undefined cells are hatched. Output depends only
// on the inputs, so identical calls are byte-identical.
std::string heatmap_svg(const std::vector<std::vector<std::optional<double>>>& grid,
                        const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, HeatmapScale scale,
                        double alpha, const std::string& title);

// Grouped bars for every feature significant in at least one variant, one
// bar per variant, signed values around a zero line. Empty selection yields
// a chart with a caption note.
std::string significant_t_barchart_svg(const std::vector<stats::VariantTTests>& variants,
                                       double alpha);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace stylegap::report
