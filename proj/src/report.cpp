#include "stylegap/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string_view>

#include "stylegap/csv.hpp"
#include "stylegap/extract.hpp"
#include "stylegap/util.hpp"

namespace stylegap::report {

namespace {

constexpr std::array<std::string_view, 6> kSeriesColors = {
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
};

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            case '\'':
                out += "&apos;";
                break;
            default:
                out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) {
    std::string s = format_fixed(v, 2);
    return s;
}

struct Rgb {
    double r;
    double g;
    double b;
};

std::string rgb_string(const Rgb& c) {
    auto channel = [](double v) {
        return std::to_string(static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0))));
    };
    return "rgb(" + channel(c.r) + "," + channel(c.g) + "," + channel(c.b) + ")";
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// Diverging blue-white-red over [-1, 1].
std::string diverging_color(double v) {
    constexpr Rgb kBlue{33.0, 102.0, 172.0};
    constexpr Rgb kWhite{247.0, 247.0, 247.0};
    constexpr Rgb kRed{178.0, 24.0, 43.0};
    v = std::clamp(v, -1.0, 1.0);
    if (v < 0.0) {
        return rgb_string(lerp(kBlue, kWhite, v + 1.0));
    }
    return rgb_string(lerp(kWhite, kRed, v));
}

// Sequential dark-to-light over [0, 1].
std::string sequential_color(double v) {
    constexpr Rgb kDark{8.0, 48.0, 107.0};
    constexpr Rgb kLight{247.0, 251.0, 255.0};
    return rgb_string(lerp(kDark, kLight, std::clamp(v, 0.0, 1.0)));
}

void check_diagonal(const std::vector<stats::CorrelationResult>& diagonal) {
    const auto& schema = extract::feature_schema();
    if (diagonal.size() != schema.size()) {
        throw std::invalid_argument("correlation table: diagonal has " +
                                    std::to_string(diagonal.size()) + " cells, expected " +
                                    std::to_string(schema.size()));
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (diagonal[i].feature_a != schema[i] || diagonal[i].feature_b != schema[i]) {
            throw std::invalid_argument("correlation table: cell " + std::to_string(i) +
                                        " is (" + diagonal[i].feature_a + ", " +
                                        diagonal[i].feature_b + "), expected (" +
                                        std::string(schema[i]) + ", " + std::string(schema[i]) +
                                        ")");
        }
    }
}

std::string optional_fixed(const std::optional<double>& v) {
    if (!v) {
        return "NaN";
    }
    return format_fixed(*v, 2);
}

}  // namespace

std::string correlation_table_csv(
    const std::vector<std::string>& model_names,
    const std::vector<std::vector<stats::CorrelationResult>>& diagonals) {
    if (model_names.size() != diagonals.size()) {
        throw std::invalid_argument("correlation table: " + std::to_string(model_names.size()) +
                                    " names for " + std::to_string(diagonals.size()) +
                                    " diagonals");
    }
    for (const auto& diagonal : diagonals) {
        check_diagonal(diagonal);
    }

    std::vector<std::string> header = {"LIWC"};
    header.insert(header.end(), model_names.begin(), model_names.end());
    std::string out = csv::join_row(header);

    const auto& schema = extract::feature_schema();
    for (std::size_t i = 0; i < schema.size(); ++i) {
        std::vector<std::string> fields = {std::string(schema[i])};
        for (const auto& diagonal : diagonals) {
            fields.push_back(optional_fixed(diagonal[i].r));
        }
        out += csv::join_row(fields);
    }
    return out;
}

std::string ttest_table_csv(const std::vector<stats::VariantTTests>& variants, double alpha) {
    const auto& schema = extract::feature_schema();
    for (const auto& variant : variants) {
        if (variant.results.size() != schema.size()) {
            throw std::invalid_argument("t-test table: variant '" + variant.variant + "' has " +
                                        std::to_string(variant.results.size()) +
                                        " rows, expected " + std::to_string(schema.size()));
        }
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (variant.results[i].feature != schema[i]) {
                throw std::invalid_argument("t-test table: variant '" + variant.variant +
                                            "' row " + std::to_string(i) + " is '" +
                                            variant.results[i].feature + "', expected '" +
                                            std::string(schema[i]) + "'");
            }
        }
    }

    std::vector<std::string> header = {"LIWC"};
    for (const auto& variant : variants) {
        header.push_back(variant.variant);
        header.push_back(variant.variant + "_sig");
    }
    std::string out = csv::join_row(header);

    for (std::size_t i = 0; i < schema.size(); ++i) {
        std::vector<std::string> fields = {std::string(schema[i])};
        for (const auto& variant : variants) {
            const auto& r = variant.results[i];
            fields.push_back(optional_fixed(r.t));
            fields.push_back(r.p.has_value() && *r.p < alpha ? "*" : "");
        }
        out += csv::join_row(fields);
    }
    return out;
}

std::string heatmap_svg(const std::vector<std::vector<std::optional<double>>>& grid,
                        const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, HeatmapScale scale,
                        double alpha, const std::string& title) {
    if (grid.size() != row_labels.size()) {
        throw std::invalid_argument("heatmap: " + std::to_string(grid.size()) + " rows but " +
                                    std::to_string(row_labels.size()) + " row labels");
    }
    for (const auto& row : grid) {
        if (row.size() != col_labels.size()) {
            throw std::invalid_argument("heatmap: row with " + std::to_string(row.size()) +
                                        " cells but " + std::to_string(col_labels.size()) +
                                        " column labels");
        }
    }

    constexpr double kCell = 18.0;
    constexpr double kLeft = 92.0;
    constexpr double kTop = 112.0;
    constexpr double kLegendHeight = 56.0;
    const double rows = static_cast<double>(grid.size());
    const double cols = static_cast<double>(col_labels.size());
    const double width = std::max(kLeft + cols * kCell + 24.0, 360.0);
    const double height = kTop + rows * kCell + kLegendHeight + 16.0;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<defs>\n";
    svg += "<pattern id=\"undef\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
           "patternTransform=\"rotate(45)\">\n";
    svg += "<rect width=\"6\" height=\"6\" fill=\"#e8e8e8\"/>\n";
    svg += "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#9a9a9a\" stroke-width=\"2\"/>\n";
    svg += "</pattern>\n";
    svg += "</defs>\n";
    svg += "<rect width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + num(width / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" "
           "font-weight=\"bold\">" +
           xml_escape(title) + "</text>\n";

    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        const double x = kLeft + static_cast<double>(j) * kCell + kCell * 0.72;
        const double y = kTop - 6.0;
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" transform=\"rotate(-90 " +
               num(x) + " " + num(y) +
               ")\" text-anchor=\"start\" font-family=\"sans-serif\" font-size=\"9\">" +
               xml_escape(col_labels[j]) + "</text>\n";
    }
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const double y = kTop + static_cast<double>(i) * kCell + kCell * 0.72;
        svg += "<text x=\"" + num(kLeft - 6.0) + "\" y=\"" + num(y) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" +
               xml_escape(row_labels[i]) + "</text>\n";
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid[i].size(); ++j) {
            const double x = kLeft + static_cast<double>(j) * kCell;
            const double y = kTop + static_cast<double>(i) * kCell;
            const auto& cell = grid[i][j];
            std::string fill;
            if (!cell.has_value() || !std::isfinite(*cell)) {
                fill = "url(#undef)";
            } else if (scale == HeatmapScale::DivergingR) {
                fill = diverging_color(*cell);
            } else {
                fill = sequential_color(*cell);
            }
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(kCell) +
                   "\" height=\"" + num(kCell) + "\" fill=\"" + fill +
                   "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
            if (scale == HeatmapScale::SequentialP && cell.has_value() &&
                std::isfinite(*cell) && *cell < alpha) {
                svg += "<rect x=\"" + num(x + 1.0) + "\" y=\"" + num(y + 1.0) + "\" width=\"" +
                       num(kCell - 2.0) + "\" height=\"" + num(kCell - 2.0) +
                       "\" fill=\"none\" stroke=\"#d95f02\" stroke-width=\"1.5\"/>\n";
            }
        }
    }

    // Legend: five swatches spanning the scale, plus the undefined hatch.
    const double legend_y = kTop + rows * kCell + 18.0;
    const double swatch = 16.0;
    const bool diverging = scale == HeatmapScale::DivergingR;
    const double lo = diverging ? -1.0 : 0.0;
    const double hi = 1.0;
    for (int k = 0; k < 5; ++k) {
        const double value = lo + (hi - lo) * static_cast<double>(k) / 4.0;
        const double x = kLeft + static_cast<double>(k) * (swatch + 34.0);
        svg += "<rect x=\"" + num(x) + "\" y=\"" + num(legend_y) + "\" width=\"" + num(swatch) +
               "\" height=\"" + num(swatch) + "\" fill=\"" +
               (diverging ? diverging_color(value) : sequential_color(value)) +
               "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
        svg += "<text x=\"" + num(x + swatch + 3.0) + "\" y=\"" + num(legend_y + 12.0) +
               "\" font-family=\"sans-serif\" font-size=\"9\">" + num(value) + "</text>\n";
    }
    const double undef_x = kLeft + 5.0 * (swatch + 34.0);
    svg += "<rect x=\"" + num(undef_x) + "\" y=\"" + num(legend_y) + "\" width=\"" + num(swatch) +
           "\" height=\"" + num(swatch) +
           "\" fill=\"url(#undef)\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(undef_x + swatch + 3.0) + "\" y=\"" + num(legend_y + 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"9\">undefined</text>\n";
    if (!diverging) {
        svg += "<rect x=\"" + num(undef_x + 80.0) + "\" y=\"" + num(legend_y) + "\" width=\"" +
               num(swatch) + "\" height=\"" + num(swatch) +
               "\" fill=\"none\" stroke=\"#d95f02\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + num(undef_x + 80.0 + swatch + 3.0) + "\" y=\"" +
               num(legend_y + 12.0) + "\" font-family=\"sans-serif\" font-size=\"9\">p &lt; " +
               num(alpha) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

std::string significant_t_barchart_svg(const std::vector<stats::VariantTTests>& variants,
                                       double alpha) {
    const auto& schema = extract::feature_schema();
    std::vector<std::size_t> selected;
    for (std::size_t f = 0; f < schema.size(); ++f) {
        for (const auto& variant : variants) {
            if (f < variant.results.size()) {
                const auto& r = variant.results[f];
                if (r.p.has_value() && *r.p < alpha) {
                    selected.push_back(f);
                    break;
                }
            }
        }
    }

    const std::size_t n_variants = std::max<std::size_t>(variants.size(), 1);
    constexpr double kBar = 10.0;
    constexpr double kGroupGap = 10.0;
    constexpr double kLeft = 56.0;
    constexpr double kTop = 56.0;
    constexpr double kPlotHeight = 260.0;
    constexpr double kLabelSpace = 96.0;
    const double group_width = static_cast<double>(n_variants) * kBar + kGroupGap;
    const double plot_width =
        std::max(static_cast<double>(selected.size()) * group_width, 220.0);
    const double width = kLeft + plot_width + 170.0;  // room for the legend
    const double height = kTop + kPlotHeight + kLabelSpace;

    double max_abs = 0.0;
    for (std::size_t f : selected) {
        for (const auto& variant : variants) {
            const auto& r = variant.results[f];
            if (r.t.has_value() && std::isfinite(*r.t)) {
                max_abs = std::max(max_abs, std::fabs(*r.t));
            }
        }
    }
    if (max_abs == 0.0) {
        max_abs = 1.0;
    }

    const double y_zero = kTop + kPlotHeight / 2.0;
    const double y_span = kPlotHeight / 2.0 - 8.0;
    auto y_for = [&](double t) { return y_zero - (t / max_abs) * y_span; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<rect width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + num((kLeft + kLeft + plot_width) / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" "
           "font-weight=\"bold\">Gender gap t statistics (significant features)</text>\n";

    // y axis with five ticks.
    for (int k = -2; k <= 2; ++k) {
        const double value = max_abs * static_cast<double>(k) / 2.0;
        const double y = y_for(value);
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
               num(kLeft + plot_width) + "\" y2=\"" + num(y) + "\" stroke=\"" +
               (k == 0 ? "#555555" : "#dddddd") + "\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + num(kLeft - 6.0) + "\" y=\"" + num(y + 3.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" +
               num(value) + "</text>\n";
    }

    if (selected.empty()) {
        svg += "<text x=\"" + num(kLeft + plot_width / 2.0) + "\" y=\"" + num(y_zero - 12.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#555555\">No feature is significant at alpha = " +
               num(alpha) + "</text>\n";
    }

    for (std::size_t s = 0; s < selected.size(); ++s) {
        const std::size_t f = selected[s];
        const double group_x = kLeft + static_cast<double>(s) * group_width + kGroupGap / 2.0;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto& r = variants[v].results[f];
            if (!r.t.has_value() || !std::isfinite(*r.t)) {
                continue;
            }
            const double x = group_x + static_cast<double>(v) * kBar;
            const double y_value = y_for(*r.t);
            const double y = std::min(y_value, y_zero);
            const double bar_height = std::fabs(y_value - y_zero);
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(kBar - 2.0) +
                   "\" height=\"" + num(bar_height) + "\" fill=\"" +
                   std::string(kSeriesColors[v % kSeriesColors.size()]) + "\"/>\n";
        }
        const double label_x = group_x + (group_width - kGroupGap) / 2.0;
        const double label_y = kTop + kPlotHeight + 14.0;
        svg += "<text x=\"" + num(label_x) + "\" y=\"" + num(label_y) + "\" transform=\"rotate(-55 " +
               num(label_x) + " " + num(label_y) +
               ")\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" +
               xml_escape(std::string(schema[f])) + "</text>\n";
    }

    // Legend, one swatch per variant.
    const double legend_x = kLeft + plot_width + 24.0;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const double y = kTop + static_cast<double>(v) * 20.0;
        svg += "<rect x=\"" + num(legend_x) + "\" y=\"" + num(y) +
               "\" width=\"12\" height=\"12\" fill=\"" +
               std::string(kSeriesColors[v % kSeriesColors.size()]) + "\"/>\n";
        svg += "<text x=\"" + num(legend_x + 16.0) + "\" y=\"" + num(y + 10.0) +
               "\" font-family=\"sans-serif\" font-size=\"10\">" +
               xml_escape(variants[v].variant) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    atomic_write_file(path, content);
}

}  // namespace stylegap::report
