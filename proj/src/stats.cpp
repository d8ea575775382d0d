#include "stylegap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace stylegap::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lentz's continued fraction for the incomplete beta function.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) <= kEpsilon) {
            break;
        }
    }
    return h;
}

// Regularized incomplete beta I_x(a, b).
double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // Use the fraction that converges fast for the given x.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values, double mean) {
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) {
        throw std::invalid_argument("student_t_sf: df must be positive");
    }
    if (std::isnan(t)) {
        return kNaN;
    }
    if (std::isinf(t)) {
        return t > 0.0 ? 0.0 : 1.0;
    }
    if (t < 0.0) {
        return 1.0 - student_t_sf(-t, df);
    }
    const double x = df / (df + t * t);
    return 0.5 * reg_incomplete_beta(0.5 * df, 0.5, x);
}

std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("pearson_r: samples must have equal length");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        return std::nullopt;
    }
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return std::nullopt;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> pearson_p(double r, std::size_t n) {
    if (n < 3 || !std::isfinite(r)) {
        return std::nullopt;
    }
    if (std::fabs(r) >= 1.0) {
        return 0.0;
    }
    const double df = static_cast<double>(n) - 2.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return 2.0 * student_t_sf(std::fabs(t), df);
}

WelchResult welch_t(std::span<const double> x, std::span<const double> y, bool equal_var) {
    WelchResult result;
    result.n_x = x.size();
    result.n_y = y.size();
    if (!x.empty()) {
        result.mean_x = mean_of(x);
    }
    if (!y.empty()) {
        result.mean_y = mean_of(y);
    }
    if (x.size() < 2 || y.size() < 2) {
        return result;
    }
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double vx = sample_variance(x, result.mean_x);
    const double vy = sample_variance(y, result.mean_y);
    if (vx == 0.0 && vy == 0.0) {
        return result;  // 0/0 statistic: stays undefined
    }
    double se = 0.0;
    double df = 0.0;
    if (equal_var) {
        const double pooled = ((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0);
        se = std::sqrt(pooled * (1.0 / nx + 1.0 / ny));
        df = nx + ny - 2.0;
    } else {
        const double ax = vx / nx;
        const double ay = vy / ny;
        se = std::sqrt(ax + ay);
        df = (ax + ay) * (ax + ay) /
             (ax * ax / (nx - 1.0) + ay * ay / (ny - 1.0));
    }
    const double t = (result.mean_x - result.mean_y) / se;
    result.t = t;
    result.df = df;
    result.p = 2.0 * student_t_sf(std::fabs(t), df);
    return result;
}

CorrelationMatrix correlation_matrix(const std::vector<extract::FeatureVector>& table_a,
                                     const std::vector<extract::FeatureVector>& table_b) {
    std::unordered_map<std::string, const extract::FeatureVector*> by_id;
    by_id.reserve(table_b.size());
    for (const auto& row : table_b) {
        by_id.emplace(row.record_id, &row);
    }

    std::vector<const extract::FeatureVector*> rows_a;
    std::vector<const extract::FeatureVector*> rows_b;
    for (const auto& row : table_a) {
        if (row.degenerate) {
            continue;
        }
        auto it = by_id.find(row.record_id);
        if (it == by_id.end() || it->second->degenerate) {
            continue;
        }
        rows_a.push_back(&row);
        rows_b.push_back(it->second);
    }
    if (rows_a.empty()) {
        throw std::invalid_argument("correlation_matrix: tables share no usable records");
    }

    const std::size_t n = rows_a.size();
    std::array<std::vector<double>, extract::kFeatureCount> cols_a;
    std::array<std::vector<double>, extract::kFeatureCount> cols_b;
    for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
        cols_a[f].resize(n);
        cols_b[f].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cols_a[f][i] = rows_a[i]->values[f];
            cols_b[f][i] = rows_b[i]->values[f];
        }
    }

    const auto& schema = extract::feature_schema();
    CorrelationMatrix matrix(extract::kFeatureCount);
    for (std::size_t i = 0; i < extract::kFeatureCount; ++i) {
        matrix[i].resize(extract::kFeatureCount);
        for (std::size_t j = 0; j < extract::kFeatureCount; ++j) {
            CorrelationResult& cell = matrix[i][j];
            cell.feature_a = std::string(schema[i]);
            cell.feature_b = std::string(schema[j]);
            cell.n = n;
            cell.r = pearson_r(cols_a[i], cols_b[j]);
            if (cell.r) {
                cell.p = pearson_p(*cell.r, n);
            }
        }
    }
    return matrix;
}

std::vector<CorrelationResult> diagonal(const CorrelationMatrix& matrix) {
    std::vector<CorrelationResult> cells;
    cells.reserve(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        cells.push_back(matrix[i][i]);
    }
    return cells;
}

VariantTTests gender_gap_tests_for_variant(
    const std::string& variant, const std::vector<extract::FeatureVector>& table,
    const std::map<std::string, gender::GenderLabel>& record_gender, double alpha,
    bool equal_var) {
    std::vector<const extract::FeatureVector*> female_rows;
    std::vector<const extract::FeatureVector*> male_rows;
    for (const auto& row : table) {
        if (row.degenerate) {
            continue;
        }
        auto it = record_gender.find(row.record_id);
        if (it == record_gender.end()) {
            continue;
        }
        if (it->second == gender::GenderLabel::Female) {
            female_rows.push_back(&row);
        } else if (it->second == gender::GenderLabel::Male) {
            male_rows.push_back(&row);
        }
    }

    const auto& schema = extract::feature_schema();
    VariantTTests tests;
    tests.variant = variant;
    tests.results.reserve(extract::kFeatureCount);
    std::vector<double> male_values(male_rows.size());
    std::vector<double> female_values(female_rows.size());
    for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
        for (std::size_t i = 0; i < male_rows.size(); ++i) {
            male_values[i] = male_rows[i]->values[f];
        }
        for (std::size_t i = 0; i < female_rows.size(); ++i) {
            female_values[i] = female_rows[i]->values[f];
        }
        const WelchResult w = welch_t(male_values, female_values, equal_var);
        TTestResult r;
        r.feature = std::string(schema[f]);
        r.t = w.t;
        r.df = w.df;
        r.p = w.p;
        r.mean_male = w.mean_x;
        r.mean_female = w.mean_y;
        r.n_male = w.n_x;
        r.n_female = w.n_y;
        r.significant = w.p.has_value() && *w.p < alpha;
        tests.results.push_back(std::move(r));
    }
    return tests;
}

}  // namespace stylegap::stats
