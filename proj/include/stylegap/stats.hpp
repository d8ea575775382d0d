#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylegap/extract.hpp"
#include "stylegap/gender.hpp"

namespace stylegap::stats {

// Upper-tail probability of Student's t via the regularized incomplete beta
// function. Absolute error <= 1e-10 for df in [1, 1e4]. Throws on df <= 0.
double student_t_sf(double t, double df);

// Sample Pearson coefficient, clamped to [-1, 1]. Undefined (nullopt) when
// either sample has zero variance or n < 3. Throws on length mismatch.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y);

// Two-sided p for a Pearson coefficient: t = r*sqrt((n-2)/(1-r^2)),
// p = 2*sf(|t|, n-2); p = 0 when |r| = 1. Undefined when n < 3.
std::optional<double> pearson_p(double r, std::size_t n);

struct CorrelationResult {
    std::string feature_a;
    std::string feature_b;
    std::optional<double> r;
    std::optional<double> p;
    std::size_t n = 0;
};

struct WelchResult {
    std::optional<double> t;
    std::optional<double> df;
    std::optional<double> p;
    double mean_x = 0.0;
    double mean_y = 0.0;
    std::size_t n_x = 0;
    std::size_t n_y = 0;
};

// Two-sample test of mean_x - mean_y. Welch-Satterthwaite df by default;
// pooled Student when equal_var. Undefined when either group has n < 2 or
// both variances are zero (0/0 statistic, reported as NaN downstream).
WelchResult welch_t(std::span<const double> x, std::span<const double> y,
                    bool equal_var = false);

// Per-feature gender comparison; group order is (male, female) so t < 0
// means the female mean is higher.
struct TTestResult {
    std::string feature;
    std::optional<double> t;
    std::optional<double> df;
    std::optional<double> p;
    double mean_female = 0.0;
    double mean_male = 0.0;
    std::size_t n_female = 0;
    std::size_t n_male = 0;
    bool significant = false;  // p defined and p < alpha
};

using CorrelationMatrix = std::vector<std::vector<CorrelationResult>>;

// 34x34 grid over feature pairs (A_i, B_j) for records present in both
// tables, excluding degenerate rows. Throws when the intersection is empty.
CorrelationMatrix correlation_matrix(const std::vector<extract::FeatureVector>& table_a,
                                     const std::vector<extract::FeatureVector>& table_b);

// The 34 (A_i, B_i) cells: the cross-variant alignment view.
std::vector<CorrelationResult> diagonal(const CorrelationMatrix& matrix);

struct VariantTTests {
    std::string variant;
    std::vector<TTestResult> results;  // one per schema feature
};

// Welch (or pooled) tests per feature for one variant's table, using only
// records labeled Female or Male, degenerate rows excluded.
VariantTTests gender_gap_tests_for_variant(
    const std::string& variant, const std::vector<extract::FeatureVector>& table,
    const std::map<std::string, gender::GenderLabel>& record_gender, double alpha,
    bool equal_var = false);

}  // namespace stylegap::stats
