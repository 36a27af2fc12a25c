#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/date.hpp"
#include "ozlasso/features.hpp"

namespace ozlasso {

// Both throw on empty or unequal-length input.
double rmse(std::span<const double> pred, std::span<const double> obs);
double mae(std::span<const double> pred, std::span<const double> obs);

// Least-squares line of predicted on observed, plus Pearson r.
struct ScatterFit {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
};

// nullopt with fewer than 2 points or when either series is constant.
std::optional<ScatterFit> scatter_fit(std::span<const double> pred, std::span<const double> obs);

struct GroupMetrics {
    double rmse = 0.0;  // NaN when n == 0
    double mae = 0.0;
    std::size_t n = 0;
    std::optional<ScatterFit> scatter;
};

struct EvalMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
    std::array<GroupMetrics, 4> per_trimester{};
    std::optional<ScatterFit> scatter;
};

// Row indices per calendar quarter (Jan-Mar, Apr-Jun, Jul-Sep, Oct-Dec).
std::array<std::vector<std::size_t>, 4> trimester_split(std::span<const Date> dates);

EvalMetrics evaluate(std::span<const Date> dates, std::span<const double> pred, std::span<const double> obs);

// Tomorrow's statistic predicted as today's.
EvalMetrics persistence_baseline(std::span<const DailyFeatureRow> rows);

struct WeightEntry {
    std::size_t index = 0;
    double weight = 0.0;
    std::string name;
};

// Nonzero weights by |weight| descending, ties by index; at most k entries.
std::vector<WeightEntry> top_weights(const Eigen::VectorXd& beta,
                                     const std::function<std::string(std::size_t)>& name_of, std::size_t k);

struct ComparisonEntry {
    std::string method;
    EvalMetrics metrics;
    // Active and candidate feature counts; absent for the persistence row.
    std::optional<std::size_t> active;
    std::optional<std::size_t> candidates;
    std::string note;
    // The test set the metrics were computed on.
    std::vector<Date> dates;
    std::vector<double> observed;
};

// "active/ candidates", e.g. "105/ 918"; "n/a" without counts.
std::string feature_count_cell(const ComparisonEntry& e);

// Delimited table with one row per method. Throws SchemaError when the
// entries were not evaluated on identical test rows.
std::string comparison_table(std::span<const ComparisonEntry> entries, char delimiter = ',');

// scope,n,rmse,mae,slope,intercept,pearson_r for the whole set and per quarter.
std::string metrics_table(const EvalMetrics& m, char delimiter = ',');

}  // namespace ozlasso
