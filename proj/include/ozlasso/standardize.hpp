#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/features.hpp"

namespace ozlasso {

// Per-column centring and scaling fitted on training rows only, population
// variance (divisor n). Columns with zero training variance are dropped.
struct StandardizationParams {
    std::size_t raw_width = 0;
    std::vector<double> mu;       // length raw_width
    std::vector<double> sigma;    // length raw_width; 0 for dropped columns
    std::vector<std::size_t> retained;
    std::vector<std::size_t> dropped;
    double y_mu = 0.0;
    double y_sigma = 1.0;
    // Training response had zero variance; y_sigma was left at 1.
    bool y_constant = false;

    std::size_t width() const { return retained.size(); }
};

struct StandardizedData {
    Eigen::MatrixXd X;  // n x retained
    Eigen::VectorXd Y;
};

// Throws ConfigError when fewer than 2 rows or every column is constant.
StandardizationParams fit_standardizer(const Eigen::MatrixXd& raw, const Eigen::VectorXd& y);
StandardizationParams fit_standardizer(std::span<const DailyFeatureRow> rows, TargetMode mode);

StandardizedData apply_standardizer(const StandardizationParams& params, const Eigen::MatrixXd& raw,
                                    const Eigen::VectorXd& y);
StandardizedData apply_standardizer(const StandardizationParams& params,
                                    std::span<const DailyFeatureRow> rows, TargetMode mode);

// Standardized retained features of one raw row. Throws SchemaError on a
// length mismatch.
Eigen::VectorXd standardize_row(const StandardizationParams& params, std::span<const double> raw);

double destandardize_response(const StandardizationParams& params, double y_std);

// Raw n x p matrix and response of a row set.
Eigen::MatrixXd raw_matrix(std::span<const DailyFeatureRow> rows);
Eigen::VectorXd raw_response(std::span<const DailyFeatureRow> rows, TargetMode mode);

}  // namespace ozlasso
