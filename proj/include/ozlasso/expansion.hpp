#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/design.hpp"
#include "ozlasso/features.hpp"

namespace ozlasso {

// Base columns, then the square of each base column, then every cross
// product (j, k), j < k, in lexicographic order.
constexpr std::size_t expanded_feature_count(std::size_t p0) {
    return 2 * p0 + p0 * (p0 - (p0 > 0 ? 1 : 0)) / 2;
}

// Mean and standard deviation of every product column (index p0 + t is
// stored at position t), fitted on training rows. sd == 0 marks a constant
// product column, which the accessor yields as all zeros.
struct ExpansionParams {
    std::vector<double> mean;
    std::vector<double> sd;
};

// Quadratic expansion of a standardized base design. `base_schema` names the
// base columns in order (one descriptor per column of `base`). Product columns are
// generated on demand from the base matrix and never stored together.
class ExpandedDesign final : public ColumnSource {
public:
    // Fits ExpansionParams on `base` (the training rows).
    ExpandedDesign(Eigen::MatrixXd base, std::vector<FeatureDescriptor> base_schema);
    // Reuses previously fitted params, e.g. for held-out rows.
    ExpandedDesign(Eigen::MatrixXd base, std::vector<FeatureDescriptor> base_schema, ExpansionParams params);

    std::size_t rows() const override { return static_cast<std::size_t>(base_.rows()); }
    std::size_t cols() const override { return expanded_feature_count(base_width()); }
    std::span<const double> column(std::size_t j, std::vector<double>& scratch) const override;

    std::size_t base_width() const { return static_cast<std::size_t>(base_.cols()); }
    const Eigen::MatrixXd& base() const { return base_; }
    const ExpansionParams& params() const { return params_; }

    // Product of the parent columns before re-standardization.
    std::span<const double> raw_product_column(std::size_t j, std::vector<double>& scratch) const;

    FeatureDescriptor descriptor(std::size_t j) const;
    std::vector<FeatureDescriptor> descriptors() const;

    // Approximate bytes a dense n x p copy would occupy.
    std::size_t materialized_bytes() const { return rows() * cols() * sizeof(double); }

private:
    Eigen::MatrixXd base_;
    std::vector<FeatureDescriptor> base_schema_;
    ExpansionParams params_;
};

// Parents (a, b) of expanded column j >= p0; a == b for squares.
std::pair<std::size_t, std::size_t> expansion_parents(std::size_t p0, std::size_t j);
std::size_t expansion_index(std::size_t p0, std::size_t a, std::size_t b);

// Value of expanded column j for one standardized base row.
double expanded_value(std::size_t p0, std::size_t j, std::span<const double> z, double mean, double sd);

// Full descriptor list for a base schema, without any data.
std::vector<FeatureDescriptor> expanded_schema(std::span<const FeatureDescriptor> base);

}  // namespace ozlasso
