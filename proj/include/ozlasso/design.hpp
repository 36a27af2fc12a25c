#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ozlasso {

// Column-wise access to an n x p design. Solvers only ever touch the design
// through this interface, so a design may generate its columns on demand.
class ColumnSource {
public:
    virtual ~ColumnSource() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    // Values of column j. The returned view may alias `scratch` and stays
    // valid until `scratch` is reused.
    virtual std::span<const double> column(std::size_t j, std::vector<double>& scratch) const = 0;
};

// Non-owning view of a dense column-major matrix.
class DenseColumns final : public ColumnSource {
public:
    explicit DenseColumns(const Eigen::MatrixXd& X) : X_(&X) {}
    std::size_t rows() const override { return static_cast<std::size_t>(X_->rows()); }
    std::size_t cols() const override { return static_cast<std::size_t>(X_->cols()); }
    std::span<const double> column(std::size_t j, std::vector<double>&) const override {
        return {X_->col(static_cast<Eigen::Index>(j)).data(), rows()};
    }

private:
    const Eigen::MatrixXd* X_;
};

// A subset of rows of another source, each column shifted by its mean over
// the subset. Used for the training part of a cross-validation fold.
// Not safe for concurrent use (holds an internal buffer).
class CenteredRowSubset final : public ColumnSource {
public:
    CenteredRowSubset(const ColumnSource& base, std::vector<std::size_t> rows);
    std::size_t rows() const override { return rows_.size(); }
    std::size_t cols() const override { return base_->cols(); }
    std::span<const double> column(std::size_t j, std::vector<double>& scratch) const override;
    const std::vector<double>& column_means() const { return means_; }

private:
    const ColumnSource* base_;
    std::vector<std::size_t> rows_;
    std::vector<double> means_;
    mutable std::vector<double> inner_;
};

// Plain left-to-right loops; fixed summation order keeps results bit-identical
// regardless of where a column's storage lives.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

Eigen::MatrixXd materialize(const ColumnSource& source);

}  // namespace ozlasso
