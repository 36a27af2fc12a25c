#include "ozlasso/design.hpp"

#include "ozlasso/error.hpp"

namespace ozlasso {

double dot(std::span<const double> a, std::span<const double> b) {
    // Four interleaved partial sums, combined in a fixed order.
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

CenteredRowSubset::CenteredRowSubset(const ColumnSource& base, std::vector<std::size_t> rows)
    : base_(&base), rows_(std::move(rows)) {
    for (auto r : rows_)
        if (r >= base.rows()) throw Error("CenteredRowSubset: row index out of range");
    means_.resize(base.cols());
    std::vector<double> buf;
    for (std::size_t j = 0; j < base.cols(); ++j) {
        const auto col = base.column(j, buf);
        double s = 0.0;
        for (auto r : rows_) s += col[r];
        means_[j] = rows_.empty() ? 0.0 : s / static_cast<double>(rows_.size());
    }
}

std::span<const double> CenteredRowSubset::column(std::size_t j, std::vector<double>& scratch) const {
    const auto col = base_->column(j, inner_);
    scratch.resize(rows_.size());
    const double m = means_[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) scratch[i] = col[rows_[i]] - m;
    return scratch;
}

Eigen::MatrixXd materialize(const ColumnSource& source) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(source.rows()), static_cast<Eigen::Index>(source.cols()));
    std::vector<double> buf;
    for (std::size_t j = 0; j < source.cols(); ++j) {
        const auto col = source.column(j, buf);
        for (std::size_t i = 0; i < source.rows(); ++i)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return X;
}

}  // namespace ozlasso
