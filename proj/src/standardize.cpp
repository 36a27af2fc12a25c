#include "ozlasso/standardize.hpp"

#include <cmath>

#include "ozlasso/error.hpp"

namespace ozlasso {

namespace {

struct Moments {
    double mean;
    double sd;
};

Moments population_moments(const double* v, Eigen::Index n) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += v[i];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = v[i] - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n))};
}

bool negligible_spread(const Moments& m) {
    return m.sd == 0.0 || m.sd <= 1e-10 * std::abs(m.mean);
}

}  // namespace

StandardizationParams fit_standardizer(const Eigen::MatrixXd& raw, const Eigen::VectorXd& y) {
    const auto n = raw.rows();
    if (n < 2) throw ConfigError("standardization needs at least 2 training rows, got " + std::to_string(n));
    if (y.size() != n) throw SchemaError("standardization: response length does not match row count");

    StandardizationParams p;
    p.raw_width = static_cast<std::size_t>(raw.cols());
    p.mu.resize(p.raw_width);
    p.sigma.resize(p.raw_width);
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        const auto m = population_moments(raw.col(j).data(), n);
        p.mu[static_cast<std::size_t>(j)] = m.mean;
        if (negligible_spread(m)) {
            p.sigma[static_cast<std::size_t>(j)] = 0.0;
            p.dropped.push_back(static_cast<std::size_t>(j));
        } else {
            p.sigma[static_cast<std::size_t>(j)] = m.sd;
            p.retained.push_back(static_cast<std::size_t>(j));
        }
    }
    if (p.retained.empty()) throw ConfigError("standardization: every feature column has zero variance");

    const auto ym = population_moments(y.data(), n);
    p.y_mu = ym.mean;
    if (negligible_spread(ym)) {
        p.y_sigma = 1.0;
        p.y_constant = true;
    } else {
        p.y_sigma = ym.sd;
    }
    return p;
}

Eigen::MatrixXd raw_matrix(std::span<const DailyFeatureRow> rows) {
    if (rows.empty()) return {};
    const auto p = rows.front().x.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].x.size() != p) throw SchemaError("feature rows have inconsistent widths");
        for (std::size_t j = 0; j < p; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].x[j];
    }
    return m;
}

Eigen::VectorXd raw_response(std::span<const DailyFeatureRow> rows, TargetMode mode) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = delta_target(rows[i], mode);
    return y;
}

StandardizationParams fit_standardizer(std::span<const DailyFeatureRow> rows, TargetMode mode) {
    return fit_standardizer(raw_matrix(rows), raw_response(rows, mode));
}

StandardizedData apply_standardizer(const StandardizationParams& params, const Eigen::MatrixXd& raw,
                                    const Eigen::VectorXd& y) {
    if (static_cast<std::size_t>(raw.cols()) != params.raw_width)
        throw SchemaError("feature width " + std::to_string(raw.cols()) + " does not match standardizer width " +
                          std::to_string(params.raw_width));
    if (y.size() != raw.rows()) throw SchemaError("response length does not match row count");
    StandardizedData out;
    out.X.resize(raw.rows(), static_cast<Eigen::Index>(params.width()));
    for (std::size_t k = 0; k < params.retained.size(); ++k) {
        const auto j = params.retained[k];
        const double mu = params.mu[j];
        const double sd = params.sigma[j];
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            out.X(i, static_cast<Eigen::Index>(k)) = (raw(i, static_cast<Eigen::Index>(j)) - mu) / sd;
    }
    out.Y.resize(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out.Y(i) = (y(i) - params.y_mu) / params.y_sigma;
    return out;
}

StandardizedData apply_standardizer(const StandardizationParams& params, std::span<const DailyFeatureRow> rows,
                                    TargetMode mode) {
    return apply_standardizer(params, raw_matrix(rows), raw_response(rows, mode));
}

Eigen::VectorXd standardize_row(const StandardizationParams& params, std::span<const double> raw) {
    if (raw.size() != params.raw_width)
        throw SchemaError("row width " + std::to_string(raw.size()) + " does not match model width " +
                          std::to_string(params.raw_width));
    Eigen::VectorXd z(static_cast<Eigen::Index>(params.width()));
    for (std::size_t k = 0; k < params.retained.size(); ++k) {
        const auto j = params.retained[k];
        z(static_cast<Eigen::Index>(k)) = (raw[j] - params.mu[j]) / params.sigma[j];
    }
    return z;
}

double destandardize_response(const StandardizationParams& params, double y_std) {
    return y_std * params.y_sigma + params.y_mu;
}

}  // namespace ozlasso
