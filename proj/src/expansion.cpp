#include "ozlasso/expansion.hpp"

#include <cmath>

#include "ozlasso/error.hpp"

namespace ozlasso {

namespace {

// First cross index of row a in the lexicographic (a, b), a < b enumeration.
std::size_t cross_row_offset(std::size_t p0, std::size_t a) { return a * p0 - a * (a + 1) / 2; }

}  // namespace

std::pair<std::size_t, std::size_t> expansion_parents(std::size_t p0, std::size_t j) {
    if (j < p0) throw Error("expansion_parents: column " + std::to_string(j) + " is a base column");
    if (j < 2 * p0) return {j - p0, j - p0};
    const std::size_t t = j - 2 * p0;
    if (j >= expanded_feature_count(p0)) throw Error("expansion_parents: column index out of range");
    // Largest a with cross_row_offset(a) <= t.
    std::size_t lo = 0, hi = p0 - 1;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cross_row_offset(p0, mid) <= t) lo = mid;
        else hi = mid;
    }
    const std::size_t a = cross_row_offset(p0, hi) <= t ? hi : lo;
    return {a, a + 1 + (t - cross_row_offset(p0, a))};
}

std::size_t expansion_index(std::size_t p0, std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    if (b >= p0) throw Error("expansion_index: parent out of range");
    if (a == b) return p0 + a;
    return 2 * p0 + cross_row_offset(p0, a) + (b - a - 1);
}

double expanded_value(std::size_t p0, std::size_t j, std::span<const double> z, double mean, double sd) {
    if (j < p0) return z[j];
    if (sd == 0.0) return 0.0;
    const auto [a, b] = expansion_parents(p0, j);
    return (z[a] * z[b] - mean) / sd;
}

ExpandedDesign::ExpandedDesign(Eigen::MatrixXd base, std::vector<FeatureDescriptor> base_schema)
    : base_(std::move(base)), base_schema_(std::move(base_schema)) {
    if (base_schema_.size() != base_width())
        throw SchemaError("ExpandedDesign: schema length does not match base width");
    const std::size_t p0 = base_width();
    const std::size_t extra = cols() - p0;
    params_.mean.assign(extra, 0.0);
    params_.sd.assign(extra, 0.0);
    std::vector<double> buf;
    const auto n = static_cast<double>(rows());
    for (std::size_t t = 0; t < extra; ++t) {
        const auto v = raw_product_column(p0 + t, buf);
        double s = 0.0;
        for (double x : v) s += x;
        const double m = s / n;
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / n);
        params_.mean[t] = m;
        params_.sd[t] = (sd == 0.0 || sd <= 1e-10 * std::abs(m)) ? 0.0 : sd;
    }
}

ExpandedDesign::ExpandedDesign(Eigen::MatrixXd base, std::vector<FeatureDescriptor> base_schema,
                               ExpansionParams params)
    : base_(std::move(base)), base_schema_(std::move(base_schema)), params_(std::move(params)) {
    if (base_schema_.size() != base_width())
        throw SchemaError("ExpandedDesign: schema length does not match base width");
    const std::size_t extra = cols() - base_width();
    if (params_.mean.size() != extra || params_.sd.size() != extra)
        throw SchemaError("ExpandedDesign: expansion params do not match base width");
}

std::span<const double> ExpandedDesign::raw_product_column(std::size_t j, std::vector<double>& scratch) const {
    const std::size_t p0 = base_width();
    const auto [a, b] = expansion_parents(p0, j);
    const double* ca = base_.col(static_cast<Eigen::Index>(a)).data();
    const double* cb = base_.col(static_cast<Eigen::Index>(b)).data();
    scratch.resize(rows());
    for (std::size_t i = 0; i < rows(); ++i) scratch[i] = ca[i] * cb[i];
    return scratch;
}

std::span<const double> ExpandedDesign::column(std::size_t j, std::vector<double>& scratch) const {
    const std::size_t p0 = base_width();
    if (j < p0) return {base_.col(static_cast<Eigen::Index>(j)).data(), rows()};
    const double m = params_.mean[j - p0];
    const double sd = params_.sd[j - p0];
    if (sd == 0.0) {
        scratch.assign(rows(), 0.0);
        return scratch;
    }
    raw_product_column(j, scratch);
    for (auto& v : scratch) v = (v - m) / sd;
    return scratch;
}

FeatureDescriptor ExpandedDesign::descriptor(std::size_t j) const {
    const std::size_t p0 = base_width();
    if (j < p0) {
        auto d = base_schema_[j];
        d.index = j;
        d.parents = {j};
        return d;
    }
    const auto [a, b] = expansion_parents(p0, j);
    if (a == b) return {j, base_schema_[a].name + "^2", FeatureCategory::Square, {a, a}};
    return {j, base_schema_[a].name + "*" + base_schema_[b].name, FeatureCategory::Interaction, {a, b}};
}

std::vector<FeatureDescriptor> ExpandedDesign::descriptors() const { return expanded_schema(base_schema_); }

std::vector<FeatureDescriptor> expanded_schema(std::span<const FeatureDescriptor> base) {
    const std::size_t p0 = base.size();
    std::vector<FeatureDescriptor> out;
    out.reserve(expanded_feature_count(p0));
    for (std::size_t j = 0; j < p0; ++j) {
        auto d = base[j];
        d.index = j;
        d.parents = {j};
        out.push_back(std::move(d));
    }
    for (std::size_t a = 0; a < p0; ++a)
        out.push_back({out.size(), base[a].name + "^2", FeatureCategory::Square, {a, a}});
    for (std::size_t a = 0; a < p0; ++a)
        for (std::size_t b = a + 1; b < p0; ++b)
            out.push_back({out.size(), base[a].name + "*" + base[b].name, FeatureCategory::Interaction, {a, b}});
    return out;
}

}  // namespace ozlasso
