#include "ozlasso/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ozlasso/error.hpp"
#include "ozlasso/textio.hpp"

namespace ozlasso {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> obs) {
    if (pred.empty()) throw Error("metrics: empty input");
    if (pred.size() != obs.size()) throw Error("metrics: predicted and observed lengths differ");
}

GroupMetrics group_metrics(std::span<const double> pred, std::span<const double> obs) {
    GroupMetrics g;
    g.n = pred.size();
    if (g.n == 0) {
        g.rmse = g.mae = std::numeric_limits<double>::quiet_NaN();
        return g;
    }
    g.rmse = rmse(pred, obs);
    g.mae = mae(pred, obs);
    g.scatter = scatter_fit(pred, obs);
    return g;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> obs) {
    check_pair(pred, obs);
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> obs) {
    check_pair(pred, obs);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - obs[i]);
    return s / static_cast<double>(pred.size());
}

std::optional<ScatterFit> scatter_fit(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size()) throw Error("scatter_fit: lengths differ");
    const std::size_t n = pred.size();
    if (n < 2) return std::nullopt;
    const double mp = std::accumulate(pred.begin(), pred.end(), 0.0) / static_cast<double>(n);
    const double mo = std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = obs[i] - mo;
        const double dy = pred[i] - mp;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    ScatterFit f;
    f.slope = sxy / sxx;
    f.intercept = mp - f.slope * mo;
    f.pearson_r = sxy / std::sqrt(sxx * syy);
    return f;
}

std::array<std::vector<std::size_t>, 4> trimester_split(std::span<const Date> dates) {
    std::array<std::vector<std::size_t>, 4> out;
    for (std::size_t i = 0; i < dates.size(); ++i) out[static_cast<std::size_t>(dates[i].trimester())].push_back(i);
    return out;
}

EvalMetrics evaluate(std::span<const Date> dates, std::span<const double> pred, std::span<const double> obs) {
    check_pair(pred, obs);
    if (dates.size() != pred.size()) throw Error("evaluate: dates and predictions differ in length");
    EvalMetrics m;
    m.n = pred.size();
    m.rmse = rmse(pred, obs);
    m.mae = mae(pred, obs);
    m.scatter = scatter_fit(pred, obs);
    const auto groups = trimester_split(dates);
    for (std::size_t t = 0; t < 4; ++t) {
        std::vector<double> gp, go;
        for (auto i : groups[t]) {
            gp.push_back(pred[i]);
            go.push_back(obs[i]);
        }
        m.per_trimester[t] = group_metrics(gp, go);
    }
    return m;
}

EvalMetrics persistence_baseline(std::span<const DailyFeatureRow> rows) {
    std::vector<Date> dates;
    std::vector<double> pred, obs;
    for (const auto& r : rows) {
        dates.push_back(r.date);
        pred.push_back(r.current_anchor);
        obs.push_back(r.target_raw);
    }
    return evaluate(dates, pred, obs);
}

std::vector<WeightEntry> top_weights(const Eigen::VectorXd& beta,
                                     const std::function<std::string(std::size_t)>& name_of, std::size_t k) {
    std::vector<std::size_t> idx;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) idx.push_back(static_cast<std::size_t>(j));
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double wa = std::abs(beta(static_cast<Eigen::Index>(a)));
        const double wb = std::abs(beta(static_cast<Eigen::Index>(b)));
        if (wa != wb) return wa > wb;
        return a < b;
    });
    if (idx.size() > k) idx.resize(k);
    std::vector<WeightEntry> out;
    out.reserve(idx.size());
    for (auto j : idx) out.push_back({j, beta(static_cast<Eigen::Index>(j)), name_of(j)});
    return out;
}

std::string feature_count_cell(const ComparisonEntry& e) {
    if (!e.active || !e.candidates) return "n/a";
    return std::to_string(*e.active) + "/ " + std::to_string(*e.candidates);
}

std::string comparison_table(std::span<const ComparisonEntry> entries, char delimiter) {
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].dates != entries[0].dates || entries[i].observed != entries[0].observed)
            throw SchemaError("comparison: method '" + entries[i].method + "' was evaluated on a different test set than '" +
                              entries[0].method + "'");
    }
    const char d = delimiter;
    std::string out = std::string("method") + d + "rmse" + d + "mae" + d + "features" + d + "note\n";
    for (const auto& e : entries) {
        out += e.method + d;
        if (e.metrics.n > 0) {
            out += format_double(e.metrics.rmse) + d + format_double(e.metrics.mae) + d;
        } else {
            out += std::string("nan") + d + "nan" + d;
        }
        out += feature_count_cell(e) + d + e.note + "\n";
    }
    out += "# ARMA and SVM-regression comparison rows are not generated (no orders, kernels or hyperparameters available)\n";
    return out;
}

std::string metrics_table(const EvalMetrics& m, char delimiter) {
    const char d = delimiter;
    std::string out = std::string("scope") + d + "n" + d + "rmse" + d + "mae" + d + "slope" + d + "intercept" + d + "pearson_r\n";
    auto line = [&](const std::string& scope, std::size_t n, double r, double a, const std::optional<ScatterFit>& s) {
        out += scope + d + std::to_string(n) + d + format_double(r) + d + format_double(a) + d;
        if (s) out += format_double(s->slope) + d + format_double(s->intercept) + d + format_double(s->pearson_r);
        else out += std::string(1, d) + d;
        out += '\n';
    };
    line("all", m.n, m.rmse, m.mae, m.scatter);
    for (std::size_t t = 0; t < 4; ++t) {
        const auto& g = m.per_trimester[t];
        line("T" + std::to_string(t + 1), g.n, g.rmse, g.mae, g.scatter);
    }
    return out;
}

}  // namespace ozlasso
