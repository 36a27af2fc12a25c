#include "ozlasso/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ozlasso/error.hpp"

namespace ozlasso {

namespace {

// Unbiased draw in [0, bound) from the raw engine output, so fold
// assignment does not depend on the standard library's distributions.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

double sample_sd(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view fold_mode_name(FoldMode m) { return m == FoldMode::Random ? "random" : "blocked"; }

std::optional<FoldMode> fold_mode_from_name(std::string_view s) {
    if (s == "random") return FoldMode::Random;
    if (s == "blocked") return FoldMode::Blocked;
    return std::nullopt;
}

std::optional<SelectionRule> selection_rule_from_name(std::string_view s) {
    if (s == "min") return SelectionRule::Min;
    if (s == "one_se" || s == "1se") return SelectionRule::OneSe;
    return std::nullopt;
}

std::string_view selection_rule_name(SelectionRule r) { return r == SelectionRule::Min ? "min" : "one_se"; }

std::vector<double> make_lambda_grid(const ColumnSource& X, const Eigen::VectorXd& Y, int n_points, double ratio) {
    if (n_points < 1) throw ConfigError("lambda grid needs at least one point");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("lambda grid ratio must lie in (0, 1)");
    if (static_cast<std::size_t>(Y.size()) != X.rows()) throw SchemaError("design and response lengths differ");
    const double mean = Y.mean();
    const double sd = std::sqrt((Y.array() - mean).square().mean());
    const double top = lambda_max(X, Y);
    if (top == 0.0 || sd <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw DegenerateTargetError("response is constant: lambda_max is zero and no penalty path exists");
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    grid[0] = top;
    for (int i = 1; i < n_points; ++i)
        grid[static_cast<std::size_t>(i)] = top * std::pow(ratio, static_cast<double>(i) / (n_points - 1));
    return grid;
}

std::vector<int> assign_folds(std::size_t n, int k, std::uint64_t seed, FoldMode mode) {
    if (k < 2) throw ConfigError("cross-validation needs k >= 2");
    if (n < static_cast<std::size_t>(k)) throw ConfigError("cross-validation needs at least k rows");
    std::vector<int> fold(n);
    if (mode == FoldMode::Blocked) {
        for (std::size_t i = 0; i < n; ++i) fold[i] = static_cast<int>(i * static_cast<std::size_t>(k) / n);
        return fold;
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[bounded(rng, i + 1)]);
    for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return fold;
}

void lasso_path(const ColumnSource& X, const Eigen::VectorXd& Y, std::span<const double> grid,
                const LassoConfig& config, bool warm_start,
                const std::function<void(std::size_t, const ModelFit&)>& visit) {
    Eigen::VectorXd warm;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LassoConfig cfg = config;
        cfg.lambda = grid[i];
        const bool seeded = warm_start && i > 0;
        const auto fit = fit_lasso(X, Y, cfg, seeded ? &warm : nullptr);
        if (warm_start) warm = fit.beta;
        visit(i, fit);
    }
}

ModelFit fit_lasso_continuation(const ColumnSource& X, const Eigen::VectorXd& Y, const LassoConfig& config) {
    config.validate();
    const double top = lambda_max(X, Y);
    if (!(config.lambda < top)) return fit_lasso(X, Y, config);
    const double step = std::pow(kDefaultGridRatio, 1.0 / (kDefaultGridPoints - 1));
    const double floor = top * 1e-10;
    std::vector<double> grid;
    for (double l = top; l > config.lambda && l > floor; l *= step) grid.push_back(l);
    grid.push_back(config.lambda);
    ModelFit last;
    lasso_path(X, Y, grid, config, true, [&](std::size_t i, const ModelFit& fit) {
        if (i + 1 == grid.size()) last = fit;
    });
    return last;
}

void apply_selection_rules(CvResult& cv) {
    if (cv.grid.empty() || cv.cv_mean.size() != cv.grid.size() || cv.cv_se.size() != cv.grid.size())
        throw ConfigError("malformed cross-validation result");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cv.grid.size(); ++i)
        if (cv.cv_mean[i] < cv.cv_mean[best]) best = i;
    const double band = cv.cv_mean[best] + cv.cv_se[best];
    std::size_t one_se = best;
    for (std::size_t i = 0; i <= best; ++i) {
        if (cv.cv_mean[i] <= band) {
            one_se = i;
            break;
        }
    }
    cv.index_min = best;
    cv.index_1se = one_se;
    cv.lambda_min = cv.grid[best];
    cv.lambda_1se = cv.grid[one_se];
}

double select_lambda(const CvResult& cv, SelectionRule rule) {
    return rule == SelectionRule::Min ? cv.lambda_min : cv.lambda_1se;
}

CvResult kfold_cv(const ColumnSource& X, const Eigen::VectorXd& Y, std::span<const double> grid,
                  const CvOptions& options) {
    const std::size_t n = X.rows();
    if (static_cast<std::size_t>(Y.size()) != n) throw SchemaError("design and response lengths differ");
    if (grid.empty()) throw ConfigError("empty lambda grid");

    CvResult cv;
    cv.grid.assign(grid.begin(), grid.end());
    cv.seed = options.seed;
    cv.k = options.k;
    cv.mode = options.mode;
    cv.fold_assignment = assign_folds(n, options.k, options.seed, options.mode);

    const std::size_t L = grid.size();
    const auto k = static_cast<std::size_t>(options.k);
    std::vector<std::vector<double>> fold_err(L, std::vector<double>(k, 0.0));

    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train, held;
        for (std::size_t i = 0; i < n; ++i)
            (cv.fold_assignment[i] == static_cast<int>(f) ? held : train).push_back(i);
        if (train.size() < 2)
            throw ConfigError("cross-validation fold " + std::to_string(f) + " leaves fewer than 2 training rows");

        const CenteredRowSubset fold_view(X, train);
        const bool dense_fold = train.size() * X.cols() * sizeof(double) <= options.materialize_limit_bytes;
        const Eigen::MatrixXd fold_dense = dense_fold ? materialize(fold_view) : Eigen::MatrixXd();
        const DenseColumns fold_columns(fold_dense);
        const ColumnSource& fold_x = dense_fold ? static_cast<const ColumnSource&>(fold_columns) : fold_view;
        double y_mean = 0.0;
        for (auto i : train) y_mean += Y(static_cast<Eigen::Index>(i));
        y_mean /= static_cast<double>(train.size());
        Eigen::VectorXd y_fold(static_cast<Eigen::Index>(train.size()));
        for (std::size_t t = 0; t < train.size(); ++t)
            y_fold(static_cast<Eigen::Index>(t)) = Y(static_cast<Eigen::Index>(train[t])) - y_mean;

        std::vector<double> buf;
        auto held_error = [&](const ModelFit& fit) {
            std::vector<double> pred(held.size(), y_mean + fit.beta0);
            for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
                const double b = fit.beta(j);
                if (b == 0.0) continue;
                const auto col = X.column(static_cast<std::size_t>(j), buf);
                const double m = fold_view.column_means()[static_cast<std::size_t>(j)];
                for (std::size_t h = 0; h < held.size(); ++h) pred[h] += b * (col[held[h]] - m);
            }
            double ss = 0.0;
            for (std::size_t h = 0; h < held.size(); ++h) {
                const double e = Y(static_cast<Eigen::Index>(held[h])) - pred[h];
                ss += e * e;
            }
            return ss / static_cast<double>(held.size());
        };

        if (options.solver == CvSolver::Lasso) {
            lasso_path(fold_x, y_fold, grid, options.lasso, options.warm_start,
                       [&](std::size_t i, const ModelFit& fit) { fold_err[i][f] = held_error(fit); });
        } else {
            const Eigen::MatrixXd dense = dense_fold ? fold_dense : materialize(fold_view);
            const RidgePath path(dense, y_fold);
            for (std::size_t i = 0; i < L; ++i) fold_err[i][f] = held_error(path.fit(grid[i]));
        }
    }

    cv.cv_mean.resize(L);
    cv.cv_se.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        cv.cv_mean[i] = std::accumulate(fold_err[i].begin(), fold_err[i].end(), 0.0) / static_cast<double>(k);
        cv.cv_se[i] = sample_sd(fold_err[i]) / std::sqrt(static_cast<double>(k));
    }
    apply_selection_rules(cv);

    cv.nonzero.assign(L, 0);
    if (options.full_path_nonzero) {
        if (options.solver == CvSolver::Lasso) {
            lasso_path(X, Y, grid, options.lasso, options.warm_start,
                       [&](std::size_t i, const ModelFit& fit) {
                           cv.nonzero[i] = fit.nonzero_count();
                           if (options.keep_fit && i == (*options.keep_fit == SelectionRule::Min ? cv.index_min : cv.index_1se))
                               cv.selected_fit = fit;
                       });
        } else {
            const Eigen::MatrixXd dense = materialize(X);
            const RidgePath path(dense, Y);
            for (std::size_t i = 0; i < L; ++i) cv.nonzero[i] = path.fit(grid[i]).nonzero_count();
        }
    }
    return cv;
}

}  // namespace ozlasso
