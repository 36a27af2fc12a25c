#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/design.hpp"
#include "ozlasso/solvers.hpp"

namespace ozlasso {

enum class FoldMode { Random, Blocked };
enum class CvSolver { Lasso, Ridge };
enum class SelectionRule { Min, OneSe };

std::string_view fold_mode_name(FoldMode m);
std::optional<FoldMode> fold_mode_from_name(std::string_view s);
std::optional<SelectionRule> selection_rule_from_name(std::string_view s);
std::string_view selection_rule_name(SelectionRule r);

struct CvResult {
    std::vector<double> grid;        // descending
    std::vector<double> cv_mean;     // mean over folds of held-out MSE
    std::vector<double> cv_se;       // standard error of the fold MSEs
    std::vector<std::size_t> nonzero;  // nonzero weights of the full-data fit per lambda
    std::size_t index_min = 0;
    std::size_t index_1se = 0;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    std::vector<int> fold_assignment;  // row -> fold
    std::uint64_t seed = 0;
    int k = 0;
    FoldMode mode = FoldMode::Random;
    // Full-data lasso fit at the rule requested through CvOptions::keep_fit.
    std::optional<ModelFit> selected_fit;
};

inline constexpr int kDefaultGridPoints = 100;
inline constexpr double kDefaultGridRatio = 1e-4;

// n_points log-spaced values from lambda_max down to ratio * lambda_max.
// Throws DegenerateTargetError when Y is constant (lambda_max == 0).
std::vector<double> make_lambda_grid(const ColumnSource& X, const Eigen::VectorXd& Y,
                                     int n_points = kDefaultGridPoints, double ratio = kDefaultGridRatio);

// Random: seeded Fisher-Yates permutation dealt round-robin into k folds.
// Blocked: k contiguous chronological blocks. Fold sizes differ by at most 1.
std::vector<int> assign_folds(std::size_t n, int k, std::uint64_t seed, FoldMode mode);

struct CvOptions {
    int k = 5;
    std::uint64_t seed = 0;
    FoldMode mode = FoldMode::Random;
    CvSolver solver = CvSolver::Lasso;
    LassoConfig lasso;
    bool warm_start = true;
    // Also fit the full data along the grid to report nonzero counts.
    bool full_path_nonzero = true;
    // Fold designs up to this size are copied into dense storage.
    std::size_t materialize_limit_bytes = std::size_t{256} << 20;
    // Keep the full-data fit at the index chosen by this rule (needs
    // full_path_nonzero).
    std::optional<SelectionRule> keep_fit;
};

// Each fold's training rows are re-centred on their own means before fitting;
// held-out rows are predicted with those means.
CvResult kfold_cv(const ColumnSource& X, const Eigen::VectorXd& Y, std::span<const double> grid,
                  const CvOptions& options);

// Fills index/lambda min and 1-SE from grid, cv_mean and cv_se.
void apply_selection_rules(CvResult& cv);

double select_lambda(const CvResult& cv, SelectionRule rule = SelectionRule::Min);

// Fits the grid in order, visiting each fit; with warm starts each solution
// seeds the next.
void lasso_path(const ColumnSource& X, const Eigen::VectorXd& Y, std::span<const double> grid,
                const LassoConfig& config, bool warm_start,
                const std::function<void(std::size_t, const ModelFit&)>& visit);

// Single-lambda fit reached by warm starts along a geometric path from
// lambda_max (default grid spacing, at most 10 decades), ending exactly at
// config.lambda. Same optimum as a cold fit; far fewer sweeps when lambda is
// tiny relative to lambda_max.
ModelFit fit_lasso_continuation(const ColumnSource& X, const Eigen::VectorXd& Y, const LassoConfig& config);

}  // namespace ozlasso
