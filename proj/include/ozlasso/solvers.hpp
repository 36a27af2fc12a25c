#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/design.hpp"

namespace ozlasso {

enum class Method { Ols, Ridge, Lasso };
std::string_view method_name(Method m);

enum class SweepStrategy { FullSweep, ActiveSet };
std::string_view strategy_name(SweepStrategy s);
std::optional<SweepStrategy> strategy_from_name(std::string_view s);

// Penalty convention throughout: the objective is
//     (1/n) ||Y - X beta||^2 + lambda * ||beta||_1
// so the coordinate threshold is lambda/2, not lambda.
inline constexpr std::string_view kLambdaConvention = "eq7-halflambda";

struct LassoConfig {
    double lambda = 0.0;
    // Stop when a sweep moves no coordinate by more than tol (standardized units).
    double tol = 1e-7;
    int max_sweeps = 10000;
    SweepStrategy strategy = SweepStrategy::ActiveSet;
    // Certificate tolerance; 0 means 10 * tol.
    double kkt_tol = 0.0;
    // Record the objective after every coordinate update (small problems only).
    bool trace_objective = false;

    double effective_kkt_tol() const { return kkt_tol > 0.0 ? kkt_tol : 10.0 * tol; }
    void validate() const;
};

// Optimality certificate with g_j = X_jᵀ(Y - X beta) / n:
//   beta_j == 0:  |g_j| <= lambda/2 + tol
//   beta_j != 0:  |g_j - (lambda/2) sign(beta_j)| <= tol
struct KktCertificate {
    double max_inactive_excess = 0.0;  // max over zero coords of |g_j| - lambda/2
    double max_active_residual = 0.0;  // max over nonzero coords
    double tol = 0.0;
    bool satisfied = false;
};

struct ModelFit {
    Method method = Method::Lasso;
    double lambda = 0.0;
    // Intercept: mean of the response the fit was trained on.
    double beta0 = 0.0;
    Eigen::VectorXd beta;
    std::vector<std::size_t> active_set;
    int sweeps_used = 0;
    bool converged = true;
    // Y - beta0 - X beta on the training rows.
    Eigen::VectorXd residuals;
    KktCertificate kkt;
    // 1 / rcond of the factored normal matrix (OLS and ridge only).
    double condition_estimate = 0.0;
    std::vector<std::string> warnings;
    std::vector<double> objective_trace;

    std::size_t nonzero_count() const { return active_set.size(); }
};

double soft_threshold(double z, double theta);

// Normal equations XᵀX beta = XᵀY. X is expected to be centred (standardized);
// the intercept is the mean of Y. Throws SingularMatrixError naming the
// first numerically zero pivot.
ModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

// (XᵀX + n lambda I) beta = XᵀY.
ModelFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda);

// Ridge fits for many lambdas from one thin SVD X = U S Vᵀ:
// beta = V diag(s / (s² + n lambda)) UᵀY. Agrees with fit_ridge to rounding;
// lambda must be > 0 (use fit_ols for the unpenalized case).
class RidgePath {
public:
    RidgePath(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);
    ModelFit fit(double lambda) const;

private:
    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& Y_;
    Eigen::MatrixXd V_;
    Eigen::VectorXd s_;
    Eigen::VectorXd uty_;
};

// Cyclic coordinate descent ("shooting") with a maintained residual.
// `warm_start`, when given, seeds beta (length p).
ModelFit fit_lasso(const ColumnSource& X, const Eigen::VectorXd& Y, const LassoConfig& config,
                   const Eigen::VectorXd* warm_start = nullptr);

inline ModelFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const LassoConfig& config,
                          const Eigen::VectorXd* warm_start = nullptr) {
    return fit_lasso(DenseColumns(X), Y, config, warm_start);
}

// (1/n) ||Y - X beta||^2 + lambda ||beta||_1
double lasso_objective(const ColumnSource& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& beta,
                       double lambda);

KktCertificate lasso_kkt(const ColumnSource& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& beta,
                         double lambda, double tol);

// X beta for any column source (streams only the nonzero columns).
Eigen::VectorXd design_times(const ColumnSource& X, const Eigen::VectorXd& beta);

// Smallest lambda whose solution is identically zero: 2 max_j |X_jᵀY/n|.
double lambda_max(const ColumnSource& X, const Eigen::VectorXd& Y);

}  // namespace ozlasso
